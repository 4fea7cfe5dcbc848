#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace dd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
  public:
    using Error::Error;
};

/// An iterative kernel (ellipse projection, CG) failed to converge.
class ConvergenceError : public Error {
  public:
    using Error::Error;
};

/// Invalid or incomplete configuration; carries the offending key and line.
class ConfigError : public Error {
  public:
    ConfigError(std::string key, int line, const std::string& what)
        : Error(format(key, line, what)), key_(std::move(key)), line_(line) {}

    const std::string& key() const { return key_; }
    /// 1-based source line, or 0 when unknown.
    int line() const { return line_; }

  private:
    static std::string format(const std::string& key, int line, const std::string& what) {
        std::string out = "config";
        if (line > 0) out += ":" + std::to_string(line);
        if (!key.empty()) out += ": key '" + key + "'";
        return out + ": " + what;
    }

    std::string key_;
    int line_;
};

#define DD_REQUIRE(cond, msg)                                                 \
    do {                                                                      \
        if (!(cond)) throw ::dd::PreconditionError(std::string(__func__) + ": " + (msg)); \
    } while (0)

}  // namespace dd
