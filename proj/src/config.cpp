#include "dd/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "dd/error.hpp"

namespace dd {

using nlohmann::json;

int ConfigDocument::line_of(const std::string& key) const {
    const auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second;
}

namespace {

// Recursive-descent reader for one value of the key = value form.
class ValueReader {
  public:
    ValueReader(const std::string& text, std::string key, int line) : s_(text), key_(std::move(key)), line_(line) {}

    json read_all() {
        json v = value();
        skip();
        if (pos_ != s_.size()) fail("unexpected trailing text '" + s_.substr(pos_) + "'");
        return v;
    }

  private:
    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(key_, line_, what); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    json value() {
        skip();
        if (pos_ >= s_.size()) fail("missing value");
        const char c = s_[pos_];
        if (c == '{') return table();
        if (c == '[') return array();
        if (c == '"') return json(string());
        return scalar();
    }

    std::string string() {
        ++pos_;  // opening quote
        std::string out;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
                const char e = s_[++pos_];
                out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
            } else {
                out += s_[pos_];
            }
            ++pos_;
        }
        if (pos_ >= s_.size()) fail("unterminated string");
        ++pos_;
        return out;
    }

    std::string bare_key() {
        skip();
        if (pos_ < s_.size() && s_[pos_] == '"') return string();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                                    s_[pos_] == '-'))
            ++pos_;
        if (pos_ == start) fail("expected a key inside table");
        return s_.substr(start, pos_ - start);
    }

    json table() {
        ++pos_;
        json obj = json::object();
        if (eat('}')) return obj;
        do {
            const std::string k = bare_key();
            if (!eat('=') && !eat(':')) fail("expected '=' after '" + k + "'");
            if (obj.contains(k)) fail("duplicate key '" + k + "' in table");
            obj[k] = value();
        } while (eat(','));
        if (!eat('}')) fail("expected '}'");
        return obj;
    }

    json array() {
        ++pos_;
        json arr = json::array();
        if (eat(']')) return arr;
        do {
            skip();
            if (pos_ < s_.size() && s_[pos_] == ']') break;  // trailing comma
            arr.push_back(value());
        } while (eat(','));
        if (!eat(']')) fail("expected ']'");
        return arr;
    }

    json scalar() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != ',' &&
               s_[pos_] != ']' && s_[pos_] != '}')
            ++pos_;
        const std::string tok = s_.substr(start, pos_ - start);
        if (tok == "true") return true;
        if (tok == "false") return false;
        char* end = nullptr;
        const double d = std::strtod(tok.c_str(), &end);
        if (tok.empty() || end != tok.c_str() + tok.size()) fail("cannot read value '" + tok + "'");
        const bool integral = tok.find_first_of(".eEinN") == std::string::npos;
        if (integral) {
            errno = 0;
            if (tok.front() == '-') {
                const long long v = std::strtoll(tok.c_str(), nullptr, 10);
                if (errno == 0) return static_cast<std::int64_t>(v);
            } else {
                const unsigned long long v = std::strtoull(tok.c_str(), nullptr, 10);
                if (errno == 0) return static_cast<std::uint64_t>(v);
            }
        }
        return d;
    }

    const std::string& s_;
    std::string key_;
    int line_;
    std::size_t pos_{0};
};

std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

int bracket_balance(const std::string& s) {
    int depth = 0;
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
        if (in_str) continue;
        if (s[i] == '[' || s[i] == '{') ++depth;
        if (s[i] == ']' || s[i] == '}') --depth;
    }
    return depth;
}

ConfigDocument parse_kv(const std::string& text) {
    ConfigDocument doc;
    doc.root = json::object();
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError("", lineno, "empty section header");
            if (doc.root.contains(section)) throw ConfigError(section, lineno, "duplicate section");
            doc.root[section] = json::object();
            doc.lines[section] = lineno;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("", lineno, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
        if (key.empty()) throw ConfigError("", lineno, "missing key before '='");
        std::string value = trim(line.substr(eq + 1));
        const int start_line = lineno;
        while (bracket_balance(value) > 0 && std::getline(in, raw)) {
            ++lineno;
            value += " " + trim(strip_comment(raw));
        }
        if (bracket_balance(value) != 0) throw ConfigError(key, start_line, "unbalanced brackets");
        json& target = section.empty() ? doc.root : doc.root[section];
        const std::string full = section.empty() ? key : section + "." + key;
        if (target.contains(key)) throw ConfigError(full, start_line, "duplicate key");
        target[key] = ValueReader(value, full, start_line).read_all();
        doc.lines[full] = start_line;
    }
    return doc;
}

int line_at_offset(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

// Locates `"key"` in JSON text for diagnostics.
void index_json_lines(const std::string& text, ConfigDocument& doc) {
    for (const auto& [key, _] : doc.root.items()) {
        const auto pos = text.find("\"" + key + "\"");
        if (pos != std::string::npos) doc.lines[key] = line_at_offset(text, pos);
    }
}

// ---- typed accessors --------------------------------------------------------------------------

struct Reader {
    const ConfigDocument& doc;

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ConfigError(key, doc.line_of(key.substr(0, key.find('['))), what);
    }

    double number(const json& j, const std::string& key) const {
        if (!j.is_number()) fail(key, "expected a number");
        const double v = j.get<double>();
        if (!std::isfinite(v)) fail(key, "value must be finite");
        return v;
    }

    double positive(const json& j, const std::string& key) const {
        const double v = number(j, key);
        if (!(v > 0.0)) fail(key, "value must be positive");
        return v;
    }

    int integer(const json& j, const std::string& key) const {
        if (!j.is_number_integer()) fail(key, "expected an integer");
        return j.get<int>();
    }

    std::string text(const json& j, const std::string& key) const {
        if (!j.is_string()) fail(key, "expected a string");
        return j.get<std::string>();
    }

    std::vector<double> numbers(const json& j, const std::string& key, std::size_t n = 0) const {
        if (!j.is_array()) fail(key, "expected an array of numbers");
        if (n > 0 && j.size() != n) fail(key, "expected " + std::to_string(n) + " numbers");
        std::vector<double> out;
        for (const json& e : j) out.push_back(number(e, key));
        return out;
    }

    Vec2 vec2(const json& j, const std::string& key) const {
        const auto v = numbers(j, key, 2);
        return {v[0], v[1]};
    }

    std::vector<ModalTerm> modal_terms(const json& j, const std::string& key) const {
        if (!j.is_array()) fail(key, "expected [[power, mode, cos, sin], ...]");
        std::vector<ModalTerm> out;
        for (const json& e : j) {
            const auto v = numbers(e, key);
            if (v.size() < 3 || v.size() > 4) fail(key, "modal term needs [power, mode, cos] or [power, mode, cos, sin]");
            if (v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]) || v[0] < 0 || v[1] < 0)
                fail(key, "power and mode must be nonnegative integers");
            out.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]), v[2], v.size() == 4 ? v[3] : 0.0});
        }
        return out;
    }

    std::vector<FourierTerm> fourier_terms(const json& j, const std::string& key) const {
        if (!j.is_array()) fail(key, "expected [[mode, cos, sin], ...]");
        std::vector<FourierTerm> out;
        for (const json& e : j) {
            const auto v = numbers(e, key);
            if (v.size() < 2 || v.size() > 3) fail(key, "Fourier term needs [mode, cos] or [mode, cos, sin]");
            if (v[0] != std::floor(v[0]) || v[0] < 0) fail(key, "mode must be a nonnegative integer");
            out.push_back({static_cast<int>(v[0]), v[1], v.size() == 3 ? v[2] : 0.0});
        }
        return out;
    }

    BulkData registry(const std::string& name, Vec2 c, const std::string& key) const {
        if (name == "zero") return BulkData::constant(0.0);
        if (name == "one") return BulkData::constant(1.0);
        if (name == "r2") return BulkData::modal({{2, 0, 1.0, 0.0}}, c);
        if (name == "x") return BulkData::modal({{1, 1, 1.0, 0.0}}, c);
        if (name == "y") return BulkData::modal({{1, 1, 0.0, 1.0}}, c);
        if (name == "x2") return BulkData::modal({{2, 0, 0.5, 0.0}, {2, 2, 0.5, 0.0}}, c);
        if (name == "r3cos") return BulkData::modal({{3, 1, 1.0, 0.0}}, c);
        fail(key, "unknown registry field '" + name + "'");
    }

    BulkData bulk(const json& j, const std::string& key, Vec2 center) const {
        if (j.is_number()) return BulkData::constant(number(j, key));
        if (!j.is_object() || (j.size() != 1 && !(j.size() == 2 && j.contains("center"))))
            fail(key, "expected a number or one of {const}, {modal}, {radial}");
        if (j.contains("const")) return BulkData::constant(number(j["const"], key));
        if (j.contains("modal")) {
            const Vec2 c = j.contains("center") ? vec2(j["center"], key) : center;
            return BulkData::modal(modal_terms(j["modal"], key), c);
        }
        if (j.contains("radial")) return registry(text(j["radial"], key), center, key);
        fail(key, "expected one of {const}, {modal}, {radial}");
    }

    SurfaceData surface(const json& j, const std::string& key) const {
        if (j.is_number()) return SurfaceData::constant(number(j, key));
        if (!j.is_object() || j.size() != 1) fail(key, "expected a number or one of {const}, {fourier}");
        if (j.contains("const")) return SurfaceData::constant(number(j["const"], key));
        if (j.contains("fourier")) return SurfaceData::fourier(fourier_terms(j["fourier"], key));
        fail(key, "expected one of {const}, {fourier}");
    }

    MatrixData matrix(const json& j, const std::string& key, Vec2 center) const {
        if (j.is_object() && j.contains("matrix")) {
            const json& m = j["matrix"];
            if (!m.is_array() || m.size() != 2) fail(key, "matrix must be [[xx, xy], [yx, yy]]");
            const auto r0 = numbers(m[0], key, 2);
            const auto r1 = numbers(m[1], key, 2);
            return MatrixData::constant(Mat2{r0[0], r0[1], r1[0], r1[1]});
        }
        const BulkData s = bulk(j, key, center);
        if (s.is_constant()) return MatrixData::constant(s.constant_value() * Mat2::identity());
        return MatrixData::isotropic(s);
    }
};

const std::set<std::string> kKnownKeys = {
    "geometry", "radius", "center", "radii", "box", "profile", "epsilon", "rho", "h", "problem", "K", "beta", "m",
    "quad_order", "subdiv", "eta", "A", "a", "f", "B", "b", "g", "tol", "maxit", "precond", "reference",
    "manufactured", "oracle_modes", "oracle_points", "thresholds", "seed", "threads", "out", "degeneracy_floor",
    "probe_trials", "allow_coarse"};

}  // namespace

std::vector<std::string> bulk_registry_names() { return {"zero", "one", "r2", "x", "y", "x2", "r3cos"}; }

ConfigDocument parse_config_text(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        ConfigDocument doc;
        try {
            doc.root = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError("", line_at_offset(text, e.byte > 0 ? e.byte - 1 : 0), "malformed JSON");
        }
        if (!doc.root.is_object()) throw ConfigError("", 1, "top level must be an object");
        index_json_lines(text, doc);
        return doc;
    }
    return parse_kv(text);
}

ConfigDocument load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", 0, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

RunConfig make_run_config(const ConfigDocument& doc) {
    const json& root = doc.root;
    const Reader rd{doc};
    RunConfig cfg;
    cfg.source = root;

    for (const auto& [key, _] : root.items())
        if (!kKnownKeys.count(key)) rd.fail(key, "unknown key");
    auto has = [&](const char* k) { return root.contains(k); };

    // Geometry and box.
    Vec2 center{0.0, 0.0};
    if (has("center")) center = rd.vec2(root["center"], "center");
    const std::string gname = has("geometry") ? rd.text(root["geometry"], "geometry") : "circle";
    ProblemSpec& p = cfg.problem;
    try {
        if (gname == "circle") {
            if (has("radii")) rd.fail("radii", "a circle takes 'radius'");
            const double r = has("radius") ? rd.positive(root["radius"], "radius") : 1.0;
            p.geometry = SignedGeometry::circle(center, r);
        } else if (gname == "ellipse") {
            if (!has("radii")) rd.fail("radii", "an ellipse needs 'radii'");
            if (has("radius")) rd.fail("radius", "an ellipse takes 'radii'");
            const Vec2 radii = rd.vec2(root["radii"], "radii");
            p.geometry = SignedGeometry::ellipse(center, radii);
        } else {
            rd.fail("geometry", "expected \"circle\" or \"ellipse\"");
        }
    } catch (const PreconditionError& e) {
        rd.fail("geometry", e.what());
    }
    if (has("box")) {
        cfg.box = rd.numbers(root["box"], "box", 4);
        if (!(cfg.box[1] > cfg.box[0] && cfg.box[3] > cfg.box[2])) rd.fail("box", "box must be [xmin, xmax, ymin, ymax]");
    }

    // Profile.
    if (has("profile")) {
        const std::string name = rd.text(root["profile"], "profile");
        if (name == "double-well" || name == "dw")
            p.profile = Profile::double_well();
        else if (name == "double-obstacle" || name == "do")
            p.profile = Profile::double_obstacle();
        else
            rd.fail("profile", "expected \"double-well\" or \"double-obstacle\"");
    }

    // Epsilon list and spacing.
    if (!has("epsilon")) throw ConfigError("epsilon", 0, "missing required key");
    const json& ej = root["epsilon"];
    if (ej.is_array())
        cfg.epsilons = rd.numbers(ej, "epsilon");
    else
        cfg.epsilons = {rd.number(ej, "epsilon")};
    if (cfg.epsilons.empty()) rd.fail("epsilon", "at least one value is required");
    for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
        if (!(cfg.epsilons[i] > 0.0)) rd.fail("epsilon", "values must be positive");
        if (i > 0 && !(cfg.epsilons[i] < cfg.epsilons[i - 1])) rd.fail("epsilon", "values must be strictly decreasing");
    }
    if (has("rho") && has("h")) rd.fail("h", "give either 'h' or 'rho'");
    if (has("rho")) {
        cfg.rho = rd.number(root["rho"], "rho");
        if (!(cfg.rho >= 2.0)) rd.fail("rho", "rho must be at least 2");
    }
    if (has("h")) cfg.h = rd.positive(root["h"], "h");
    p.epsilon = cfg.epsilons.front();

    // Problem.
    if (has("problem")) {
        try {
            p.variant = parse_variant(rd.text(root["problem"], "problem"));
        } catch (const PreconditionError&) {
            rd.fail("problem", "expected one of cdd, sdd, rdd, dddh, nddh");
        }
    }
    if (has("K")) p.K = rd.positive(root["K"], "K");
    if (has("beta")) p.beta = rd.positive(root["beta"], "beta");
    if (has("m")) {
        p.m = rd.number(root["m"], "m");
        if (!(p.m > 0.0 && p.m <= 1.0)) rd.fail("m", "m must lie in (0, 1]");
    }
    if (has("eta")) p.eta = rd.positive(root["eta"], "eta");
    if (has("allow_coarse")) {
        if (!root["allow_coarse"].is_boolean()) rd.fail("allow_coarse", "expected true or false");
        p.allow_coarse = root["allow_coarse"].get<bool>();
    }
    if (has("quad_order")) {
        cfg.quad.order = rd.integer(root["quad_order"], "quad_order");
        if (cfg.quad.order < 1 || cfg.quad.order > 16) rd.fail("quad_order", "order must lie in [1, 16]");
    }
    if (has("subdiv")) {
        const json& s = root["subdiv"];
        if (s.is_string()) {
            if (s.get<std::string>() != "auto") rd.fail("subdiv", "expected \"auto\" or a positive integer");
            cfg.quad.subdiv = 0;
        } else {
            cfg.quad.subdiv = rd.integer(s, "subdiv");
            if (cfg.quad.subdiv < 1) rd.fail("subdiv", "expected \"auto\" or a positive integer");
        }
    }

    // Coefficients.
    const Vec2 gc = p.geometry.center();
    if (has("A")) p.A = rd.matrix(root["A"], "A", gc);
    if (has("B")) p.B = rd.matrix(root["B"], "B", gc);
    if (has("a")) p.a = rd.bulk(root["a"], "a", gc);
    if (has("b")) p.b = rd.bulk(root["b"], "b", gc);
    if (has("f")) p.f = rd.bulk(root["f"], "f", gc);
    if (has("g")) p.g = rd.surface(root["g"], "g");

    // Reference.
    if (has("reference")) {
        const std::string r = rd.text(root["reference"], "reference");
        if (r == "oracle")
            cfg.reference = Reference::Oracle;
        else if (r == "manufactured")
            cfg.reference = Reference::Manufactured;
        else if (r == "none")
            cfg.reference = Reference::None;
        else
            rd.fail("reference", "expected \"oracle\", \"manufactured\" or \"none\"");
    } else if (has("manufactured")) {
        cfg.reference = Reference::Manufactured;
    } else if (p.geometry.kind() != GeometryKind::Circle) {
        cfg.reference = Reference::None;
    }
    if (cfg.reference == Reference::Manufactured) {
        if (!has("manufactured")) rd.fail("manufactured", "manufactured reference needs a 'manufactured' table");
        if (has("f")) rd.fail("f", "f is generated from the manufactured solution");
        if (has("g")) rd.fail("g", "g is generated from the manufactured solution");
        const json& m = root["manufactured"];
        if (!m.is_object()) rd.fail("manufactured", "expected {u = [...], v = [...]}");
        for (const auto& [k, _] : m.items())
            if (k != "u" && k != "v") rd.fail("manufactured", "unknown entry '" + k + "'");
        if (m.contains("u")) cfg.manufactured_u = rd.modal_terms(m["u"], "manufactured");
        if (m.contains("v")) cfg.manufactured_v = rd.fourier_terms(m["v"], "manufactured");
        if (has_bulk(p.variant) && cfg.manufactured_u.empty()) rd.fail("manufactured", "bulk variants need 'u'");
        if (p.variant == Variant::SDD && cfg.manufactured_v.empty()) rd.fail("manufactured", "SDD needs 'v'");
    } else if (has("manufactured")) {
        rd.fail("manufactured", "only used with reference = \"manufactured\"");
    }
    if (cfg.reference == Reference::Oracle && p.geometry.kind() != GeometryKind::Circle)
        rd.fail("reference", "oracle references exist for circles only");
    if (has("oracle_modes")) {
        cfg.oracle.modes = rd.integer(root["oracle_modes"], "oracle_modes");
        if (cfg.oracle.modes < 0) rd.fail("oracle_modes", "must be nonnegative");
    }
    if (has("oracle_points")) {
        cfg.oracle.radial_cells = rd.integer(root["oracle_points"], "oracle_points");
        if (cfg.oracle.radial_cells < 16) rd.fail("oracle_points", "at least 16 radial cells are required");
    }

    // Solver.
    if (has("tol")) cfg.solver.tol = rd.positive(root["tol"], "tol");
    if (has("maxit")) {
        cfg.solver.maxit = rd.integer(root["maxit"], "maxit");
        if (cfg.solver.maxit < 1) rd.fail("maxit", "must be positive");
    }
    if (has("precond")) {
        const std::string pc = rd.text(root["precond"], "precond");
        if (pc == "jacobi")
            cfg.solver.precond = Preconditioner::Jacobi;
        else if (pc == "none")
            cfg.solver.precond = Preconditioner::None;
        else
            rd.fail("precond", "expected \"jacobi\" or \"none\"");
    }
    if (has("degeneracy_floor")) cfg.degeneracy_floor = rd.positive(root["degeneracy_floor"], "degeneracy_floor");
    if (has("probe_trials")) {
        cfg.probe_trials = rd.integer(root["probe_trials"], "probe_trials");
        if (cfg.probe_trials < 0) rd.fail("probe_trials", "must be nonnegative");
    }

    // Thresholds.
    if (has("thresholds")) {
        const json& t = root["thresholds"];
        if (!t.is_object()) rd.fail("thresholds", "expected a table");
        const std::map<std::string, double*> slots = {
            {"min_halving_factor", &cfg.thresholds.min_halving_factor},
            {"max_final_relative_h1", &cfg.thresholds.max_final_relative_h1},
            {"max_final_norm_gap", &cfg.thresholds.max_final_norm_gap},
            {"max_energy_variation", &cfg.thresholds.max_energy_variation},
            {"max_trace_ratio", &cfg.thresholds.max_trace_ratio},
            {"exact_tol", &cfg.thresholds.exact_tol}};
        for (const auto& [k, v] : t.items()) {
            const auto it = slots.find(k);
            if (it == slots.end()) rd.fail("thresholds." + k, "unknown threshold");
            *it->second = rd.positive(v, "thresholds." + k);
        }
    }

    // Run control.
    if (has("seed")) {
        if (!root["seed"].is_number_unsigned() && !root["seed"].is_number_integer()) rd.fail("seed", "expected an integer");
        if (root["seed"].is_number_integer() && root["seed"].get<std::int64_t>() < 0) rd.fail("seed", "must be nonnegative");
        cfg.seed = root["seed"].get<std::uint64_t>();
    }
    if (has("threads")) cfg.threads = rd.integer(root["threads"], "threads");
    if (has("out")) cfg.out_dir = rd.text(root["out"], "out");
    return cfg;
}

RunConfig load_run_config(const std::string& path) { return make_run_config(load_config_file(path)); }

}  // namespace dd
