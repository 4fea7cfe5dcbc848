#include "dd/fit.hpp"

#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "dd/error.hpp"

namespace dd {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    DD_REQUIRE(x.size() == y.size(), "x and y differ in length");
    DD_REQUIRE(x.size() >= 2, "a line fit needs at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        DD_REQUIRE(std::isfinite(x[i]) && std::isfinite(y[i]), "fit data must be finite");
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    DD_REQUIRE(sxx > 0.0, "a line fit needs two distinct x values");
    LineFit fit;
    fit.points = static_cast<int>(x.size());
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        sse += r * r;
    }
    fit.rms_residual = std::sqrt(sse / n);
    if (x.size() > 2) {
        const double dof = n - 2.0;
        fit.slope_stderr = std::sqrt(sse / dof / sxx);
        const boost::math::students_t dist(dof);
        fit.ci95 = boost::math::quantile(boost::math::complement(dist, 0.025)) * fit.slope_stderr;
    }
    return fit;
}

LineFit fit_loglog(const std::vector<double>& eps, const std::vector<double>& err) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < eps.size() && i < err.size(); ++i) {
        DD_REQUIRE(eps[i] > 0.0 && err[i] > 0.0, "log-log fit needs positive values");
        lx.push_back(std::log(eps[i]));
        ly.push_back(std::log(err[i]));
    }
    return fit_line(lx, ly);
}

}  // namespace dd
