#pragma once

#include <vector>

namespace dd {

/// Ordinary least squares fit y = intercept + slope x.
struct LineFit {
    double slope{0};
    double intercept{0};
    /// Standard error of the slope; zero for two points or an exact fit.
    double slope_stderr{0};
    /// Half-width of the 95% confidence interval of the slope.
    double ci95{0};
    /// Root mean square residual of the fit.
    double rms_residual{0};
    int points{0};
};

/// OLS fit on all points; needs at least two distinct x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Fit of log(err) against log(eps) on all points.
LineFit fit_loglog(const std::vector<double>& eps, const std::vector<double>& err);

}  // namespace dd
