#pragma once

#include <vector>

namespace hmlab {

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
};

// Ordinary least squares y = slope * x + intercept.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Slope of log y against log x; non-positive entries are skipped.
LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

// Relative drift |a - b| / max(|a|, |b|); zero when both vanish.
double relative_drift(double a, double b);

}  // namespace hmlab
