#pragma once

#include <functional>
#include <vector>

namespace rwa {

struct PvResult {
    double value = 0.0;
    double error = 0.0; // absolute error estimate
    double l1 = 0.0;    // integral of |integrand| after subtraction
};

struct QuadratureOptions {
    double rel_tol = 1e-11;  // requested per panel
    double fail_tol = 1e-5;  // error/l1 above this throws QuadratureError
    unsigned max_depth = 22;
};

// PV integral of f(e)/(pole - e) over [a, b]. a or b may be infinite.
// For a < pole < b the pole is removed by subtracting f(pole); otherwise
// this is an ordinary integral. Breakpoints split the panels (kinks and
// jumps of f).
PvResult pv_quadrature(const std::function<double(double)>& f, double pole, double a, double b,
                       const std::vector<double>& breakpoints = {},
                       const QuadratureOptions& opt = {});

// Plain integral of f over [a, b] (either end may be infinite).
PvResult integrate(const std::function<double(double)>& f, double a, double b,
                   const std::vector<double>& breakpoints = {},
                   const QuadratureOptions& opt = {});

} // namespace rwa
