#include "rwa/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rwa/types.hpp"

namespace rwa {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

std::vector<double> panels(double a, double b, const std::vector<double>& extra) {
    std::vector<double> pts{a, b};
    for (double p : extra)
        if (p > a && p < b) pts.push_back(p);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

PvResult sum_panels(const std::function<double(double)>& g, const std::vector<double>& pts,
                    const QuadratureOptions& opt) {
    PvResult r;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double err = 0.0, l1 = 0.0;
        const double v = GK::integrate(g, pts[i], pts[i + 1], opt.max_depth, opt.rel_tol, &err, &l1);
        r.value += v;
        r.error += err;
        r.l1 += l1;
    }
    return r;
}

void check(const PvResult& r, const QuadratureOptions& opt, double pole) {
    if (!std::isfinite(r.value) || !std::isfinite(r.error)) {
        std::ostringstream os;
        os << "quadrature: integrand not evaluable (pole " << pole << ")";
        throw QuadratureError(os.str(), std::numeric_limits<double>::infinity());
    }
    if (r.error > opt.fail_tol * std::max(r.l1, std::numeric_limits<double>::min())) {
        std::ostringstream os;
        os.precision(3);
        os << "quadrature did not converge at pole " << pole << ": error estimate " << r.error
           << " vs integral scale " << r.l1;
        throw QuadratureError(os.str(), r.error);
    }
}

} // namespace

PvResult integrate(const std::function<double(double)>& f, double a, double b,
                   const std::vector<double>& breakpoints, const QuadratureOptions& opt) {
    if (!(a < b)) return {};
    PvResult r = sum_panels(f, panels(a, b, breakpoints), opt);
    check(r, opt, std::numeric_limits<double>::quiet_NaN());
    return r;
}

PvResult pv_quadrature(const std::function<double(double)>& f, double pole, double a, double b,
                       const std::vector<double>& breakpoints, const QuadratureOptions& opt) {
    if (!(a < b)) return {};
    if (pole == a || pole == b)
        throw QuadratureError("pv_quadrature: pole on an integration endpoint",
                              std::numeric_limits<double>::infinity());
    if (pole < a || pole > b) {
        auto g = [&](double e) { return f(e) / (pole - e); };
        PvResult r = sum_panels(g, panels(a, b, breakpoints), opt);
        check(r, opt, pole);
        return r;
    }
    const double f0 = f(pole);
    if (!std::isfinite(f0))
        throw QuadratureError("pv_quadrature: integrand not evaluable at pole",
                              std::numeric_limits<double>::infinity());
    auto g = [&](double e) {
        if (e == pole) return 0.0;
        return (f(e) - f0) / (pole - e);
    };
    std::vector<double> bp = breakpoints;
    bp.push_back(pole);
    PvResult r = sum_panels(g, panels(a, b, bp), opt);
    check(r, opt, pole);
    // PV of 1/(pole - e) over [a, b]; the infinite-range log pieces cancel
    // only for a symmetric pair, which callers never request.
    if (std::isinf(a) || std::isinf(b)) {
        if (f0 != 0.0)
            throw QuadratureError("pv_quadrature: nonzero f at pole on an infinite range",
                                  std::numeric_limits<double>::infinity());
    } else {
        r.value += f0 * std::log((pole - a) / (b - pole));
    }
    return r;
}

} // namespace rwa
