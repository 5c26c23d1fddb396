#include "quakestat/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "quakestat/errors.hpp"

namespace quakestat::quad {
namespace {

// Boost 1.74 declares integrate() const but defines it non-const, and the
// rules grow their abscissa tables lazily, so each thread owns its copy.
boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
    thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
    return rule;
}

boost::math::quadrature::exp_sinh<double>& exp_sinh_rule() {
    thread_local boost::math::quadrature::exp_sinh<double> rule(12);
    return rule;
}

void check(const QuadResult& r, double scale, double rel_tol, double abs_tol, double a, double b) {
    const double target = std::max(rel_tol * scale, abs_tol);
    if (!std::isfinite(r.value) || r.abs_error > 100.0 * target + 1e-300) {
        std::ostringstream msg;
        msg << "quadrature on [" << a << ", " << b << "] did not converge: value " << r.value
            << ", error estimate " << r.abs_error << ", target " << target;
        throw ConvergenceError(msg.str());
    }
}

struct RawResult {
    QuadResult r;
    double l1 = 0.0;
};

RawResult integrate_raw(const Integrand& f, double a, double b, double rel_tol) {
    RawResult out;
    if (a == b) return out;
    if (b < a) {
        out = integrate_raw(f, b, a, rel_tol);
        out.r.value = -out.r.value;
        return out;
    }
    // A few ulps wide: the double-exponential abscissae collapse and the
    // rule's error estimate is noise, while the midpoint rule is exact to
    // rounding.
    if (std::isfinite(b) && b - a <= 1e-12 * std::max(std::abs(a), std::abs(b))) {
        const double fm = f(0.5 * (a + b));
        out.r.value = (b - a) * fm;
        out.r.abs_error = std::abs(out.r.value) * 1e-12;
        out.l1 = std::abs(out.r.value);
        return out;
    }
    try {
        if (std::isinf(b)) {
            out.r.value = exp_sinh_rule().integrate([&](double x) { return f(x); }, a, b, rel_tol,
                                                    &out.r.abs_error, &out.l1);
        } else {
            out.r.value = tanh_sinh_rule().integrate([&](double x) { return f(x); }, a, b, rel_tol,
                                                     &out.r.abs_error, &out.l1);
        }
    } catch (const std::exception& e) {
        throw ConvergenceError(std::string("quadrature failed: ") + e.what());
    }
    return out;
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, double rel_tol, double abs_tol) {
    const auto raw = integrate_raw(f, a, b, rel_tol);
    check(raw.r, std::max(std::abs(raw.r.value), raw.l1), rel_tol, abs_tol, a, b);
    return raw.r;
}

QuadResult integrate_smooth(const Integrand& f, double a, double b, double rel_tol, double abs_tol) {
    if (a == b) return {};
    QuadResult r;
    try {
        r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 20, rel_tol,
                                                                                &r.abs_error);
    } catch (const std::exception& e) {
        throw ConvergenceError(std::string("quadrature failed: ") + e.what());
    }
    check(r, std::abs(r.value), rel_tol, abs_tol, a, b);
    return r;
}

QuadResult integrate_pieces(const Integrand& f, std::span<const double> breakpoints, double rel_tol,
                            double abs_tol) {
    QuadResult total;
    double l1 = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i + 1] > breakpoints[i])) continue;
        const auto raw = integrate_raw(f, breakpoints[i], breakpoints[i + 1], rel_tol);
        total.value += raw.r.value;
        total.abs_error += raw.r.abs_error;
        l1 += raw.l1;
    }
    if (breakpoints.size() >= 2) {
        check(total, std::max(std::abs(total.value), l1), rel_tol, abs_tol, breakpoints.front(),
              breakpoints.back());
    }
    return total;
}

}  // namespace quakestat::quad
