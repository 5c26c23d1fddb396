#pragma once

#include <functional>
#include <initializer_list>
#include <span>

namespace quakestat::quad {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
};

using Integrand = std::function<double(double)>;

/// Double-exponential quadrature on [a, b]; b may be +infinity.  Integrable
/// endpoint singularities are fine.  Throws ConvergenceError when the error
/// estimate exceeds max(rel_tol * |I|, abs_tol) by more than a factor of 100.
QuadResult integrate(const Integrand& f, double a, double b, double rel_tol = 1e-12,
                     double abs_tol = 0.0);

/// Adaptive Gauss-Kronrod (15-point) on a finite interval with a smooth integrand.
QuadResult integrate_smooth(const Integrand& f, double a, double b, double rel_tol = 1e-12,
                            double abs_tol = 0.0);

/// `integrate` over consecutive breakpoints, the last of which may be
/// +infinity.  Convergence is judged on the total, so pieces that contribute
/// negligibly need not meet the relative tolerance on their own.
QuadResult integrate_pieces(const Integrand& f, std::span<const double> breakpoints,
                            double rel_tol = 1e-12, double abs_tol = 0.0);

inline QuadResult integrate_pieces(const Integrand& f, std::initializer_list<double> breakpoints,
                                   double rel_tol = 1e-12, double abs_tol = 0.0) {
    return integrate_pieces(f, std::span<const double>(breakpoints.begin(), breakpoints.size()),
                            rel_tol, abs_tol);
}

}  // namespace quakestat::quad
