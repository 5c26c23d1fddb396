#pragma once

// Special functions used by the inter-event time densities and the moment
// budget: gamma, erf, Kummer 1F1, Tricomi U and the modified Bessel
// functions I and K of real order.  Everything is double precision, pure and
// reentrant.

namespace quakestat::specfun {

/// A function value together with a conservative absolute error estimate
/// derived from term truncation and rounding accumulation.  `overflow` is set
/// when the true value exceeds the double range; `value` is then a signed
/// infinity.
struct EvalResult {
    double value = 0.0;
    double est_abs_error = 0.0;
    bool overflow = false;
};

EvalResult gamma(double x);
/// log|Gamma(x)| for x > 0; finite far beyond the overflow point of gamma().
EvalResult log_gamma(double x);
/// 1/Gamma(x), exactly zero at the poles.
double rgamma(double x);

EvalResult erf(double x);
EvalResult erfc(double x);
/// exp(x^2) erfc(x), accurate for large positive x where erfc underflows.
double erfcx(double x);

/// Kummer's confluent hypergeometric function M(a, b, z) = 1F1(a; b; z).
EvalResult kummer_1f1(double a, double b, double z);

/// Tricomi's confluent hypergeometric function U(a, b, z), z > 0.
EvalResult tricomi_u(double a, double b, double z);

enum class BesselKind { I, K };

/// Modified Bessel function I_nu(z) or K_nu(z), z > 0.
EvalResult modified_bessel(BesselKind kind, double nu, double z);

/// exp(-z) I_nu(z) or exp(z) K_nu(z).
EvalResult modified_bessel_scaled(BesselKind kind, double nu, double z);

// Individual algorithm branches, exposed so the switching thresholds can be
// checked for agreement in the overlap regions.
namespace detail {

inline constexpr double kKummerAsymptoticZ = 120.0;
inline constexpr double kKummerNegativeSeriesZ = 1.0;
inline constexpr double kTricomiConnectionZ = 2.0;
inline constexpr double kTricomiAsymptoticZ = 35.0;
inline constexpr double kBesselIAsymptoticZ = 30.0;
inline constexpr double kBesselKContinuedFractionZ = 2.0;

EvalResult kummer_series(double a, double b, double z);
/// Leading large-|z| expansion for either sign of z.
EvalResult kummer_asymptotic(double a, double b, double z);

EvalResult tricomi_connection(double a, double b, double z);
/// Returns est_abs_error = +inf when the expansion does not converge to
/// working precision at this z.
EvalResult tricomi_asymptotic(double a, double b, double z);
EvalResult tricomi_quadrature(double a, double b, double z);

/// exp(-z) I_nu(z) from the ascending series.
EvalResult bessel_i_series_scaled(double nu, double z);
/// exp(-z) I_nu(z) from the large-z expansion.
EvalResult bessel_i_asymptotic_scaled(double nu, double z);
/// exp(z) K_nu(z) from the reflection formula (non-integer nu).
EvalResult bessel_k_reflection_scaled(double nu, double z);
/// exp(z) K_nu(z) from Steed's continued fraction plus forward recurrence.
EvalResult bessel_k_cf2_scaled(double nu, double z);

}  // namespace detail

}  // namespace quakestat::specfun
