#pragma once

// Inter-event time densities of the stress-release model: first passage of a
// Brownian stress path to a barrier (Levy, inverse Gaussian) and their
// mixtures over power-law distributed barriers.  Time is in days; D and V are
// in the matching stress^2/day and stress/day units.

#include <functional>
#include <limits>
#include <optional>

#include "quakestat/errors.hpp"

namespace quakestat::stress {

struct StressParams {
    double sigma = 1.0;  // barrier stress
    double D = 1.0;      // diffusion coefficient
    double V = 0.0;      // tectonic loading rate, any sign
    double psi = 0.0;    // stress-mixture exponent, 0 <= psi < 1
};

/// Characteristic time 2D/V^2 at which V^2 t / 2D = 1 (infinite for V = 0).
double crossover_time(double D, double V);

// Single-barrier densities.

double levy_pdf(double t, const StressParams& p);
double levy_cdf(double t, const StressParams& p);
/// Inverse Gaussian first-passage density; V = 0 gives levy_pdf.
double igd_pdf(double t, const StressParams& p);
/// P(first passage <= t).  For V < 0 the limit at infinity is exp(2 V sigma / D).
double igd_cdf(double t, const StressParams& p);

// Densities mixed over barriers with weight sigma^(-1-psi), normalised to
// equal the defining sigma-integral exactly.

double mixed_levy_pdf(double t, double psi, double D);
/// Dispatches to the closed forms below; never NaN for finite inputs.
double mixed_igd_pdf(double t, double psi, double D, double V);

/// 1F1 form, evaluated through the Kummer transform so that it never
/// overflows.  Valid for both signs of V but loses all accuracy to
/// cancellation for V < 0 once V^2 t / 2D exceeds about 15.
double mixed_igd_kummer(double t, double psi, double D, double V);
/// U form divided by sqrt(pi).  Equals the sigma-integral for V < 0 only.
double mixed_igd_tricomi(double t, double psi, double D, double V);
/// psi = 0: erf form.
double mixed_igd_psi0(double t, double D, double V);
/// psi = 1/2, V > 0: I_{-1/4} + I_{1/4} form with prefactor sqrt(pi V / 2D).
double mixed_igd_half_pos(double t, double D, double V);
/// psi = 1/2, V < 0: K_{1/4} form.
double mixed_igd_half_neg(double t, double D, double V);

// Asymptotic power laws.

enum class Regime { Small, Large };
enum class LoadingSign { Negative, Zero, Positive };

struct SlopeLaw {
    /// Power-law exponent of the density.
    double exponent = 0.0;
    /// c in the extra factor exp(-c V^2 t / D); zero when there is none.
    double decay_coefficient = 0.0;
};

SlopeLaw asymptotic_slope(Regime regime, double psi, LoadingSign sign);

/// d log f / d log t by a central difference in log t.
double local_log_slope(const std::function<double(double)>& f, double t, double log_step = 1e-3);

// Left truncation.

struct TruncatedDensity {
    double t_min = 0.0;
    double t_max = std::numeric_limits<double>::infinity();
    /// Multiplier making the density integrate to one on [t_min, t_max].
    double normalization = 1.0;
    std::function<double(double)> pdf;

    /// Normalised density; zero outside [t_min, t_max].
    double operator()(double t) const;
};

/// Thrown when the tail on [t_min, inf) is not integrable.
class UpperTruncationRequired : public DomainError {
public:
    UpperTruncationRequired() : DomainError("non-integrable tail: requires upper truncation") {}
};

/// Normalises `pdf` on [t_min, t_max].  Without t_max, a tail no steeper than
/// t^-1 raises UpperTruncationRequired ("requires upper truncation").
TruncatedDensity truncated_normalize(std::function<double(double)> pdf, double t_min,
                                     std::optional<double> t_max = std::nullopt);

/// Truncated mixed IGD density.  psi = 0 with V >= 0 has a log-divergent tail
/// and needs t_max.
TruncatedDensity truncated_mixed_igd(double psi, double D, double V, double t_min,
                                     std::optional<double> t_max = std::nullopt);

}  // namespace quakestat::stress
