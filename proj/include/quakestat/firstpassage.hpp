#pragma once

// Monte Carlo and quadrature oracles for the first-passage densities:
// Brownian stress paths with drift run from 0 to the barrier sigma, and the
// defining sigma-integral of the mixed densities evaluated numerically.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

#include "quakestat/stressdist.hpp"

namespace quakestat::fpt {

struct SimConfig {
    std::uint64_t n_paths = 100000;
    /// Fixed step of the raw Euler scheme; with bridge correction, the
    /// smallest step taken near the barrier.
    double dt = 1e-3;
    std::uint64_t seed = 1;
    /// Absorption horizon; paths still below the barrier at t_max are censored.
    double t_max = 1e12;
    bool bridge_correction = true;
    /// Worker threads; 0 means std::thread::hardware_concurrency().  Results
    /// do not depend on this value.
    unsigned workers = 0;
};

struct SampleSet {
    /// First-passage times in days, in path order.
    std::vector<double> times;
    std::uint64_t censored_count = 0;
    double t_max = std::numeric_limits<double>::infinity();
};

/// Simulates n_paths Brownian paths x(t) = V t + sqrt(D) W(t) to the first
/// passage of p.sigma.
///
/// With bridge correction the step h = max(dt, (sigma - x)^2 / D) is
/// exact for any size: increments are Gaussian, a crossing between the two
/// endpoints is detected with the bridge probability
/// exp(-2 (sigma - x0)(sigma - x1) / (D h)), and the crossing time is drawn
/// from its exact conditional law.  Without it the scheme is plain Euler on
/// a fixed grid of dt and reports the first grid time past the barrier.
SampleSet simulate_first_passage(const stress::StressParams& p, const SimConfig& cfg);

struct SigmaBounds {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
};

/// [1e-2, 1e2] * sigma_ref.
SigmaBounds default_sigma_bounds(double sigma_ref);

/// Draws sigma with density proportional to sigma^(-1-psi) on
/// [sigma_min, sigma_max] by inverse CDF, then simulates first passage with
/// the drift and diffusion of p_base.  sigma_min == sigma_max gives a fixed
/// barrier.
SampleSet sample_compound(double psi, double sigma_min, double sigma_max, const stress::StressParams& p_base,
                          const SimConfig& cfg);

/// Kolmogorov-Smirnov distance between the absorbed times and `cdf`
/// conditioned on absorption by t_max, i.e. cdf(t) / cdf(t_max).
double ks_distance(const SampleSet& sample, const std::function<double(double)>& cdf);

enum class MixtureNorm {
    /// Normalized when both bounds are finite and positive, raw otherwise.
    Auto,
    /// int igd_pdf(t; sigma) sigma^(-1-psi) dsigma.
    Raw,
    /// Raw divided by int sigma^(-1-psi) dsigma over the bounds: the density
    /// of sample_compound.
    Normalized,
};

/// Adaptive quadrature of int igd_pdf(t; sigma, D, V) sigma^(-1-psi) dsigma
/// over the bounds (p.sigma and p.psi are ignored).  Throws ConvergenceError
/// with the interval and error estimate when the tolerance is not met.
double compound_quadrature_pdf(double t, double psi, const stress::StressParams& p, SigmaBounds bounds = {},
                               MixtureNorm norm = MixtureNorm::Auto, double abs_tol = 1e-10);

/// Least-squares slope of log(histogram density) against log t over
/// [t_lo, t_hi] with logarithmic bins.  Density is per unit time relative to
/// all paths, so censoring does not bias it.
double histogram_log_slope(const SampleSet& sample, double t_lo, double t_hi, int bins_per_decade = 5);

/// Single column CSV with header `t_days`.
void write_samples_csv(std::ostream& out, const SampleSet& sample);

}  // namespace quakestat::fpt
