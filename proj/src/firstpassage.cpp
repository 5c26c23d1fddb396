#include "quakestat/firstpassage.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <thread>

#include "quakestat/errors.hpp"
#include "quakestat/format.hpp"
#include "quakestat/quadrature.hpp"

namespace quakestat::fpt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Engine = std::mt19937_64;

Engine path_engine(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Engine(seq);
}

// Inverse Gaussian variate (Michael, Schucany and Haas 1976); mu = inf gives
// the Levy limit lambda / Z^2.
double inverse_gaussian(Engine& eng, double mu, double lambda) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    const double nu = normal(eng);
    const double y = nu * nu;
    if (std::isinf(mu)) return lambda / y;
    const double r = mu * y / (2.0 * lambda);
    // mu (1 + r - sqrt(r^2 + 2r)), written without cancellation
    const double x = mu / (1.0 + r + std::sqrt(r * r + 2.0 * r));
    return uniform(eng) <= mu / (mu + x) ? x : mu * mu / x;
}

// First-passage time of one path, NaN when censored at t_max.
double bridge_path(Engine& eng, double sigma, double D, double V, const SimConfig& cfg) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    double x = 0.0;
    double t = 0.0;
    // The step sequence does not depend on t_max, so a longer horizon only
    // ever adds absorbed paths.
    while (t < cfg.t_max) {
        const double gap = sigma - x;
        const double h = std::max(cfg.dt, gap * gap / D);
        const double x1 = x + V * h + std::sqrt(D * h) * normal(eng);
        bool crossed = x1 >= sigma;
        if (!crossed) crossed = uniform(eng) < std::exp(-2.0 * gap * (sigma - x1) / (D * h));
        if (crossed) {
            // Given a crossing, s = tau / (h - tau) is inverse Gaussian with
            // mu = gap / |sigma - x1| and lambda = gap^2 / (D h).
            const double c = std::abs(sigma - x1);
            const double s = inverse_gaussian(eng, c > 0.0 ? gap / c : kInf, gap * gap / (D * h));
            const double tau = std::isinf(s) ? h : h * s / (1.0 + s);
            const double hit = t + std::max(tau, std::numeric_limits<double>::denorm_min());
            return hit <= cfg.t_max ? hit : kNaN;
        }
        t += h;
        x = x1;
    }
    return kNaN;
}

double euler_path(Engine& eng, double sigma, double D, double V, const SimConfig& cfg) {
    std::normal_distribution<double> normal;
    const double step_sd = std::sqrt(D * cfg.dt);
    double x = 0.0;
    for (std::uint64_t k = 1;; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        if (t > cfg.t_max) return kNaN;
        x += V * cfg.dt + step_sd * normal(eng);
        if (x >= sigma) return t;
    }
}

void validate(const stress::StressParams& p, const SimConfig& cfg, bool need_sigma) {
    if (cfg.n_paths == 0) throw DomainError("simulation: n_paths must be >= 1");
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw DomainError("simulation: dt must be finite and > 0");
    if (!(cfg.t_max > 0.0)) throw DomainError("simulation: t_max must be > 0");
    if (need_sigma && !(p.sigma > 0.0 && std::isfinite(p.sigma))) {
        throw DomainError("simulation: sigma must be finite and > 0");
    }
    if (!(p.D > 0.0) || !std::isfinite(p.D)) throw DomainError("simulation: D must be finite and > 0");
    if (!std::isfinite(p.V)) throw DomainError("simulation: V must be finite");
}

// Runs `path(index, engine)` for every path across workers and gathers the
// absorbed times in path order.
template <class PathFn>
SampleSet run_paths(const SimConfig& cfg, PathFn path) {
    std::vector<double> result(cfg.n_paths);
    unsigned workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, cfg.n_paths));
    auto work = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
            Engine eng = path_engine(cfg.seed, i);
            result[i] = path(eng);
        }
    };
    if (workers <= 1) {
        work(0, cfg.n_paths);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (cfg.n_paths + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t begin = w * chunk;
            const std::uint64_t end = std::min(cfg.n_paths, begin + chunk);
            if (begin < end) pool.emplace_back(work, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    SampleSet out;
    out.t_max = cfg.t_max;
    out.times.reserve(result.size());
    for (double v : result) {
        if (std::isnan(v)) {
            ++out.censored_count;
        } else {
            out.times.push_back(v);
        }
    }
    return out;
}

double simulate_one(Engine& eng, double sigma, const stress::StressParams& p, const SimConfig& cfg) {
    return cfg.bridge_correction ? bridge_path(eng, sigma, p.D, p.V, cfg) : euler_path(eng, sigma, p.D, p.V, cfg);
}

// Inverse CDF of the density proportional to s^(-1-psi) on [lo, hi].
double power_law_quantile(double u, double psi, double lo, double hi) {
    if (lo == hi) return lo;
    if (psi == 0.0) return lo * std::pow(hi / lo, u);
    const double a = std::pow(lo, -psi);
    const double b = std::pow(hi, -psi);
    return std::pow(a - u * (a - b), -1.0 / psi);
}

// int_lo^hi s^(-1-psi) ds
double power_law_mass(double psi, double lo, double hi) {
    if (psi == 0.0) return std::log(hi / lo);
    return (std::pow(lo, -psi) - std::pow(hi, -psi)) / psi;
}

}  // namespace

SampleSet simulate_first_passage(const stress::StressParams& p, const SimConfig& cfg) {
    validate(p, cfg, true);
    return run_paths(cfg, [&](Engine& eng) { return simulate_one(eng, p.sigma, p, cfg); });
}

SigmaBounds default_sigma_bounds(double sigma_ref) {
    if (!(sigma_ref > 0.0)) throw DomainError("default_sigma_bounds: sigma_ref must be > 0");
    return {1e-2 * sigma_ref, 1e2 * sigma_ref};
}

SampleSet sample_compound(double psi, double sigma_min, double sigma_max, const stress::StressParams& p_base,
                          const SimConfig& cfg) {
    validate(p_base, cfg, false);
    if (!(psi >= 0.0 && psi < 1.0)) throw DomainError("sample_compound: requires 0 <= psi < 1");
    if (!(sigma_min > 0.0)) {
        throw DomainError("sample_compound: sigma_min must be > 0 (the power law is not normalizable at 0)");
    }
    if (!(sigma_max >= sigma_min) || !std::isfinite(sigma_max)) {
        throw DomainError("sample_compound: requires finite sigma_max >= sigma_min");
    }
    return run_paths(cfg, [&](Engine& eng) {
        std::uniform_real_distribution<double> uniform;
        const double sigma = power_law_quantile(uniform(eng), psi, sigma_min, sigma_max);
        return simulate_one(eng, sigma, p_base, cfg);
    });
}

double ks_distance(const SampleSet& sample, const std::function<double(double)>& cdf) {
    if (sample.times.empty()) throw DomainError("ks_distance: empty sample");
    const double mass = std::isinf(sample.t_max) ? 1.0 : cdf(sample.t_max);
    if (!(mass > 0.0)) throw DomainError("ks_distance: model cdf has no mass below t_max");
    std::vector<double> sorted = sample.times;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = std::min(1.0, cdf(sorted[i]) / mass);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

double compound_quadrature_pdf(double t, double psi, const stress::StressParams& p, SigmaBounds bounds,
                               MixtureNorm norm, double abs_tol) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("compound_quadrature_pdf: requires finite t > 0");
    if (!(psi >= 0.0 && psi < 1.0)) throw DomainError("compound_quadrature_pdf: requires 0 <= psi < 1");
    if (!(p.D > 0.0) || !std::isfinite(p.D) || !std::isfinite(p.V)) {
        throw DomainError("compound_quadrature_pdf: requires finite D > 0 and finite V");
    }
    if (!(bounds.lo >= 0.0) || !(bounds.hi >= bounds.lo)) {
        throw DomainError("compound_quadrature_pdf: requires 0 <= lo <= hi");
    }
    if (norm == MixtureNorm::Auto) {
        norm = (bounds.lo > 0.0 && std::isfinite(bounds.hi)) ? MixtureNorm::Normalized : MixtureNorm::Raw;
    }
    if (norm == MixtureNorm::Normalized && !(bounds.lo > 0.0 && std::isfinite(bounds.hi))) {
        throw DomainError("compound_quadrature_pdf: normalized mixture needs finite positive bounds");
    }
    const double D = p.D;
    const double V = p.V;
    if (bounds.lo == bounds.hi) {
        if (norm == MixtureNorm::Raw || bounds.lo == 0.0) return 0.0;
        return stress::igd_pdf(t, {bounds.lo, D, V});
    }

    // sigma = u^k with k = 1/(1 - psi): sigma^-psi dsigma = k du, which
    // removes the endpoint singularity at sigma = 0.
    const double k = 1.0 / (1.0 - psi);
    const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * D) - 1.5 * std::log(t);
    auto integrand = [=](double u) {
        const double s = std::pow(u, k);
        const double d = s - V * t;
        return k * std::exp(log_norm - d * d / (2.0 * D * t));
    };

    const double w = std::sqrt(D * t);
    std::vector<double> marks{w};
    if (V < 0.0) marks.push_back(D / std::abs(V));
    if (V > 0.0) {
        marks.push_back(V * t);
        marks.push_back(std::max(V * t - 8.0 * w, 0.1 * w));
        marks.push_back(V * t + 8.0 * w);
    }
    marks.push_back(*std::max_element(marks.begin(), marks.end()) + 40.0 * w);
    std::set<double> sigma_pts{bounds.lo, bounds.hi};
    for (double m : marks) {
        for (double frac : {1.0 / 64.0, 1.0 / 8.0, 1.0}) {
            const double s = m * frac;
            if (s > bounds.lo && s < bounds.hi) sigma_pts.insert(s);
        }
    }
    std::vector<double> u_pts;
    for (double s : sigma_pts) u_pts.push_back(std::isinf(s) ? s : std::pow(s, 1.0 - psi));

    const double raw = quad::integrate_pieces(integrand, u_pts, 1e-12, abs_tol).value;
    if (norm == MixtureNorm::Raw) return raw;
    return raw / power_law_mass(psi, bounds.lo, bounds.hi);
}

double histogram_log_slope(const SampleSet& sample, double t_lo, double t_hi, int bins_per_decade) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo) || bins_per_decade < 1) {
        throw DomainError("histogram_log_slope: requires 0 < t_lo < t_hi and bins_per_decade >= 1");
    }
    const int bins = std::max(1, static_cast<int>(std::lround(std::log10(t_hi / t_lo) * bins_per_decade)));
    const double log_lo = std::log(t_lo);
    const double step = (std::log(t_hi) - log_lo) / bins;
    std::vector<double> counts(bins, 0.0);
    for (double t : sample.times) {
        if (t < t_lo || t >= t_hi) continue;
        const int b = std::min(bins - 1, static_cast<int>((std::log(t) - log_lo) / step));
        counts[b] += 1.0;
    }
    const double total = static_cast<double>(sample.times.size() + sample.censored_count);
    std::vector<double> xs;
    std::vector<double> ys;
    for (int b = 0; b < bins; ++b) {
        if (counts[b] == 0.0) continue;
        const double left = std::exp(log_lo + b * step);
        const double right = std::exp(log_lo + (b + 1) * step);
        xs.push_back(log_lo + (b + 0.5) * step);
        ys.push_back(std::log(counts[b] / (total * (right - left))));
    }
    if (xs.size() < 3) throw DomainError("histogram_log_slope: fewer than 3 occupied bins");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

void write_samples_csv(std::ostream& out, const SampleSet& sample) {
    out << "t_days\n";
    for (double t : sample.times) out << format_double(t) << '\n';
}

}  // namespace quakestat::fpt
