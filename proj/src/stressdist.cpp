#include "quakestat/stressdist.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "quakestat/quadrature.hpp"
#include "quakestat/specfun.hpp"

namespace quakestat::stress {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrtPi = 1.772453850905516027298167;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_time(double t, const char* what) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError(std::string(what) + ": requires finite t > 0");
}

void require_diffusion(double D, const char* what) {
    if (!(D > 0.0) || !std::isfinite(D)) throw DomainError(std::string(what) + ": requires finite D > 0");
}

void require_psi(double psi, const char* what) {
    if (!(psi >= 0.0 && psi < 1.0)) throw DomainError(std::string(what) + ": requires 0 <= psi < 1");
}

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite argument");
}

void require_barrier(const StressParams& p, const char* what) {
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
        throw DomainError(std::string(what) + ": requires finite sigma > 0");
    }
    require_diffusion(p.D, what);
    require_finite(p.V, what);
}

void require_mixture(double t, double psi, double D, double V, const char* what) {
    require_time(t, what);
    require_psi(psi, what);
    require_diffusion(D, what);
    require_finite(V, what);
}

// 1 / (2 t sqrt(pi) (2 t D)^(psi/2)), the factor shared by all mixed forms.
double mixture_prefactor(double t, double psi, double D) {
    return 1.0 / (2.0 * t * kSqrtPi * std::pow(2.0 * t * D, 0.5 * psi));
}

// sigma / sqrt(2 pi D t^3) exp(-d^2 / 2Dt), with the power folded into the
// exponent so that t -> 0 gives 0 rather than inf * 0.
double first_passage_density(double t, double sigma, double D, double d) {
    return sigma / std::sqrt(2.0 * kPi * D) * std::exp(-d * d / (2.0 * D * t) - 1.5 * std::log(t));
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

double crossover_time(double D, double V) {
    require_diffusion(D, "crossover_time");
    require_finite(V, "crossover_time");
    return V == 0.0 ? kInf : 2.0 * D / (V * V);
}

double levy_pdf(double t, const StressParams& p) {
    require_time(t, "levy_pdf");
    require_barrier(p, "levy_pdf");
    return first_passage_density(t, p.sigma, p.D, p.sigma);
}

double levy_cdf(double t, const StressParams& p) {
    require_time(t, "levy_cdf");
    require_barrier(p, "levy_cdf");
    return std::erfc(p.sigma / std::sqrt(2.0 * p.D * t));
}

double igd_pdf(double t, const StressParams& p) {
    require_time(t, "igd_pdf");
    require_barrier(p, "igd_pdf");
    return first_passage_density(t, p.sigma, p.D, p.sigma - p.V * t);
}

double igd_cdf(double t, const StressParams& p) {
    require_time(t, "igd_cdf");
    require_barrier(p, "igd_cdf");
    const double s = std::sqrt(p.D * t);
    const double first = standard_normal_cdf((p.V * t - p.sigma) / s);
    // exp(2 V sigma / D) Phi(-(sigma + V t) / sqrt(D t))
    const double w = (p.sigma + p.V * t) / (std::numbers::sqrt2 * s);
    double second;
    if (w > 0.0) {
        const double d = p.sigma - p.V * t;
        second = 0.5 * std::exp(-d * d / (2.0 * p.D * t)) * specfun::erfcx(w);
    } else {
        second = 0.5 * std::exp(2.0 * p.V * p.sigma / p.D) * std::erfc(w);
    }
    return std::min(1.0, first + second);
}

double mixed_levy_pdf(double t, double psi, double D) {
    require_mixture(t, psi, D, 0.0, "mixed_levy_pdf");
    return mixture_prefactor(t, psi, D) * std::tgamma(0.5 * (1.0 - psi));
}

double mixed_igd_kummer(double t, double psi, double D, double V) {
    require_mixture(t, psi, D, V, "mixed_igd_kummer");
    const double x = V * V * t / (2.0 * D);
    // exp(-x) M(a, b, x) = M(b - a, b, -x)
    const double m1 = specfun::kummer_1f1(0.5 * psi, 0.5, -x).value;
    const double m2 = specfun::kummer_1f1(0.5 + 0.5 * psi, 1.5, -x).value;
    const double bracket = std::tgamma(0.5 * (1.0 - psi)) * m1 +
                           V * std::sqrt(2.0 * t / D) * std::tgamma(1.0 - 0.5 * psi) * m2;
    return mixture_prefactor(t, psi, D) * bracket;
}

double mixed_igd_tricomi(double t, double psi, double D, double V) {
    require_mixture(t, psi, D, V, "mixed_igd_tricomi");
    const double x = V * V * t / (2.0 * D);
    if (x == 0.0) return mixed_levy_pdf(t, psi, D);
    const double a = 0.5 * (1.0 - psi);
    const double u = specfun::tricomi_u(a, 0.5, x).value;
    return mixture_prefactor(t, psi, D) * std::exp(-x) * std::tgamma(a) * std::tgamma(1.0 - 0.5 * psi) * u /
           kSqrtPi;
}

double mixed_igd_psi0(double t, double D, double V) {
    require_mixture(t, 0.0, D, V, "mixed_igd_psi0");
    // 1 + erf(y) = erfc(-y) keeps full accuracy for large negative V.
    return std::erfc(-V * std::sqrt(t / (2.0 * D))) / (2.0 * t);
}

double mixed_igd_half_pos(double t, double D, double V) {
    require_mixture(t, 0.5, D, V, "mixed_igd_half_pos");
    if (!(V > 0.0)) throw DomainError("mixed_igd_half_pos: requires V > 0");
    const double y = V * V * t / (4.0 * D);
    if (y == 0.0) return mixed_levy_pdf(t, 0.5, D);
    using specfun::BesselKind;
    const double sum = specfun::modified_bessel_scaled(BesselKind::I, -0.25, y).value +
                       specfun::modified_bessel_scaled(BesselKind::I, 0.25, y).value;
    return std::sqrt(kPi * V / (2.0 * D)) * sum / (2.0 * t);
}

double mixed_igd_half_neg(double t, double D, double V) {
    require_mixture(t, 0.5, D, V, "mixed_igd_half_neg");
    if (!(V < 0.0)) throw DomainError("mixed_igd_half_neg: requires V < 0");
    const double y = V * V * t / (4.0 * D);
    if (y == 0.0) return mixed_levy_pdf(t, 0.5, D);
    const double k = specfun::modified_bessel_scaled(specfun::BesselKind::K, 0.25, y).value;
    return std::sqrt(-V / (kPi * D)) * std::exp(-2.0 * y) * k / (2.0 * t);
}

double mixed_igd_pdf(double t, double psi, double D, double V) {
    require_mixture(t, psi, D, V, "mixed_igd_pdf");
    if (V == 0.0) return mixed_levy_pdf(t, psi, D);
    if (psi == 0.0) return mixed_igd_psi0(t, D, V);
    if (psi == 0.5) return V > 0.0 ? mixed_igd_half_pos(t, D, V) : mixed_igd_half_neg(t, D, V);
    return V > 0.0 ? mixed_igd_kummer(t, psi, D, V) : mixed_igd_tricomi(t, psi, D, V);
}

SlopeLaw asymptotic_slope(Regime regime, double psi, LoadingSign sign) {
    require_psi(psi, "asymptotic_slope");
    if (regime == Regime::Small || sign == LoadingSign::Zero) return {-(1.0 + 0.5 * psi), 0.0};
    if (sign == LoadingSign::Positive) return {-(1.0 + psi), 0.0};
    // exp(-x) U(a, 1/2, x) ~ x^-a exp(-x): t^-3/2 exp(-V^2 t / 2D) for every psi.
    return {-1.5, 0.5};
}

double local_log_slope(const std::function<double(double)>& f, double t, double log_step) {
    require_time(t, "local_log_slope");
    const double hi = f(t * std::exp(log_step));
    const double lo = f(t * std::exp(-log_step));
    if (!(hi > 0.0) || !(lo > 0.0)) throw DomainError("local_log_slope: function not positive near t");
    return (std::log(hi) - std::log(lo)) / (2.0 * log_step);
}

double TruncatedDensity::operator()(double t) const {
    if (t < t_min || t > t_max) return 0.0;
    return normalization * pdf(t);
}

TruncatedDensity truncated_normalize(std::function<double(double)> pdf, double t_min,
                                     std::optional<double> t_max) {
    require_time(t_min, "truncated_normalize");
    const double upper = t_max.value_or(kInf);
    if (!(upper > t_min)) throw DomainError("truncated_normalize: requires t_max > t_min");

    if (std::isinf(upper)) {
        // A tail no steeper than t^-1 far out is taken as non-integrable.
        for (double far : {t_min * 1e12, t_min * 1e16}) {
            const double v = pdf(far);
            if (v > 0.0 && local_log_slope(pdf, far, 0.05) >= -1.0 - 1e-4) throw UpperTruncationRequired();
        }
    }

    // In u = log t a power-law tail decays exponentially, which the
    // double-exponential rules handle well.
    const double u0 = std::log(t_min);
    std::vector<double> breaks{u0};
    const double u_hi = std::log(upper);
    for (double u = u0 + std::numbers::ln10; u < u_hi && u < u0 + 20.0 * std::numbers::ln10; u += std::numbers::ln10) {
        breaks.push_back(u);
    }
    breaks.push_back(u_hi);
    const auto r = quad::integrate_pieces(
        [&](double u) {
            const double t = std::exp(u);
            return std::isinf(t) ? 0.0 : pdf(t) * t;
        },
        breaks, 1e-10, 0.0);
    if (!(r.value > 0.0)) throw DomainError("truncated_normalize: density has no mass on the interval");

    TruncatedDensity out;
    out.t_min = t_min;
    out.t_max = upper;
    out.normalization = 1.0 / r.value;
    out.pdf = std::move(pdf);
    return out;
}

TruncatedDensity truncated_mixed_igd(double psi, double D, double V, double t_min, std::optional<double> t_max) {
    require_mixture(t_min, psi, D, V, "truncated_mixed_igd");
    if (psi == 0.0 && V >= 0.0 && !t_max) throw UpperTruncationRequired();
    return truncated_normalize([=](double t) { return mixed_igd_pdf(t, psi, D, V); }, t_min, t_max);
}

}  // namespace quakestat::stress
