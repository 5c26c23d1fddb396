#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "quakestat/errors.hpp"
#include "quakestat/quadrature.hpp"
#include "quakestat/tgr.hpp"

using namespace quakestat;
using namespace quakestat::tgr;

namespace {

const double kM5 = 3.1622776601683795e16;  // 10^16.5

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

TgrParams new_madrid() {
    TgrParams p;
    p.beta = 2.0 / 3.0;
    p.M_t = kM5;
    p.M_0 = kM5;
    p.M_c = 1e21;
    return p;
}

ZoneSpec new_madrid_zone() {
    ZoneSpec z;
    z.area_km2 = 11310.0;
    z.strain_rate_per_yr = 1e-9;
    z.width_km = 20.0;
    z.coupling_chi = 0.5;
    z.shear_modulus_Pa = 3e10;
    return z;
}

// First moment of the rate density alpha0 M_0^beta e^(M_0/M_c) (beta/M + 1/M_c) M^-beta e^(-M/M_c),
// integrated in log M.
double first_moment_quadrature(const TgrParams& p, double lo, double hi) {
    const double scale = *p.alpha0 * std::exp(p.M_0 / p.M_c);
    auto integrand = [&](double u) {
        // M * density * dM/du = (beta + M/M_c) M_0^beta M^(1-beta) e^(-M/M_c)
        const double M = std::exp(u);
        return scale * (p.beta + M / p.M_c) * std::exp(p.beta * std::log(p.M_0) + (1 - p.beta) * u - M / p.M_c);
    };
    const double u_lo = lo > 0.0 ? std::log(lo) : std::log(p.M_c) - 500.0;
    const double u_hi = std::isinf(hi) ? std::log(p.M_c) + 7.0 : std::log(hi);
    std::vector<double> pts{u_lo};
    for (double u = std::log(p.M_c) - 60.0; u < u_hi; u += 3.0) {
        if (u > u_lo) pts.push_back(u);
    }
    pts.push_back(u_hi);
    return quad::integrate_pieces(integrand, pts, 1e-12).value;
}

template <typename R>
constexpr bool accepts_rate = requires(R r, TgrParams q) { background_rate(r, q); };

}  // namespace

// ------------------------------------------------------------- magnitude

TEST(MomentMagnitude, Anchors) {
    EXPECT_DOUBLE_EQ(moment_from_magnitude(8.0), 1e21);
    EXPECT_LE(rel_err(moment_from_magnitude(5.0), 3.1622776601683795e16), 1e-15);
    EXPECT_NEAR(magnitude_from_moment(1e21), 8.0, 1e-15);
}

TEST(MomentMagnitude, RoundTrip) {
    std::mt19937_64 eng(3);
    std::uniform_real_distribution<double> m(-2.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = m(eng);
        EXPECT_NEAR(magnitude_from_moment(moment_from_magnitude(x)), x, 1e-12);
        const double M = moment_from_magnitude(x);
        EXPECT_LE(rel_err(moment_from_magnitude(magnitude_from_moment(M)), M), 1e-12);
    }
    EXPECT_THROW(magnitude_from_moment(0.0), DomainError);
}

// ------------------------------------------------------------- survivor

TEST(TgrSurvivor, ThresholdAndLimits) {
    const auto p = new_madrid();
    EXPECT_EQ(survivor(p.M_t, p), 1.0);
    EXPECT_EQ(survivor(INFINITY, p), 0.0);
    EXPECT_LT(survivor(1e25, p), 1e-300);
    EXPECT_THROW(survivor(p.M_t * 0.99, p), DomainError);
}

TEST(TgrSurvivor, NewMadridCornerValue) {
    const auto p = new_madrid();
    const double want = 1e-3 * std::exp(kM5 / 1e21 - 1.0);
    EXPECT_LE(rel_err(survivor(1e21, p), want), 1e-13);
    EXPECT_NEAR(survivor(1e21, p), 3.68e-4, 0.005e-4);
}

TEST(TgrSurvivor, TaperRemovedIsPareto) {
    auto p = new_madrid();
    p.M_c = 1e300;
    for (double M : {1e17, 1e19, 1e22}) EXPECT_LE(rel_err(survivor(M, p), std::pow(kM5 / M, p.beta)), 1e-12);
}

TEST(TgrSurvivor, MonotoneDecreasing) {
    const auto p = new_madrid();
    double prev = 1.0;
    for (int k = 0; k < 650; ++k) {
        const double s = survivor(kM5 * std::pow(10.0, 0.01 * k), p);
        EXPECT_LE(s, prev);
        prev = s;
    }
}

TEST(TgrParams, Validation) {
    auto p = new_madrid();
    p.beta = 1.0;
    EXPECT_THROW(validate(p), DomainError);
    p = new_madrid();
    p.M_c = p.M_t;
    EXPECT_THROW(validate(p), DomainError);
    p = new_madrid();
    p.M_0 = p.M_t / 2;
    EXPECT_THROW(validate(p), DomainError);
    p = new_madrid();
    p.alpha0 = -1.0;
    EXPECT_THROW(validate(p), DomainError);
}

// --------------------------------------------------------------- sampling

TEST(TgrSample, MatchesSurvivor) {
    const auto p = new_madrid();
    const std::size_t n = 100000;
    auto s = sample(p, n, 11);
    ASSERT_EQ(s.size(), n);
    EXPECT_GE(*std::min_element(s.begin(), s.end()), p.M_t);
    std::sort(s.begin(), s.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double F = 1.0 - survivor(s[i], p);
        ks = std::max({ks, std::abs(F - double(i) / n), std::abs(F - double(i + 1) / n)});
    }
    EXPECT_LE(ks, 0.01);
}

TEST(TgrSample, IndexFromSmallMomentTail) {
    const auto p = new_madrid();
    const auto s = sample(p, 100000, 12);
    // log survivor vs log M over three decades well below the corner
    std::vector<double> x;
    std::vector<double> y;
    for (double lm = 16.6; lm <= 19.5; lm += 0.25) {
        const double M = std::pow(10.0, lm);
        const double frac = double(std::count_if(s.begin(), s.end(), [&](double v) { return v >= M; })) / s.size();
        x.push_back(std::log(M));
        y.push_back(std::log(frac) + M / p.M_c);
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    EXPECT_NEAR(-sxy / sxx, p.beta, 0.02);
}

TEST(TgrSample, FractionAboveCorner) {
    auto p = new_madrid();
    p.M_c = 1e18;
    const std::size_t n = 100000;
    const auto s = sample(p, n, 13);
    const double frac = double(std::count_if(s.begin(), s.end(), [&](double v) { return v > p.M_c; })) / n;
    const double want = survivor(p.M_c, p);
    EXPECT_NEAR(frac, want, 3 * std::sqrt(want * (1 - want) / n));
}

TEST(TgrSample, SeedDeterminism) {
    const auto p = new_madrid();
    EXPECT_EQ(sample(p, 100, 5), sample(p, 100, 5));
    EXPECT_NE(sample(p, 100, 5), sample(p, 100, 6));
}

// ------------------------------------------------------------ moment flux

TEST(MomentFlux, NewMadridValue) {
    auto p = new_madrid();
    p.alpha0 = 1.27e-3;
    EXPECT_LE(rel_err(moment_flux(p), 3.402359529432995e15), 1e-12);
    EXPECT_NEAR(moment_flux(p), 3.4e15, 0.05e15);
}

TEST(MomentFlux, RequiresRate) { EXPECT_THROW(moment_flux(new_madrid()), DomainError); }

TEST(MomentFlux, BackgroundRateRoundTrip) {
    std::mt19937_64 eng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        TgrParams p;
        p.beta = 0.05 + 0.9 * u(eng);
        p.M_t = std::pow(10.0, 14.0 + 4.0 * u(eng));
        p.M_0 = p.M_t * std::pow(10.0, 2.0 * u(eng));
        p.M_c = p.M_0 * std::pow(10.0, 0.5 + 5.0 * u(eng));
        p.alpha0 = std::pow(10.0, -5.0 + 5.0 * u(eng));
        const double back = background_rate({moment_flux(p)}, p);
        EXPECT_LE(rel_err(back, *p.alpha0), 1e-12) << i;
    }
}

TEST(MomentFlux, FirstMomentQuadrature) {
    for (double beta : {0.3, 2.0 / 3.0, 0.9}) {
        auto p = new_madrid();
        p.beta = beta;
        p.alpha0 = 1.27e-3;
        EXPECT_LE(rel_err(first_moment_quadrature(p, 0.0, INFINITY), moment_flux(p)), 1e-6) << beta;
    }
}

TEST(MomentFlux, ExtrapolationBelowReferenceMoment) {
    // the closed form includes moments below M_0: about 2 alpha0 M_0 of extra flux at beta = 2/3
    auto p = new_madrid();
    p.alpha0 = 1.27e-3;
    const double above = first_moment_quadrature(p, p.M_0, INFINITY);
    const double below = first_moment_quadrature(p, 0.0, p.M_0);
    EXPECT_LE(rel_err(above + below, moment_flux(p)), 1e-6);
    EXPECT_NEAR(below / (*p.alpha0 * p.M_0), p.beta / (1 - p.beta), 1e-3);
    EXPECT_GT(below / moment_flux(p), 0.01);
}

// ---------------------------------------------------------- zone budget

TEST(ZoneBudget, NewMadridRates) {
    const auto z = new_madrid_zone();
    EXPECT_LE(rel_err(tectonic_moment_rate(z).Nm_per_yr, 6.786e15), 1e-12);
    EXPECT_LE(rel_err(seismic_moment_rate(z).Nm_per_yr, 3.393e15), 1e-12);
    EXPECT_NEAR(tectonic_moment_rate(z).Nm_per_yr, 6.79e15, 0.01e15);
    EXPECT_NEAR(seismic_moment_rate(z).Nm_per_yr, 3.4e15, 0.05e15);
    EXPECT_DOUBLE_EQ(effective_width_km(z), 10.0);
}

TEST(ZoneBudget, FullCouplingAndLinearity) {
    auto z = new_madrid_zone();
    z.coupling_chi = 1.0;
    EXPECT_EQ(seismic_moment_rate(z).Nm_per_yr, tectonic_moment_rate(z).Nm_per_yr);
    const double base = tectonic_moment_rate(z).Nm_per_yr;
    z.area_km2 *= 2;
    EXPECT_DOUBLE_EQ(tectonic_moment_rate(z).Nm_per_yr, 2 * base);
}

TEST(ZoneBudget, Validation) {
    auto z = new_madrid_zone();
    z.coupling_chi = 1.5;
    EXPECT_THROW(validate(z), DomainError);
    z = new_madrid_zone();
    z.width_km = 0.0;
    EXPECT_THROW(tectonic_moment_rate(z), DomainError);
}

TEST(BackgroundRate, NewMadridAlpha0) {
    const auto p = new_madrid();
    const double a0 = background_rate({3.4e15}, p);
    EXPECT_LE(rel_err(a0, 1.269119257575814e-3), 1e-12);
    EXPECT_NEAR(a0, 1.27e-3, 0.005e-3);
    const auto calibrated = calibrate(p, new_madrid_zone());
    EXPECT_LE(rel_err(*calibrated.alpha0, 1.266506364986688e-3), 1e-12);
}

TEST(BackgroundRate, RecurrenceOfMagnitudeEight) {
    auto p = new_madrid();
    p.alpha0 = background_rate({3.4e15}, p);
    const double recurrence = 1.0 / rate(moment_from_magnitude(8.0), p);
    EXPECT_LE(rel_err(recurrence, 2.141797040721992e6), 1e-10);
    EXPECT_GT(recurrence, 2e6);
}

TEST(BackgroundRate, ZeroFluxAndCouplingTypes) {
    EXPECT_EQ(background_rate({0.0}, new_madrid()), 0.0);
    EXPECT_THROW(background_rate({-1.0}, new_madrid()), DomainError);
    const auto z = new_madrid_zone();
    EXPECT_EQ(background_rate(apply_coupling(tectonic_moment_rate(z), z.coupling_chi), new_madrid()),
              background_rate(seismic_moment_rate(z), new_madrid()));
    static_assert(!accepts_rate<TectonicMomentRate>);
    static_assert(accepts_rate<SeismicMomentRate>);
}

TEST(Rate, ContinuousAndNonIncreasing) {
    auto p = new_madrid();
    p.M_t = kM5 / 100.0;
    p.alpha0 = 1e-3;
    EXPECT_DOUBLE_EQ(rate(p.M_0, p), 1e-3);
    EXPECT_NEAR(rate(p.M_0 * (1 + 1e-12), p), 1e-3, 1e-14);
    EXPECT_NEAR(rate(p.M_0 * (1 - 1e-12), p), 1e-3, 1e-14);
    double prev = INFINITY;
    for (double lm = std::log10(p.M_t); lm < 22.5; lm += 0.05) {
        const double r = rate(std::pow(10.0, lm), p);
        EXPECT_LE(r, prev);
        prev = r;
    }
    EXPECT_THROW(rate(1e20, new_madrid()), DomainError);
}

// ------------------------------------------------------------- zone CSV

TEST(ZoneCsv, ParsesAndDefaultsShearModulus) {
    std::istringstream in(
        "zone_id,area_km2,strain_rate_per_yr,width_km,chi,mu_Pa\n"
        "# comment\n"
        "nmsz,11310,1e-9,20,0.5,\n"
        "other,500,2e-8,15,1,3.3e10\n");
    const auto zones = read_zones(in);
    ASSERT_EQ(zones.size(), 2u);
    EXPECT_EQ(zones[0].id, "nmsz");
    EXPECT_EQ(zones[0].zone.shear_modulus_Pa, 3e10);
    EXPECT_EQ(zones[1].zone.shear_modulus_Pa, 3.3e10);
    EXPECT_LE(rel_err(seismic_moment_rate(zones[0].zone).Nm_per_yr, 3.393e15), 1e-12);
}

TEST(ZoneCsv, ErrorsCarryLineNumbers) {
    const std::string header = "zone_id,area_km2,strain_rate_per_yr,width_km,chi,mu_Pa\n";
    auto line_of = [&](const std::string& body) -> std::size_t {
        std::istringstream in(header + body);
        try {
            read_zones(in);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of("a,1,1e-9,20,0.5,\nb,1,x,20,0.5,\n"), 3u);
    EXPECT_EQ(line_of("a,1,1e-9,20,0.5\n"), 2u);
    EXPECT_EQ(line_of("a,1,1e-9,20,1.5,\n"), 2u);
    std::istringstream missing("zone_id,area_km2\n");
    EXPECT_THROW(read_zones(missing), ParseError);
}
