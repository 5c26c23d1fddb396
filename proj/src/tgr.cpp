#include "quakestat/tgr.hpp"

#include <cmath>
#include <random>

#include "quakestat/csv.hpp"
#include "quakestat/errors.hpp"

namespace quakestat::tgr {
namespace {

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

double require_alpha0(const TgrParams& p, const char* what) {
    if (!p.alpha0) throw DomainError(std::string(what) + ": alpha0 is not set");
    return *p.alpha0;
}

// M_0^beta M_c^(1-beta) Gamma(2-beta) / (1-beta), in logs to keep M^beta finite.
double flux_per_unit_rate(const TgrParams& p) {
    const double log_f = p.beta * std::log(p.M_0) + (1.0 - p.beta) * std::log(p.M_c) + std::log(std::tgamma(2.0 - p.beta)) -
                         std::log1p(-p.beta) + p.M_0 / p.M_c;
    return std::exp(log_f);
}

}  // namespace

double moment_from_magnitude(double m) { return std::pow(10.0, 1.5 * m + 9.0); }

double magnitude_from_moment(double moment) {
    if (!(moment > 0.0)) throw DomainError("magnitude_from_moment: requires moment > 0");
    return (std::log10(moment) - 9.0) / 1.5;
}

void validate(const TgrParams& p) {
    if (!(p.beta > 0.0 && p.beta < 1.0)) throw DomainError("TgrParams: requires 0 < beta < 1");
    if (!positive_finite(p.M_t)) throw DomainError("TgrParams: requires finite M_t > 0");
    if (!(p.M_c > p.M_t)) throw DomainError("TgrParams: requires M_c > M_t");
    if (!(p.M_0 >= p.M_t) || !std::isfinite(p.M_0)) throw DomainError("TgrParams: requires M_t <= M_0");
    if (p.alpha0 && !(*p.alpha0 >= 0.0 && std::isfinite(*p.alpha0))) {
        throw DomainError("TgrParams: requires finite alpha0 >= 0");
    }
}

double survivor(double M, const TgrParams& p) {
    validate(p);
    if (!(M >= p.M_t)) throw DomainError("tgr survivor: requires M >= M_t");
    if (M == p.M_t) return 1.0;
    if (std::isinf(M)) return 0.0;
    return std::pow(p.M_t / M, p.beta) * std::exp((p.M_t - M) / p.M_c);
}

std::vector<double> sample(const TgrParams& p, std::size_t n, std::uint64_t seed) {
    validate(p);
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> unif;
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u1 = 1.0 - unif(eng);
        const double u2 = 1.0 - unif(eng);
        const double pareto = p.M_t * std::pow(u1, -1.0 / p.beta);
        const double taper = p.M_t - p.M_c * std::log(u2);
        out.push_back(std::min(pareto, taper));
    }
    return out;
}

double moment_flux(const TgrParams& p) {
    validate(p);
    return require_alpha0(p, "moment_flux") * flux_per_unit_rate(p);
}

double rate(double M, const TgrParams& p) {
    validate(p);
    const double a0 = require_alpha0(p, "tgr rate");
    return a0 * survivor(M, p) / survivor(p.M_0, p);
}

void validate(const ZoneSpec& z) {
    if (!positive_finite(z.area_km2)) throw DomainError("ZoneSpec: requires area > 0");
    if (!positive_finite(z.strain_rate_per_yr)) throw DomainError("ZoneSpec: requires strain rate > 0");
    if (!positive_finite(z.width_km)) throw DomainError("ZoneSpec: requires width > 0");
    if (!(z.coupling_chi > 0.0 && z.coupling_chi <= 1.0)) throw DomainError("ZoneSpec: requires 0 < chi <= 1");
    if (!positive_finite(z.shear_modulus_Pa)) throw DomainError("ZoneSpec: requires shear modulus > 0");
}

double effective_width_km(const ZoneSpec& z) {
    validate(z);
    return z.width_km * z.coupling_chi;
}

TectonicMomentRate tectonic_moment_rate(const ZoneSpec& z) {
    validate(z);
    return {z.shear_modulus_Pa * (z.width_km * 1e3) * z.strain_rate_per_yr * (z.area_km2 * 1e6)};
}

SeismicMomentRate seismic_moment_rate(const ZoneSpec& z) {
    return apply_coupling(tectonic_moment_rate(z), z.coupling_chi);
}

double background_rate(SeismicMomentRate mdot_s, const TgrParams& p) {
    validate(p);
    if (!(mdot_s.Nm_per_yr >= 0.0) || !std::isfinite(mdot_s.Nm_per_yr)) {
        throw DomainError("background_rate: requires finite moment rate >= 0");
    }
    return mdot_s.Nm_per_yr / flux_per_unit_rate(p);
}

TgrParams calibrate(const TgrParams& p, const ZoneSpec& z) {
    TgrParams out = p;
    out.alpha0 = background_rate(seismic_moment_rate(z), p);
    return out;
}

std::vector<NamedZone> read_zones(std::istream& in) {
    const auto table =
        csv::read(in, {"zone_id", "area_km2", "strain_rate_per_yr", "width_km", "chi", "mu_Pa"});
    const auto c_id = table.column("zone_id");
    const auto c_area = table.column("area_km2");
    const auto c_rate = table.column("strain_rate_per_yr");
    const auto c_width = table.column("width_km");
    const auto c_chi = table.column("chi");
    const auto c_mu = table.column("mu_Pa");
    std::vector<NamedZone> out;
    for (const auto& row : table.rows) {
        NamedZone z;
        z.id = row.fields[c_id];
        if (z.id.empty()) throw ParseError("empty zone_id", row.line);
        z.zone.area_km2 = csv::to_double(row, c_area, "area_km2");
        z.zone.strain_rate_per_yr = csv::to_double(row, c_rate, "strain_rate_per_yr");
        z.zone.width_km = csv::to_double(row, c_width, "width_km");
        z.zone.coupling_chi = csv::to_double(row, c_chi, "chi");
        if (!row.fields[c_mu].empty()) z.zone.shear_modulus_Pa = csv::to_double(row, c_mu, "mu_Pa");
        try {
            validate(z.zone);
        } catch (const DomainError& e) {
            throw ParseError(std::string("zone '") + z.id + "': " + e.what(), row.line);
        }
        out.push_back(std::move(z));
    }
    return out;
}

}  // namespace quakestat::tgr
