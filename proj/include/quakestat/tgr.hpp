#pragma once

// Tapered Gutenberg-Richter moment distribution and the tectonic moment
// budget that fixes its absolute rate.  Moments in Nm, rates per year,
// zone geometry in km.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace quakestat::tgr {

/// M = 10^(1.5 m + 9) Nm.
double moment_from_magnitude(double m);
double magnitude_from_moment(double moment);

struct TgrParams {
    double beta = 2.0 / 3.0;
    /// Threshold moment: lower end of the support.
    double M_t = 3.1622776601683795e16;
    /// Corner moment.
    double M_c = 1e21;
    /// Rate of events with moment >= M_0, per year.
    std::optional<double> alpha0;
    /// Reference moment for alpha0.
    double M_0 = 3.1622776601683795e16;
};

/// Throws DomainError unless 0 < beta < 1, 0 < M_t <= M_0, M_c > M_t, and
/// alpha0 (when set) is finite and non-negative.
void validate(const TgrParams& p);

/// (M_t / M)^beta exp((M_t - M) / M_c) for M >= M_t.
double survivor(double M, const TgrParams& p);

/// Exact sampler: the survivor is the product of a Pareto survivor and a
/// shifted exponential one, so M = min(M_t u1^(-1/beta), M_t - M_c ln u2).
std::vector<double> sample(const TgrParams& p, std::size_t n, std::uint64_t seed);

/// Total seismic moment rate implied by alpha0, from the first moment of the
/// distribution extrapolated over (0, inf):
/// alpha0 M_0^beta / (1 - beta) M_c^(1 - beta) Gamma(2 - beta) exp(M_0 / M_c).
double moment_flux(const TgrParams& p);

/// Absolute rate of events with moment >= M, per year:
/// alpha0 survivor(M) / survivor(M_0).  Requires alpha0.
double rate(double M, const TgrParams& p);

struct ZoneSpec {
    double area_km2 = 0.0;
    double strain_rate_per_yr = 0.0;
    double width_km = 0.0;
    double coupling_chi = 1.0;
    double shear_modulus_Pa = 3e10;
};

/// Throws DomainError unless every field is positive and finite and chi <= 1.
void validate(const ZoneSpec& z);

/// W_e = W chi, km.
double effective_width_km(const ZoneSpec& z);

/// Moment rate the plates deliver, before the seismic coupling is applied.
struct TectonicMomentRate {
    double Nm_per_yr = 0.0;
};

/// Moment rate released in earthquakes: coupling already applied.
struct SeismicMomentRate {
    double Nm_per_yr = 0.0;
};

/// mu W strain_rate A (uniform strain over the zone).
TectonicMomentRate tectonic_moment_rate(const ZoneSpec& z);

/// chi times the tectonic rate; equal to mu W_e strain_rate A.
SeismicMomentRate seismic_moment_rate(const ZoneSpec& z);

inline SeismicMomentRate apply_coupling(TectonicMomentRate r, double chi) {
    return {r.Nm_per_yr * chi};
}

/// alpha0 = Mdot_s (1 - beta) exp(-M_0 / M_c) / (M_0^beta M_c^(1-beta) Gamma(2 - beta)).
/// Taking only the seismic rate type keeps the coupling from being applied
/// twice; a tectonic rate must go through apply_coupling first.
double background_rate(SeismicMomentRate mdot_s, const TgrParams& p);

/// Returns p with alpha0 set from the zone's seismic moment rate.
TgrParams calibrate(const TgrParams& p, const ZoneSpec& z);

struct NamedZone {
    std::string id;
    ZoneSpec zone;
};

/// CSV with columns zone_id,area_km2,strain_rate_per_yr,width_km,chi,mu_Pa.
/// An empty mu_Pa field takes the 30 GPa default.  Throws ParseError with
/// the line number on malformed rows and on rows that fail validation.
std::vector<NamedZone> read_zones(std::istream& in);

}  // namespace quakestat::tgr
