#pragma once

// End-to-end zone hazard chain: focal-zone geometry, tectonic moment budget,
// background rate, recurrence times, and the duration and late-time rate of
// an Omori aftershock sequence measured against that background.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "quakestat/tgr.hpp"

namespace quakestat::hazard {

struct SequenceSpec {
    double mainshock_m = 8.0;
    /// Aftershocks per day with m >= m_ref on the first day.
    double ref_rate_day1 = 4.55;
    double m_ref = 5.0;
    double b_value = 1.0;
    double omori_exponent = 1.0;
};

/// Throws DomainError unless the day-1 rate, b-value and exponent are
/// positive and finite.
void validate(const SequenceSpec& s);

/// ref_rate_day1 / t^p, per day, for m >= m_ref.
double omori_rate_per_day(const SequenceSpec& s, double t_days);

struct Recurrence {
    double magnitude = 0.0;
    double rate_per_yr = 0.0;
    /// 1 / rate; +inf for a zero rate.
    double years = 0.0;
};

struct ZoneBackground {
    tgr::TectonicMomentRate tectonic;
    tgr::SeismicMomentRate seismic;
    /// TGR parameters with alpha0 set.
    tgr::TgrParams tgr;
    double alpha0_per_yr = 0.0;
    std::vector<Recurrence> recurrences;
};

/// tectonic rate -> coupling -> background rate -> rate(M) for each listed
/// magnitude.  chi = 0 is accepted as the uncoupled limit: zero seismic rate
/// and infinite recurrence times.
ZoneBackground zone_background(const tgr::ZoneSpec& zone, const tgr::TgrParams& params,
                               std::span<const double> magnitudes);

struct Duration {
    double days = 0.0;
    /// Background at or above the day-1 rate: the sequence never stands out.
    bool degenerate = false;
};

/// Time at which the Omori rate falls to the background (same magnitude
/// threshold, per day): (ref_rate_day1 / background)^(1 / p).  A zero
/// background gives +inf.
Duration aftershock_duration(const SequenceSpec& s, double background_rate_per_day);

/// Omori rate at t >= 1 day, rescaled to m >= m_query by 10^(b (m_ref -
/// m_query)), per year.  Throws DomainError for t < 1 day.
double aftershock_rate_at(const SequenceSpec& s, double t_days, double m_query);

struct Scenario {
    std::string name = "scenario";
    /// Full major axis of the focal zone; predicted from the mainshock
    /// magnitude and the Table 1 row when absent (<= 0).
    double zone_length_km = 0.0;
    int length_law_row = 1;
    double aspect = 0.25;
    /// Overrides the ellipse area when > 0.
    double area_km2 = 0.0;
    tgr::ZoneSpec zone{0.0, 1e-9, 20.0, 0.5, 3e10};
    tgr::TgrParams tgr;
    SequenceSpec sequence;
    double query_years = 175.0;
    double query_m = 4.0;
    std::vector<double> recurrence_magnitudes{5.0, 6.0, 7.0, 8.0};
};

/// `key = value` lines; '#' starts a comment.  Keys: name, zone_length_km,
/// length_law_row, aspect, area_km2, strain_rate_per_yr, width_km, chi,
/// shear_modulus_Pa, beta, threshold_m, reference_m, corner_moment_Nm,
/// mainshock_m, ref_rate_day1, m_ref, b_value, omori_exponent, query_years,
/// query_m, recurrence_magnitudes (comma separated).  Unknown keys,
/// duplicates and malformed values throw ParseError with the line number;
/// out-of-band values throw DomainError when the scenario is evaluated.
Scenario parse_scenario(std::istream& in);

struct Report {
    Scenario scenario;
    double predicted_length_km = 0.0;
    double length_km = 0.0;
    double area_km2 = 0.0;
    ZoneBackground background;
    double background_per_day = 0.0;
    Duration duration;
    double query_rate_per_yr = 0.0;
};

Report evaluate(const Scenario& s);

/// Every intermediate quantity; non-finite values are written as the
/// strings "inf", "-inf" or "nan".
nlohmann::ordered_json to_json(const Report& r);

struct GoldenCheck {
    std::string name;
    double value = 0.0;
    double target = 0.0;
    double rel_tol = 0.0;
    bool pass = false;
};

/// Compares the report with the published New Madrid figures: alpha0 =
/// 1.27e-3 per year, m >= 8 recurrence 2.1 Myr, duration 3600 years, m >= 4
/// rate 0.26 per year at 175 years, focal area 11300 km^2.
std::vector<GoldenCheck> check_new_madrid(const Report& r, double rel_tol = 0.10);

}  // namespace quakestat::hazard
