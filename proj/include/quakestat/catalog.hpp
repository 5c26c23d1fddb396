#pragma once

// Earthquake catalogs and pair-interval statistics: ingestion, centroid
// distance, focal-zone overlap, double-couple rotation angle, pair
// extraction, survival curves, coefficient of variation, power-law
// intra-cluster intervals and synthetic Poisson-cluster catalogs.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quakestat/scaling.hpp"

namespace quakestat::catalog {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kDaysPerYear = 365.25;

/// Nodal plane angles in degrees (Aki-Richards convention).
struct Mechanism {
    double strike = 0.0;
    double dip = 0.0;
    double rake = 0.0;
};

struct CatalogEvent {
    std::string id;
    /// Seconds since 1970-01-01T00:00:00Z.
    double time = 0.0;
    double lat = 0.0;
    double lon = 0.0;
    double depth_km = 0.0;
    double m = 0.0;
    std::optional<Mechanism> mechanism;
};

/// Time order with ties broken by id.
bool event_before(const CatalogEvent& a, const CatalogEvent& b);

/// Accepts YYYY-MM-DD or YYYY/MM/DD, optionally followed by 'T' or ' ' and
/// HH:MM[:SS[.fff]] and an optional 'Z'.  Returns epoch seconds (UTC).
double parse_iso_time(std::string_view s);

/// YYYY-MM-DDTHH:MM:SS[.f...]Z; microsecond resolution, trailing zeros dropped.
std::string format_iso_time(double epoch_seconds);

struct RowError {
    std::size_t line = 0;
    std::string message;
};

struct CatalogParse {
    std::vector<CatalogEvent> events;
    std::vector<RowError> errors;
};

/// CSV `id,iso_time,lat,lon,depth_km,mw[,strike,dip,rake]`, sorted on
/// output.  Throws ParseError (with line number) on the first bad row or on
/// a bad header.
std::vector<CatalogEvent> parse_catalog(std::istream& in);

/// As parse_catalog, but collects row errors and keeps the valid rows.  A
/// bad header still throws.
CatalogParse parse_catalog_lenient(std::istream& in);

void write_catalog(std::ostream& out, std::span<const CatalogEvent> events);

/// Great-circle (haversine) distance on a sphere of radius 6371 km.
double centroid_distance(const CatalogEvent& a, const CatalogEvent& b);
double great_circle_km(double lat1, double lon1, double lat2, double lon2);

/// (L1 + L2) / (2 R) with L from predict_zone_length; +inf when R == 0.
double eta_overlap(double m1, double m2, double R_km, const scaling::RegressionCoeffs& length_law);

/// Unit fault normal and slip vector in north-east-down coordinates.
struct DcAxes {
    std::array<double, 3> normal{};
    std::array<double, 3> slip{};
};

DcAxes dc_axes(const Mechanism& m);

/// Minimal rotation angle (degrees, in [0, 120]) between two double-couple
/// sources over the four-element symmetry group of the double couple.
double dc_rotation_angle(const DcAxes& a, const DcAxes& b);
double dc_rotation_angle(const Mechanism& a, const Mechanism& b);

struct EventPair {
    std::string first_id;
    std::string second_id;
    double R_km = 0.0;
    double dt_days = 0.0;
    double eta = 0.0;
    std::optional<double> phi_deg;
};

struct PairWindow {
    /// Catalog duration, days.
    double T_days = 0.0;
    /// Minimum interval, days.
    double t0_days = 0.0;
    double m_min = 7.5;
    double R_max_km = 250.0;
    /// find_pairs throws DomainError beyond this many pairs.
    std::size_t max_pairs = 20'000'000;
};

/// Throws DomainError unless 0 < t0 < T.
void validate(const PairWindow& w);

/// Every pair (earlier, later) with both magnitudes >= m_min, R <= R_max and
/// dt >= t0 (dt > 0 strictly), annotated with eta and, when both events carry
/// mechanisms, the rotation angle.  The input order does not matter; pairs
/// come out in time order of the first then the second event.  R_max <= 0
/// gives no pairs.
std::vector<EventPair> find_pairs(std::span<const CatalogEvent> events, const PairWindow& window,
                                  const scaling::RegressionCoeffs& length_law = scaling::canonical_length_law());

struct SurvivalCurve {
    std::vector<double> t_days;
    std::vector<double> n_p;
};

/// Fraction of intervals >= t for each grid time.  An empty grid uses t0,
/// every distinct interval in [t0, T] and T.  Throws DomainError when there
/// are no intervals.
SurvivalCurve empirical_survival(std::span<const double> intervals_days, const PairWindow& window,
                                 std::span<const double> grid = {});
SurvivalCurve empirical_survival(std::span<const EventPair> pairs, const PairWindow& window,
                                 std::span<const double> grid = {});

enum class SurvivalModel { Poisson, PowerLaw };

/// Poisson: ((T - t) / (T - t0))^2.  Power law:
/// (t^-theta - T^-theta) / (t0^-theta - T^-theta).  Throws DomainError for t
/// outside [t0, T] or theta <= 0 with the power law.
double model_survival_at(SurvivalModel kind, double theta, double t_days, const PairWindow& window);

/// The model on `grid`, or on `points` log-spaced times from t0 to T.
SurvivalCurve model_survival(SurvivalModel kind, double theta, const PairWindow& window,
                             std::span<const double> grid = {}, std::size_t points = 200);

std::vector<double> log_grid(double lo, double hi, std::size_t points);

struct Envelope {
    double lo = 0.0;
    double hi = 0.0;
};

/// Central binomial interval of the observed fraction k/n for success
/// probability p, at the given two-sided level.
Envelope binomial_envelope(double p, std::size_t n, double level = 0.95);

/// Sample standard deviation (n - 1) over mean.  Throws DomainError for
/// fewer than 2 intervals or a non-positive mean.
double coefficient_of_variation(std::span<const double> intervals);

/// Consecutive inter-event times in days of the time-sorted catalog.
std::vector<double> inter_event_intervals(std::span<const CatalogEvent> events);

std::vector<double> pair_intervals(std::span<const EventPair> pairs);

struct OmoriClusterParams {
    double theta = 0.28;
    /// Coda-duration floor, days.
    double t_M_days = 1.0;
    double p() const { return 1.0 + theta; }
};

/// Throws DomainError unless 0.1 <= theta <= 1 and t_M > 0.
void validate(const OmoriClusterParams& p);

/// dt = t_M u^(-1/theta): density theta t_M^theta dt^(-1-theta), dt >= t_M.
std::vector<double> sample_omori_intervals(const OmoriClusterParams& p, std::size_t n, std::uint64_t seed);

/// Maximum-likelihood theta for intervals with density proportional to
/// t^(-1-theta) on [t0, T], the law whose survivor is the power-law model
/// survival.  Intervals outside [t0, T] are ignored.
double fit_powerlaw_theta(std::span<const double> intervals_days, const PairWindow& window);

struct SyntheticConfig {
    double background_rate_per_yr = 1.0;
    OmoriClusterParams cluster;
    double branching_mu = 0.0;
    double duration_days = 0.0;
    std::uint64_t seed = 1;
    double start_time = 0.0;
    double magnitude = 7.5;
    double lat = 0.0;
    double lon = 0.0;
    double depth_km = 10.0;
};

struct SyntheticCatalog {
    /// Events inside [start, start + duration), time-sorted.
    std::vector<CatalogEvent> events;
    std::size_t immigrants = 0;
    /// All cluster members generated, including those past the window.
    std::size_t generated = 0;
};

/// Poisson immigrants; every event spawns Poisson(mu) children delayed by
/// the power-law interval law.  All events share one site.  Throws
/// DomainError for mu >= 1 (supercritical) or mu < 0.
SyntheticCatalog generate_synthetic_catalog(const SyntheticConfig& cfg);

/// Rectangular cells `lat_min,lat_max,lon_min,lon_max,rate[,zone]` of an
/// external earthquake-rate table.
struct RateCell {
    double lat_min = 0.0;
    double lat_max = 0.0;
    double lon_min = 0.0;
    double lon_max = 0.0;
    double rate = 0.0;
    std::string zone;
};

std::vector<RateCell> read_rate_table(std::istream& in);

/// First cell containing the point, if any.
const RateCell* find_cell(std::span<const RateCell> cells, double lat, double lon);

/// Events whose cell has lo <= rate < hi (and, when `zone` is non-empty, that
/// zone tag).  Events outside every cell are dropped.
std::vector<CatalogEvent> select_by_rate(std::span<const CatalogEvent> events, std::span<const RateCell> cells,
                                         double lo, double hi, std::string_view zone = {});

/// `id1,id2,R_km,phi_deg,dt_days,eta`; an absent angle is an empty field.
void write_pairs(std::ostream& out, std::span<const EventPair> pairs);

/// `t_days,n_p`.
void write_survival(std::ostream& out, const SurvivalCurve& curve);

}  // namespace quakestat::catalog
