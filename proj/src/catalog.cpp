#include "quakestat/catalog.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <boost/math/tools/roots.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <set>

#include "quakestat/csv.hpp"
#include "quakestat/errors.hpp"
#include "quakestat/format.hpp"

namespace quakestat::catalog {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

int parse_int(std::string_view s, std::string_view whole) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw DomainError("bad time '" + std::string(whole) + "'");
    }
    return v;
}

Eigen::Matrix3d dc_frame(const DcAxes& a) {
    const Eigen::Vector3d n(a.normal[0], a.normal[1], a.normal[2]);
    const Eigen::Vector3d d(a.slip[0], a.slip[1], a.slip[2]);
    if (std::abs(n.norm() - 1.0) > 1e-6 || std::abs(d.norm() - 1.0) > 1e-6 || std::abs(n.dot(d)) > 1e-6) {
        throw DomainError("dc_rotation_angle: normal and slip must be orthogonal unit vectors");
    }
    const Eigen::Vector3d t = (n + d) / std::numbers::sqrt2;
    const Eigen::Vector3d p = (n - d) / std::numbers::sqrt2;
    Eigen::Matrix3d f;
    f.col(0) = t;
    f.col(1) = p;
    f.col(2) = t.cross(p);
    return f;
}

double rotation_angle_deg(const Eigen::Matrix3d& r) {
    const Eigen::Quaterniond q(r);
    return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w())) / kDeg;
}

void check_event(const CatalogEvent& e) {
    if (e.id.empty()) throw DomainError("empty id");
    if (!std::isfinite(e.time)) throw DomainError("non-finite time");
    if (!(e.lat >= -90.0 && e.lat <= 90.0)) throw DomainError("lat outside [-90, 90]");
    if (!(e.lon >= -180.0 && e.lon <= 180.0)) throw DomainError("lon outside [-180, 180]");
    if (!(e.depth_km >= 0.0) || !std::isfinite(e.depth_km)) throw DomainError("depth must be >= 0");
    if (!std::isfinite(e.m)) throw DomainError("non-finite magnitude");
    if (e.mechanism) {
        const auto& mc = *e.mechanism;
        if (!(mc.strike >= 0.0 && mc.strike <= 360.0)) throw DomainError("strike outside [0, 360]");
        if (!(mc.dip >= 0.0 && mc.dip <= 90.0)) throw DomainError("dip outside [0, 90]");
        if (!(mc.rake >= -180.0 && mc.rake <= 180.0)) throw DomainError("rake outside [-180, 180]");
    }
}

template <typename OnError>
std::vector<CatalogEvent> parse_rows(std::istream& in, OnError on_error) {
    const auto table = csv::read(in, {"id", "iso_time", "lat", "lon", "depth_km", "mw"});
    const auto& h = table.header;
    const auto has = [&](const char* name) { return std::find(h.begin(), h.end(), name) != h.end(); };
    const int mech_cols = int(has("strike")) + int(has("dip")) + int(has("rake"));
    if (mech_cols != 0 && mech_cols != 3) throw ParseError("strike, dip and rake columns go together", 1);

    const auto c_id = table.column("id");
    const auto c_time = table.column("iso_time");
    const auto c_lat = table.column("lat");
    const auto c_lon = table.column("lon");
    const auto c_depth = table.column("depth_km");
    const auto c_m = table.column("mw");

    std::vector<CatalogEvent> out;
    std::set<std::string> ids;
    for (const auto& row : table.rows) {
        try {
            CatalogEvent e;
            e.id = row.fields[c_id];
            try {
                e.time = parse_iso_time(row.fields[c_time]);
            } catch (const DomainError& err) {
                throw ParseError(err.what(), row.line);
            }
            e.lat = csv::to_double(row, c_lat, "lat");
            e.lon = csv::to_double(row, c_lon, "lon");
            e.depth_km = csv::to_double(row, c_depth, "depth_km");
            e.m = csv::to_double(row, c_m, "mw");
            if (mech_cols == 3) {
                const auto cs = table.column("strike");
                const auto cd = table.column("dip");
                const auto cr = table.column("rake");
                const int filled = int(!row.fields[cs].empty()) + int(!row.fields[cd].empty()) +
                                   int(!row.fields[cr].empty());
                if (filled == 3) {
                    e.mechanism = Mechanism{csv::to_double(row, cs, "strike"), csv::to_double(row, cd, "dip"),
                                            csv::to_double(row, cr, "rake")};
                } else if (filled != 0) {
                    throw ParseError("mechanism needs all of strike, dip, rake", row.line);
                }
            }
            try {
                check_event(e);
            } catch (const DomainError& err) {
                throw ParseError(err.what(), row.line);
            }
            if (!ids.insert(e.id).second) throw ParseError("duplicate id '" + e.id + "'", row.line);
            out.push_back(std::move(e));
        } catch (const ParseError& err) {
            on_error(err);
        }
    }
    std::sort(out.begin(), out.end(), event_before);
    return out;
}

}  // namespace

bool event_before(const CatalogEvent& a, const CatalogEvent& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.id < b.id;
}

double parse_iso_time(std::string_view s) {
    using namespace std::chrono;
    const std::string_view whole = s;
    if (!s.empty() && s.back() == 'Z') s.remove_suffix(1);
    if (s.size() < 10 || (s[4] != '-' && s[4] != '/') || s[7] != s[4]) {
        throw DomainError("bad time '" + std::string(whole) + "': expected YYYY-MM-DD");
    }
    const int y = parse_int(s.substr(0, 4), whole);
    const int mo = parse_int(s.substr(5, 2), whole);
    const int d = parse_int(s.substr(8, 2), whole);
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw DomainError("bad time '" + std::string(whole) + "': no such date");
    double secs = static_cast<double>(sys_days(ymd).time_since_epoch().count()) * kSecondsPerDay;
    s.remove_prefix(10);
    if (s.empty()) return secs;
    if (s.front() != 'T' && s.front() != ' ') throw DomainError("bad time '" + std::string(whole) + "'");
    s.remove_prefix(1);
    if (s.size() < 5 || s[2] != ':') throw DomainError("bad time '" + std::string(whole) + "': expected HH:MM");
    const int hh = parse_int(s.substr(0, 2), whole);
    const int mm = parse_int(s.substr(3, 2), whole);
    double ss = 0.0;
    s.remove_prefix(5);
    if (!s.empty()) {
        if (s.front() != ':' || s.size() < 3) throw DomainError("bad time '" + std::string(whole) + "'");
        s.remove_prefix(1);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), ss);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.front() == '-' || s.front() == '+') {
            throw DomainError("bad time '" + std::string(whole) + "': bad seconds");
        }
    }
    if (hh > 23 || mm > 59 || hh < 0 || mm < 0 || !(ss >= 0.0 && ss < 61.0)) {
        throw DomainError("bad time '" + std::string(whole) + "': field out of range");
    }
    return secs + hh * 3600.0 + mm * 60.0 + ss;
}

std::string format_iso_time(double epoch_seconds) {
    using namespace std::chrono;
    if (!std::isfinite(epoch_seconds) || std::abs(epoch_seconds) > 1e13) {
        throw DomainError("format_iso_time: time out of range");
    }
    const long long us_per_day = 86'400'000'000LL;
    const long long us = std::llround(epoch_seconds * 1e6);
    long long day_index = us / us_per_day;
    long long rem = us % us_per_day;
    if (rem < 0) {
        rem += us_per_day;
        --day_index;
    }
    const year_month_day ymd{sys_days{days{day_index}}};
    const long long secs = rem / 1'000'000;
    const long long micros = rem % 1'000'000;
    char buf[64];
    const int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld", int(ymd.year()),
                                unsigned(ymd.month()), unsigned(ymd.day()), secs / 3600, secs / 60 % 60, secs % 60);
    std::string out(buf, static_cast<std::size_t>(n));
    if (micros != 0) {
        std::snprintf(buf, sizeof buf, ".%06lld", micros);
        std::string frac(buf);
        frac.erase(frac.find_last_not_of('0') + 1);
        out += frac;
    }
    return out + 'Z';
}

std::vector<CatalogEvent> parse_catalog(std::istream& in) {
    return parse_rows(in, [](const ParseError& e) { throw e; });
}

CatalogParse parse_catalog_lenient(std::istream& in) {
    CatalogParse out;
    out.events = parse_rows(in, [&](const ParseError& e) {
        std::string msg = e.what();
        const std::string prefix = "line " + std::to_string(e.line()) + ": ";
        if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
        out.errors.push_back({e.line(), msg});
    });
    return out;
}

void write_catalog(std::ostream& out, std::span<const CatalogEvent> events) {
    out << "id,iso_time,lat,lon,depth_km,mw,strike,dip,rake\n";
    for (const auto& e : events) {
        out << e.id << ',' << format_iso_time(e.time) << ',' << format_double(e.lat) << ','
            << format_double(e.lon) << ',' << format_double(e.depth_km) << ',' << format_double(e.m);
        if (e.mechanism) {
            out << ',' << format_double(e.mechanism->strike) << ',' << format_double(e.mechanism->dip) << ','
                << format_double(e.mechanism->rake) << '\n';
        } else {
            out << ",,,\n";
        }
    }
}

double great_circle_km(double lat1, double lon1, double lat2, double lon2) {
    const double p1 = lat1 * kDeg;
    const double p2 = lat2 * kDeg;
    const double s_lat = std::sin(0.5 * (p2 - p1));
    const double s_lon = std::sin(0.5 * (lon2 - lon1) * kDeg);
    const double h = s_lat * s_lat + std::cos(p1) * std::cos(p2) * s_lon * s_lon;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

double centroid_distance(const CatalogEvent& a, const CatalogEvent& b) {
    return great_circle_km(a.lat, a.lon, b.lat, b.lon);
}

double eta_overlap(double m1, double m2, double R_km, const scaling::RegressionCoeffs& length_law) {
    if (!(R_km >= 0.0)) throw DomainError("eta_overlap: requires R >= 0");
    if (R_km == 0.0) return std::numeric_limits<double>::infinity();
    return (scaling::predict_zone_length(m1, length_law) + scaling::predict_zone_length(m2, length_law)) /
           (2.0 * R_km);
}

DcAxes dc_axes(const Mechanism& m) {
    const double phi = m.strike * kDeg;
    const double delta = m.dip * kDeg;
    const double lambda = m.rake * kDeg;
    DcAxes a;
    a.normal = {-std::sin(delta) * std::sin(phi), std::sin(delta) * std::cos(phi), -std::cos(delta)};
    a.slip = {std::cos(lambda) * std::cos(phi) + std::cos(delta) * std::sin(lambda) * std::sin(phi),
              std::cos(lambda) * std::sin(phi) - std::cos(delta) * std::sin(lambda) * std::cos(phi),
              -std::sin(lambda) * std::sin(delta)};
    return a;
}

double dc_rotation_angle(const DcAxes& a, const DcAxes& b) {
    const Eigen::Matrix3d rel = dc_frame(a).transpose() * dc_frame(b);
    double best = rotation_angle_deg(rel);
    for (int axis = 0; axis < 3; ++axis) {
        Eigen::Matrix3d flip = -Eigen::Matrix3d::Identity();
        flip(axis, axis) = 1.0;
        best = std::min(best, rotation_angle_deg(rel * flip));
    }
    return best;
}

double dc_rotation_angle(const Mechanism& a, const Mechanism& b) { return dc_rotation_angle(dc_axes(a), dc_axes(b)); }

void validate(const PairWindow& w) {
    if (!(w.t0_days > 0.0 && w.t0_days < w.T_days) || !std::isfinite(w.T_days)) {
        throw DomainError("PairWindow: requires 0 < t0 < T");
    }
}

std::vector<EventPair> find_pairs(std::span<const CatalogEvent> events, const PairWindow& window,
                                  const scaling::RegressionCoeffs& length_law) {
    std::vector<EventPair> out;
    if (!(window.R_max_km > 0.0)) return out;
    std::vector<const CatalogEvent*> ev;
    for (const auto& e : events) {
        if (e.m >= window.m_min) ev.push_back(&e);
    }
    std::sort(ev.begin(), ev.end(), [](const CatalogEvent* a, const CatalogEvent* b) { return event_before(*a, *b); });
    for (std::size_t i = 0; i < ev.size(); ++i) {
        for (std::size_t j = i + 1; j < ev.size(); ++j) {
            const auto& a = *ev[i];
            const auto& b = *ev[j];
            const double dt = (b.time - a.time) / kSecondsPerDay;
            if (!(dt > 0.0) || dt < window.t0_days) continue;
            const double R = centroid_distance(a, b);
            if (R > window.R_max_km) continue;
            if (out.size() >= window.max_pairs) {
                throw DomainError("find_pairs: more than " + std::to_string(window.max_pairs) +
                                  " pairs; raise max_pairs or narrow m_min / R_max");
            }
            EventPair p;
            p.first_id = a.id;
            p.second_id = b.id;
            p.R_km = R;
            p.dt_days = dt;
            p.eta = eta_overlap(a.m, b.m, R, length_law);
            if (a.mechanism && b.mechanism) p.phi_deg = dc_rotation_angle(*a.mechanism, *b.mechanism);
            out.push_back(std::move(p));
        }
    }
    return out;
}

SurvivalCurve empirical_survival(std::span<const double> intervals_days, const PairWindow& window,
                                 std::span<const double> grid) {
    validate(window);
    if (intervals_days.empty()) throw DomainError("empirical_survival: no intervals");
    std::vector<double> sorted(intervals_days.begin(), intervals_days.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> ts;
    if (grid.empty()) {
        ts.push_back(window.t0_days);
        for (double d : sorted) {
            if (d > window.t0_days && d < window.T_days && d != ts.back()) ts.push_back(d);
        }
        ts.push_back(window.T_days);
    } else {
        ts.assign(grid.begin(), grid.end());
    }
    SurvivalCurve c;
    const double n = static_cast<double>(sorted.size());
    for (double t : ts) {
        const auto first_ge = std::lower_bound(sorted.begin(), sorted.end(), t);
        c.t_days.push_back(t);
        c.n_p.push_back(static_cast<double>(sorted.end() - first_ge) / n);
    }
    return c;
}

SurvivalCurve empirical_survival(std::span<const EventPair> pairs, const PairWindow& window,
                                 std::span<const double> grid) {
    const auto dts = pair_intervals(pairs);
    return empirical_survival(std::span<const double>(dts), window, grid);
}

double model_survival_at(SurvivalModel kind, double theta, double t, const PairWindow& w) {
    validate(w);
    if (!(t >= w.t0_days && t <= w.T_days)) throw DomainError("model_survival: t outside [t0, T]");
    if (kind == SurvivalModel::Poisson) {
        const double r = (w.T_days - t) / (w.T_days - w.t0_days);
        return r * r;
    }
    if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("model_survival: power law needs theta > 0");
    // numerator and denominator times T^theta, with expm1 against cancellation at small theta
    return std::expm1(theta * std::log(w.T_days / t)) / std::expm1(theta * std::log(w.T_days / w.t0_days));
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
    if (!(lo > 0.0 && hi > lo) || points < 2) throw DomainError("log_grid: requires 0 < lo < hi, points >= 2");
    std::vector<double> g(points);
    const double step = std::log(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
    g.front() = lo;
    g.back() = hi;
    return g;
}

SurvivalCurve model_survival(SurvivalModel kind, double theta, const PairWindow& window, std::span<const double> grid,
                             std::size_t points) {
    validate(window);
    const std::vector<double> ts =
        grid.empty() ? log_grid(window.t0_days, window.T_days, points) : std::vector<double>(grid.begin(), grid.end());
    SurvivalCurve c;
    for (double t : ts) {
        c.t_days.push_back(t);
        c.n_p.push_back(model_survival_at(kind, theta, t, window));
    }
    return c;
}

Envelope binomial_envelope(double p, std::size_t n, double level) {
    if (!(p >= 0.0 && p <= 1.0) || n == 0 || !(level > 0.0 && level < 1.0)) {
        throw DomainError("binomial_envelope: requires 0 <= p <= 1, n >= 1, 0 < level < 1");
    }
    if (p == 0.0) return {0.0, 0.0};
    if (p == 1.0) return {1.0, 1.0};
    const boost::math::binomial_distribution<double> dist(static_cast<double>(n), p);
    const double tail = 0.5 * (1.0 - level);
    const double k_lo = boost::math::quantile(dist, tail);
    const double k_hi = boost::math::quantile(boost::math::complement(dist, tail));
    return {k_lo / static_cast<double>(n), k_hi / static_cast<double>(n)};
}

double coefficient_of_variation(std::span<const double> x) {
    if (x.size() < 2) throw DomainError("coefficient_of_variation: needs at least 2 intervals");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    if (!(mean > 0.0)) throw DomainError("coefficient_of_variation: mean interval must be positive");
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1)) / mean;
}

std::vector<double> inter_event_intervals(std::span<const CatalogEvent> events) {
    std::vector<double> times;
    times.reserve(events.size());
    for (const auto& e : events) times.push_back(e.time);
    std::sort(times.begin(), times.end());
    std::vector<double> out;
    for (std::size_t i = 1; i < times.size(); ++i) out.push_back((times[i] - times[i - 1]) / kSecondsPerDay);
    return out;
}

std::vector<double> pair_intervals(std::span<const EventPair> pairs) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(p.dt_days);
    return out;
}

void validate(const OmoriClusterParams& p) {
    if (!(p.theta >= 0.1 && p.theta <= 1.0)) throw DomainError("OmoriClusterParams: requires 0.1 <= theta <= 1");
    if (!(p.t_M_days > 0.0) || !std::isfinite(p.t_M_days)) throw DomainError("OmoriClusterParams: requires t_M > 0");
}

std::vector<double> sample_omori_intervals(const OmoriClusterParams& p, std::size_t n, std::uint64_t seed) {
    validate(p);
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> unif;
    std::vector<double> out(n);
    for (auto& v : out) v = p.t_M_days * std::pow(1.0 - unif(eng), -1.0 / p.theta);
    return out;
}

double fit_powerlaw_theta(std::span<const double> intervals, const PairWindow& w) {
    validate(w);
    double sum_log = 0.0;
    std::size_t n = 0;
    for (double t : intervals) {
        if (t >= w.t0_days && t <= w.T_days) {
            sum_log += std::log(t / w.t0_days);
            ++n;
        }
    }
    if (n < 2 || sum_log <= 0.0) throw DomainError("fit_powerlaw_theta: needs at least 2 distinct intervals");
    const double L = std::log(w.T_days / w.t0_days);
    const double mean_log = sum_log / static_cast<double>(n);
    // score / n with r = (t0/T)^theta: 1/theta - mean log(t/t0) - L r / (1 - r)
    auto score = [&](double th) {
        const double one_minus_r = -std::expm1(-th * L);
        const double r = 1.0 - one_minus_r;
        return 1.0 / th - mean_log - L * r / one_minus_r;
    };
    // the score decreases in theta and is positive near 0 exactly when mean_log < L / 2
    double lo = 1e-8;
    double hi = 1.0;
    while (score(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e6) throw ConvergenceError("fit_powerlaw_theta: no root below theta = 1e6");
    }
    if (score(lo) <= 0.0) throw ConvergenceError("fit_powerlaw_theta: intervals are not decreasing in density");
    std::uintmax_t iters = 200;
    const auto r =
        boost::math::tools::toms748_solve(score, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (r.first + r.second);
}

SyntheticCatalog generate_synthetic_catalog(const SyntheticConfig& cfg) {
    validate(cfg.cluster);
    if (!(cfg.branching_mu >= 0.0)) throw DomainError("generate_synthetic_catalog: requires mu >= 0");
    if (!(cfg.branching_mu < 1.0)) {
        throw DomainError("generate_synthetic_catalog: branching mu >= 1 is supercritical");
    }
    if (!(cfg.background_rate_per_yr >= 0.0) || !std::isfinite(cfg.background_rate_per_yr)) {
        throw DomainError("generate_synthetic_catalog: requires background rate >= 0");
    }
    if (!(cfg.duration_days >= 0.0) || !std::isfinite(cfg.duration_days)) {
        throw DomainError("generate_synthetic_catalog: requires duration >= 0");
    }
    SyntheticCatalog out;
    if (cfg.duration_days == 0.0 || cfg.background_rate_per_yr == 0.0) return out;

    std::mt19937_64 eng(cfg.seed);
    std::uniform_real_distribution<double> unif;
    std::poisson_distribution<std::size_t> n_imm(cfg.background_rate_per_yr * cfg.duration_days / kDaysPerYear);
    out.immigrants = n_imm(eng);

    std::vector<double> times;
    std::deque<double> parents;
    for (std::size_t i = 0; i < out.immigrants; ++i) parents.push_back(unif(eng) * cfg.duration_days);
    std::poisson_distribution<int> n_child(cfg.branching_mu);
    const double inv_theta = -1.0 / cfg.cluster.theta;
    while (!parents.empty()) {
        const double t = parents.front();
        parents.pop_front();
        ++out.generated;
        if (t < cfg.duration_days) times.push_back(t);
        const int k = cfg.branching_mu > 0.0 ? n_child(eng) : 0;
        for (int c = 0; c < k; ++c) {
            parents.push_back(t + cfg.cluster.t_M_days * std::pow(1.0 - unif(eng), inv_theta));
        }
    }
    std::sort(times.begin(), times.end());
    out.events.reserve(times.size());
    char id[32];
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::snprintf(id, sizeof id, "syn%07zu", i + 1);
        CatalogEvent e;
        e.id = id;
        e.time = cfg.start_time + times[i] * kSecondsPerDay;
        e.lat = cfg.lat;
        e.lon = cfg.lon;
        e.depth_km = cfg.depth_km;
        e.m = cfg.magnitude;
        out.events.push_back(std::move(e));
    }
    return out;
}

std::vector<RateCell> read_rate_table(std::istream& in) {
    const auto table = csv::read(in, {"lat_min", "lat_max", "lon_min", "lon_max", "rate"});
    const auto& h = table.header;
    const bool has_zone = std::find(h.begin(), h.end(), "zone") != h.end();
    std::vector<RateCell> out;
    for (const auto& row : table.rows) {
        RateCell c;
        c.lat_min = csv::to_double(row, table.column("lat_min"), "lat_min");
        c.lat_max = csv::to_double(row, table.column("lat_max"), "lat_max");
        c.lon_min = csv::to_double(row, table.column("lon_min"), "lon_min");
        c.lon_max = csv::to_double(row, table.column("lon_max"), "lon_max");
        c.rate = csv::to_double(row, table.column("rate"), "rate");
        if (has_zone) c.zone = row.fields[table.column("zone")];
        if (!(c.lat_min < c.lat_max && c.lon_min < c.lon_max)) throw ParseError("empty cell", row.line);
        if (!(c.rate >= 0.0)) throw ParseError("negative rate", row.line);
        out.push_back(std::move(c));
    }
    return out;
}

const RateCell* find_cell(std::span<const RateCell> cells, double lat, double lon) {
    for (const auto& c : cells) {
        if (lat >= c.lat_min && lat < c.lat_max && lon >= c.lon_min && lon < c.lon_max) return &c;
    }
    return nullptr;
}

std::vector<CatalogEvent> select_by_rate(std::span<const CatalogEvent> events, std::span<const RateCell> cells,
                                         double lo, double hi, std::string_view zone) {
    std::vector<CatalogEvent> out;
    for (const auto& e : events) {
        const RateCell* c = find_cell(cells, e.lat, e.lon);
        if (!c || c->rate < lo || c->rate >= hi) continue;
        if (!zone.empty() && c->zone != zone) continue;
        out.push_back(e);
    }
    return out;
}

void write_pairs(std::ostream& out, std::span<const EventPair> pairs) {
    out << "id1,id2,R_km,phi_deg,dt_days,eta\n";
    for (const auto& p : pairs) {
        out << p.first_id << ',' << p.second_id << ',' << format_double(p.R_km) << ','
            << (p.phi_deg ? format_double(*p.phi_deg) : "") << ',' << format_double(p.dt_days) << ','
            << format_double(p.eta) << '\n';
    }
}

void write_survival(std::ostream& out, const SurvivalCurve& curve) {
    out << "t_days,n_p\n";
    for (std::size_t i = 0; i < curve.t_days.size(); ++i) {
        out << format_double(curve.t_days[i]) << ',' << format_double(curve.n_p[i]) << '\n';
    }
}

}  // namespace quakestat::catalog
