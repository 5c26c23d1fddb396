#include "quakestat/hazard.hpp"

#include <charconv>
#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <set>

#include "quakestat/catalog.hpp"
#include "quakestat/errors.hpp"
#include "quakestat/format.hpp"
#include "quakestat/scaling.hpp"

namespace quakestat::hazard {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDaysPerYear = catalog::kDaysPerYear;

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

nlohmann::ordered_json num(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& v, const std::string& key, std::size_t line) {
    double x = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last || first == last) {
        throw ParseError(key + ": not a number: '" + v + "'", line);
    }
    return x;
}

bool below_threshold(double m, const tgr::TgrParams& p) {
    return m < tgr::magnitude_from_moment(p.M_t) - 1e-9;
}

}  // namespace

void validate(const SequenceSpec& s) {
    if (!positive_finite(s.ref_rate_day1)) throw DomainError("SequenceSpec: requires ref_rate_day1 > 0");
    if (!positive_finite(s.b_value)) throw DomainError("SequenceSpec: requires b_value > 0");
    if (!positive_finite(s.omori_exponent)) throw DomainError("SequenceSpec: requires omori_exponent > 0");
    if (!std::isfinite(s.m_ref) || !std::isfinite(s.mainshock_m)) {
        throw DomainError("SequenceSpec: magnitudes must be finite");
    }
}

double omori_rate_per_day(const SequenceSpec& s, double t_days) {
    validate(s);
    if (!(t_days > 0.0)) throw DomainError("omori_rate_per_day: requires t > 0");
    return s.ref_rate_day1 * std::pow(t_days, -s.omori_exponent);
}

ZoneBackground zone_background(const tgr::ZoneSpec& zone, const tgr::TgrParams& params,
                               std::span<const double> magnitudes) {
    if (!(zone.coupling_chi >= 0.0 && zone.coupling_chi <= 1.0)) {
        throw DomainError("zone_background: requires 0 <= chi <= 1");
    }
    tgr::ZoneSpec full = zone;
    full.coupling_chi = 1.0;
    ZoneBackground out;
    out.tectonic = tgr::tectonic_moment_rate(full);
    out.seismic = tgr::apply_coupling(out.tectonic, zone.coupling_chi);
    out.tgr = params;
    out.alpha0_per_yr = tgr::background_rate(out.seismic, params);
    out.tgr.alpha0 = out.alpha0_per_yr;
    for (double m : magnitudes) {
        if (below_threshold(m, params)) throw DomainError("zone_background: magnitude below the threshold");
        const double r = tgr::rate(std::max(tgr::moment_from_magnitude(m), params.M_t), out.tgr);
        out.recurrences.push_back({m, r, r > 0.0 ? 1.0 / r : kInf});
    }
    return out;
}

Duration aftershock_duration(const SequenceSpec& s, double background_rate_per_day) {
    validate(s);
    if (!(background_rate_per_day >= 0.0) || std::isinf(background_rate_per_day)) {
        throw DomainError("aftershock_duration: requires finite background >= 0");
    }
    if (background_rate_per_day == 0.0) return {kInf, false};
    const double t = std::exp(std::log(s.ref_rate_day1 / background_rate_per_day) / s.omori_exponent);
    return {t, background_rate_per_day >= s.ref_rate_day1};
}

double aftershock_rate_at(const SequenceSpec& s, double t_days, double m_query) {
    validate(s);
    if (!(t_days >= 1.0)) throw DomainError("aftershock_rate_at: t < 1 day is outside the day-1 calibration");
    if (!std::isfinite(m_query)) throw DomainError("aftershock_rate_at: magnitude must be finite");
    return omori_rate_per_day(s, t_days) * std::pow(10.0, s.b_value * (s.m_ref - m_query)) * kDaysPerYear;
}

Scenario parse_scenario(std::istream& in) {
    Scenario s;
    std::map<std::string, std::function<void(const std::string&, std::size_t)>> setters;
    auto number = [&](const char* key, double& field) {
        setters[key] = [&field, key](const std::string& v, std::size_t line) { field = parse_number(v, key, line); };
    };
    number("zone_length_km", s.zone_length_km);
    number("aspect", s.aspect);
    number("area_km2", s.area_km2);
    number("strain_rate_per_yr", s.zone.strain_rate_per_yr);
    number("width_km", s.zone.width_km);
    number("chi", s.zone.coupling_chi);
    number("shear_modulus_Pa", s.zone.shear_modulus_Pa);
    number("beta", s.tgr.beta);
    number("corner_moment_Nm", s.tgr.M_c);
    number("mainshock_m", s.sequence.mainshock_m);
    number("ref_rate_day1", s.sequence.ref_rate_day1);
    number("m_ref", s.sequence.m_ref);
    number("b_value", s.sequence.b_value);
    number("omori_exponent", s.sequence.omori_exponent);
    number("query_years", s.query_years);
    number("query_m", s.query_m);
    setters["name"] = [&](const std::string& v, std::size_t) { s.name = v; };
    setters["threshold_m"] = [&](const std::string& v, std::size_t line) {
        s.tgr.M_t = tgr::moment_from_magnitude(parse_number(v, "threshold_m", line));
    };
    setters["reference_m"] = [&](const std::string& v, std::size_t line) {
        s.tgr.M_0 = tgr::moment_from_magnitude(parse_number(v, "reference_m", line));
    };
    setters["length_law_row"] = [&](const std::string& v, std::size_t line) {
        const double r = parse_number(v, "length_law_row", line);
        if (r != std::floor(r) || r < 1 || r > 22) throw ParseError("length_law_row: must be an integer 1..22", line);
        s.length_law_row = static_cast<int>(r);
    };
    setters["recurrence_magnitudes"] = [&](const std::string& v, std::size_t line) {
        s.recurrence_magnitudes.clear();
        std::size_t pos = 0;
        while (pos <= v.size()) {
            const auto comma = std::min(v.find(',', pos), v.size());
            s.recurrence_magnitudes.push_back(
                parse_number(trim(std::string_view(v).substr(pos, comma - pos)), "recurrence_magnitudes", line));
            pos = comma + 1;
        }
    };

    std::set<std::string> seen;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(std::string_view(raw).substr(0, hash));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", line);
        const std::string key = trim(std::string_view(text).substr(0, eq));
        const std::string value = trim(std::string_view(text).substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) throw ParseError("unknown key '" + key + "'", line);
        if (!seen.insert(key).second) throw ParseError("duplicate key '" + key + "'", line);
        if (value.empty()) throw ParseError(key + ": empty value", line);
        it->second(value, line);
    }
    return s;
}

Report evaluate(const Scenario& s) {
    Report r;
    r.scenario = s;
    validate(s.sequence);
    r.predicted_length_km =
        scaling::predict_zone_length(s.sequence.mainshock_m, scaling::table1_row(s.length_law_row).coeffs);
    if (s.zone_length_km < 0.0 || !std::isfinite(s.zone_length_km)) {
        throw DomainError("scenario: zone_length_km must be >= 0 (0 = predicted)");
    }
    r.length_km = s.zone_length_km > 0.0 ? s.zone_length_km : r.predicted_length_km;
    if (s.area_km2 < 0.0 || !std::isfinite(s.area_km2)) throw DomainError("scenario: area_km2 must be >= 0");
    r.area_km2 = s.area_km2 > 0.0 ? s.area_km2 : scaling::zone_area(r.length_km, s.aspect);

    tgr::ZoneSpec zone = s.zone;
    zone.area_km2 = r.area_km2;
    r.background = zone_background(zone, s.tgr, s.recurrence_magnitudes);

    if (below_threshold(s.sequence.m_ref, s.tgr)) throw DomainError("scenario: m_ref below the TGR threshold magnitude");
    const double M_ref = std::max(tgr::moment_from_magnitude(s.sequence.m_ref), s.tgr.M_t);
    r.background_per_day = tgr::rate(M_ref, r.background.tgr) / kDaysPerYear;
    r.duration = aftershock_duration(s.sequence, r.background_per_day);
    if (!(s.query_years > 0.0)) throw DomainError("scenario: query_years must be > 0");
    r.query_rate_per_yr = aftershock_rate_at(s.sequence, s.query_years * kDaysPerYear, s.query_m);
    return r;
}

nlohmann::ordered_json to_json(const Report& r) {
    using nlohmann::ordered_json;
    const auto& s = r.scenario;
    ordered_json j;
    j["scenario"] = s.name;
    j["inputs"] = {
        {"mainshock_m", num(s.sequence.mainshock_m)},
        {"zone_length_km", num(s.zone_length_km)},
        {"length_law_row", s.length_law_row},
        {"aspect", num(s.aspect)},
        {"area_km2", num(s.area_km2)},
        {"strain_rate_per_yr", num(s.zone.strain_rate_per_yr)},
        {"width_km", num(s.zone.width_km)},
        {"chi", num(s.zone.coupling_chi)},
        {"shear_modulus_Pa", num(s.zone.shear_modulus_Pa)},
        {"beta", num(s.tgr.beta)},
        {"threshold_moment_Nm", num(s.tgr.M_t)},
        {"reference_moment_Nm", num(s.tgr.M_0)},
        {"corner_moment_Nm", num(s.tgr.M_c)},
        {"ref_rate_day1", num(s.sequence.ref_rate_day1)},
        {"m_ref", num(s.sequence.m_ref)},
        {"b_value", num(s.sequence.b_value)},
        {"omori_exponent", num(s.sequence.omori_exponent)},
        {"query_years", num(s.query_years)},
        {"query_m", num(s.query_m)},
    };
    const auto& bg = r.background;
    ordered_json rec = ordered_json::array();
    for (const auto& x : bg.recurrences) {
        rec.push_back({{"m", num(x.magnitude)}, {"rate_per_yr", num(x.rate_per_yr)}, {"recurrence_yr", num(x.years)}});
    }
    j["geometry"] = {
        {"predicted_length_km", num(r.predicted_length_km)},
        {"length_km", num(r.length_km)},
        {"area_km2", num(r.area_km2)},
        {"effective_width_km", num(s.zone.width_km * s.zone.coupling_chi)},
    };
    j["moment_budget"] = {
        {"tectonic_moment_rate_Nm_per_yr", num(bg.tectonic.Nm_per_yr)},
        {"seismic_moment_rate_Nm_per_yr", num(bg.seismic.Nm_per_yr)},
        {"gamma_2_minus_beta", num(std::tgamma(2.0 - s.tgr.beta))},
        {"alpha0_per_yr", num(bg.alpha0_per_yr)},
        {"recurrence", rec},
    };
    j["aftershocks"] = {
        {"background_per_day", num(r.background_per_day)},
        {"duration_days", num(r.duration.days)},
        {"duration_yr", num(r.duration.days / kDaysPerYear)},
        {"duration_is_approximate", true},
        {"degenerate", r.duration.degenerate},
        {"query_rate_per_yr", num(r.query_rate_per_yr)},
    };
    return j;
}

std::vector<GoldenCheck> check_new_madrid(const Report& r, double rel_tol) {
    double m8 = std::numeric_limits<double>::quiet_NaN();
    for (const auto& x : r.background.recurrences) {
        if (x.magnitude == 8.0) m8 = x.years;
    }
    const std::pair<const char*, std::pair<double, double>> rows[] = {
        {"alpha0_per_yr", {r.background.alpha0_per_yr, 1.27e-3}},
        {"recurrence_m8_yr", {m8, 2.1e6}},
        {"duration_yr", {r.duration.days / kDaysPerYear, 3600.0}},
        {"query_rate_per_yr", {r.query_rate_per_yr, 0.26}},
        {"area_km2", {r.area_km2, 11300.0}},
    };
    std::vector<GoldenCheck> out;
    for (const auto& [name, vt] : rows) {
        const auto [value, target] = vt;
        out.push_back({name, value, target, rel_tol, std::abs(value - target) <= rel_tol * target});
    }
    return out;
}

}  // namespace quakestat::hazard
