#include "cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "quakestat/catalog.hpp"
#include "quakestat/errors.hpp"
#include "quakestat/firstpassage.hpp"
#include "quakestat/format.hpp"
#include "quakestat/hazard.hpp"
#include "quakestat/stressdist.hpp"

namespace quakestat::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

/// Exit with a code and a message.
struct Exit {
    int code;
    std::string message;
};

json num(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

class Session {
public:
    Session(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
        : args_(args), out_(out), err_(err) {}

    std::ostream& out() { return out_; }
    std::ostream& err() { return err_; }

    void set_out_dir(const std::string& dir) { out_dir_ = dir; }
    void set_seed(std::uint64_t seed) { seed_ = seed; }

    fs::path resolve(const std::string& path) const {
        fs::path p(path);
        if (p.is_relative()) {
            std::string base = out_dir_;
            if (base.empty()) {
                const char* env = std::getenv(kOutDirEnv);
                if (env && *env) base = env;
            }
            if (!base.empty()) p = fs::path(base) / p;
        }
        return p;
    }

    std::ifstream open_input(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Exit{kExitData, "cannot open input '" + path + "'"};
        inputs_.push_back(path);
        return in;
    }

    /// Writes `body` to the resolved path and records it for the manifest.
    std::string write_output(const std::string& path, const std::string& body) {
        const fs::path p = resolve(path);
        if (p.has_parent_path()) {
            std::error_code ec;
            fs::create_directories(p.parent_path(), ec);
        }
        std::ofstream f(p, std::ios::binary);
        if (!f || !(f << body) || !f.flush()) throw Exit{kExitData, "cannot write output '" + p.string() + "'"};
        outputs_.push_back(p.string());
        return p.string();
    }

    /// Manifest pairing every output with the command line, seed, version
    /// and input digests.
    void write_manifest(const std::string& path) {
        json m;
        m["tool"] = "quakestat";
        m["version"] = QUAKESTAT_VERSION;
        m["command"] = std::vector<std::string>(args_.begin() + 1, args_.end());
        m["seed"] = seed_ ? json(*seed_) : json(nullptr);
        json in = json::array();
        for (const auto& p : inputs_) in.push_back({{"path", p}, {"sha256", sha256_file(p)}});
        m["inputs"] = in;
        json outs = json::array();
        for (const auto& p : outputs_) outs.push_back({{"path", p}, {"sha256", sha256_file(p)}});
        m["outputs"] = outs;
        const auto outputs = outputs_;
        write_output(path, m.dump(2) + "\n");
        outputs_ = outputs;
    }

private:
    std::vector<std::string> args_;
    std::ostream& out_;
    std::ostream& err_;
    std::string out_dir_;
    std::optional<std::uint64_t> seed_;
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
};

// ---------------------------------------------------------------- dist

struct DistArgs {
    std::string family = "mixed-igd";
    double sigma = 1.0;
    double D = 1.0;
    double V = 1.0;
    double psi = 0.0;
    double t_min = 1e-3;
    double t_max = 1e3;
    std::size_t points = 200;
    std::string out;
};

void cmd_dist(Session& s, const DistArgs& a) {
    if (!(a.t_min > 0.0) || !(a.t_max > a.t_min) || !std::isfinite(a.t_max)) {
        throw DomainError("dist: requires 0 < t-min < t-max < inf");
    }
    if (a.points < 2) throw DomainError("dist: requires points >= 2");
    const stress::StressParams p{a.sigma, a.D, a.V, a.psi};
    std::function<double(double)> f;
    if (a.family == "levy") {
        f = [p](double t) { return stress::levy_pdf(t, p); };
    } else if (a.family == "igd") {
        f = [p](double t) { return stress::igd_pdf(t, p); };
    } else if (a.family == "mixed-levy") {
        f = [p](double t) { return stress::mixed_levy_pdf(t, p.psi, p.D); };
    } else {
        f = [p](double t) { return stress::mixed_igd_pdf(t, p.psi, p.D, p.V); };
    }
    std::ostringstream body;
    body << "t,pdf\n";
    for (double t : catalog::log_grid(a.t_min, a.t_max, a.points)) {
        body << format_double(t) << ',' << format_double(f(t)) << '\n';
    }
    if (a.out.empty()) {
        s.out() << body.str();
        return;
    }
    const auto path = s.write_output(a.out, body.str());
    s.write_manifest(a.out + ".manifest.json");
    s.err() << "wrote " << path << '\n';
}

// ------------------------------------------------------------ simulate

struct SimulateArgs {
    double sigma = 1.0;
    double D = 1.0;
    double V = 0.0;
    std::optional<double> psi;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    std::uint64_t n = 10000;
    double dt = 1e-3;
    double t_max = 1e12;
    bool no_bridge = false;
    unsigned workers = 0;
    std::uint64_t seed = 1;
    std::string out;
};

void cmd_simulate(Session& s, const SimulateArgs& a) {
    s.set_seed(a.seed);
    const stress::StressParams p{a.sigma, a.D, a.V, a.psi.value_or(0.0)};
    const fpt::SimConfig cfg{a.n, a.dt, a.seed, a.t_max, !a.no_bridge, a.workers};
    json summary;
    fpt::SampleSet samples;
    if (a.psi) {
        const auto def = fpt::default_sigma_bounds(a.sigma);
        const double lo = a.sigma_min > 0.0 ? a.sigma_min : def.lo;
        const double hi = a.sigma_max > 0.0 ? a.sigma_max : def.hi;
        samples = fpt::sample_compound(*a.psi, lo, hi, p, cfg);
        summary["mode"] = "compound";
        summary["psi"] = *a.psi;
        summary["sigma_min"] = lo;
        summary["sigma_max"] = hi;
    } else {
        samples = fpt::simulate_first_passage(p, cfg);
        summary["mode"] = a.V == 0.0 ? "levy" : "igd";
        const auto cdf = [&](double t) { return a.V == 0.0 ? stress::levy_cdf(t, p) : stress::igd_cdf(t, p); };
        summary["ks_vs_analytic"] = num(fpt::ks_distance(samples, cdf));
    }
    summary["n_paths"] = a.n;
    summary["absorbed"] = samples.times.size();
    summary["censored"] = samples.censored_count;
    summary["seed"] = a.seed;
    summary["bridge_correction"] = !a.no_bridge;
    if (!a.out.empty()) {
        std::ostringstream body;
        fpt::write_samples_csv(body, samples);
        summary["samples"] = s.write_output(a.out, body.str());
        s.write_manifest(a.out + ".manifest.json");
    }
    s.out() << summary.dump(2) << '\n';
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    double rate = 10.0;
    double mu = 0.0;
    double theta = 0.28;
    double t_m = 1.0;
    double duration = 3652.5;
    double magnitude = 7.5;
    std::uint64_t seed = 1;
    std::string out;
};

void cmd_synth(Session& s, const SynthArgs& a) {
    s.set_seed(a.seed);
    catalog::SyntheticConfig cfg;
    cfg.background_rate_per_yr = a.rate;
    cfg.cluster = {a.theta, a.t_m};
    cfg.branching_mu = a.mu;
    cfg.duration_days = a.duration;
    cfg.seed = a.seed;
    cfg.magnitude = a.magnitude;
    const auto syn = catalog::generate_synthetic_catalog(cfg);
    std::ostringstream body;
    catalog::write_catalog(body, syn.events);
    if (a.out.empty()) {
        s.out() << body.str();
        return;
    }
    s.write_output(a.out, body.str());
    s.write_manifest(a.out + ".manifest.json");
    s.err() << syn.events.size() << " events, " << syn.immigrants << " immigrants\n";
}

// -------------------------------------------------------------- catalog

struct CatalogArgs {
    std::string input;
    std::string prefix = "catalog";
    double T_days = 0.0;
    double t0_days = 1.0;
    double m_min = 7.5;
    double r_max = 250.0;
    std::size_t max_pairs = 20'000'000;
    std::optional<double> theta;
    std::size_t points = 200;
    std::string rate_table;
    double rate_lo = 0.0;
    double rate_hi = INFINITY;
    std::string zone;
};

json interval_stats(std::span<const double> x) {
    json j;
    j["n"] = x.size();
    if (x.size() < 2) {
        j["mean_days"] = x.empty() ? json(nullptr) : json(x[0]);
        j["std_days"] = nullptr;
        j["cv"] = nullptr;
        return j;
    }
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    j["mean_days"] = num(mean);
    j["std_days"] = num(std::sqrt(ss / static_cast<double>(x.size() - 1)));
    j["cv"] = mean > 0.0 ? num(catalog::coefficient_of_variation(x)) : json(nullptr);
    return j;
}

std::string curve_csv(const catalog::SurvivalCurve& c) {
    std::ostringstream o;
    catalog::write_survival(o, c);
    return o.str();
}

void cmd_catalog(Session& s, const CatalogArgs& a) {
    auto in = s.open_input(a.input);
    catalog::CatalogParse parsed;
    try {
        parsed = catalog::parse_catalog_lenient(in);
    } catch (const ParseError& e) {
        throw Exit{kExitData, a.input + ": " + e.what()};
    }
    for (const auto& e : parsed.errors) s.err() << a.input << ": line " << e.line << ": " << e.message << '\n';
    auto events = std::move(parsed.events);
    if (!a.rate_table.empty()) {
        auto rt = s.open_input(a.rate_table);
        std::vector<catalog::RateCell> cells;
        try {
            cells = catalog::read_rate_table(rt);
        } catch (const ParseError& e) {
            throw Exit{kExitData, a.rate_table + ": " + e.what()};
        }
        events = catalog::select_by_rate(events, cells, a.rate_lo, a.rate_hi, a.zone);
    }
    if (events.empty()) throw Exit{kExitData, a.input + ": no valid events"};

    catalog::PairWindow w;
    w.T_days = a.T_days > 0.0 ? a.T_days : (events.back().time - events.front().time) / catalog::kSecondsPerDay;
    w.t0_days = a.t0_days;
    w.m_min = a.m_min;
    w.R_max_km = a.r_max;
    w.max_pairs = a.max_pairs;
    catalog::validate(w);

    const auto pairs = catalog::find_pairs(events, w);
    std::ostringstream pb;
    catalog::write_pairs(pb, pairs);
    s.write_output(a.prefix + "_pairs.csv", pb.str());

    json summary;
    summary["input"] = a.input;
    summary["events"] = events.size();
    summary["row_errors"] = parsed.errors.size();
    summary["window"] = {{"T_days", num(w.T_days)},
                         {"t0_days", num(w.t0_days)},
                         {"m_min", num(w.m_min)},
                         {"R_max_km", num(w.R_max_km)}};
    summary["pairs"] = pairs.size();

    std::vector<catalog::CatalogEvent> large;
    for (const auto& e : events) {
        if (e.m >= w.m_min) large.push_back(e);
    }
    summary["inter_event"] = interval_stats(catalog::inter_event_intervals(large));
    const auto dts = catalog::pair_intervals(pairs);
    summary["pair_intervals"] = interval_stats(dts);

    const auto poisson = catalog::model_survival(catalog::SurvivalModel::Poisson, 0.0, w, {}, a.points);
    s.write_output(a.prefix + "_survival_poisson.csv", curve_csv(poisson));
    if (!dts.empty()) {
        s.write_output(a.prefix + "_survival_empirical.csv", curve_csv(catalog::empirical_survival(pairs, w)));
        std::optional<double> theta = a.theta;
        if (!theta) {
            try {
                theta = catalog::fit_powerlaw_theta(dts, w);
                summary["theta_fitted"] = *theta;
            } catch (const std::exception& e) {
                summary["theta_fitted"] = nullptr;
                s.err() << "power-law fit skipped: " << e.what() << '\n';
            }
        }
        if (theta) {
            const auto pl = catalog::model_survival(catalog::SurvivalModel::PowerLaw, *theta, w, {}, a.points);
            s.write_output(a.prefix + "_survival_powerlaw.csv", curve_csv(pl));
            summary["theta"] = *theta;
        }
    }
    s.write_output(a.prefix + "_summary.json", summary.dump(2) + "\n");
    s.write_manifest(a.prefix + ".manifest.json");
    s.out() << summary.dump(2) << '\n';
}

// --------------------------------------------------------------- hazard

struct HazardArgs {
    std::string scenario;
    bool check = false;
    std::string out;
};

int cmd_hazard(Session& s, const HazardArgs& a) {
    auto in = s.open_input(a.scenario);
    hazard::Scenario sc;
    try {
        sc = hazard::parse_scenario(in);
    } catch (const ParseError& e) {
        throw Exit{kExitUsage, a.scenario + ": " + e.what()};
    }
    const auto report = hazard::evaluate(sc);
    auto j = hazard::to_json(report);
    int code = kExitOk;
    if (a.check) {
        json checks = json::array();
        for (const auto& c : hazard::check_new_madrid(report)) {
            checks.push_back({{"name", c.name},
                              {"value", num(c.value)},
                              {"target", c.target},
                              {"rel_tol", c.rel_tol},
                              {"pass", c.pass}});
            if (!c.pass) {
                s.err() << "check failed: " << c.name << " = " << format_double(c.value) << ", expected "
                        << format_double(c.target) << " within " << c.rel_tol * 100 << "%\n";
                code = kExitData;
            }
        }
        j["check"] = checks;
    }
    if (a.out.empty()) {
        s.out() << j.dump(2) << '\n';
    } else {
        s.write_output(a.out, j.dump(2) + "\n");
        s.write_manifest(a.out + ".manifest.json");
    }
    return code;
}

}  // namespace

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Exit{kExitData, "cannot read '" + path + "' for hashing"};
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buf;
    while (in.read(buf.data(), buf.size()) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md;
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Earthquake inter-event statistics, moment budgets and aftershock hazard"};
    app.require_subcommand(1);
    std::string out_dir;
    app.add_option("--out-dir", out_dir, std::string("Directory for relative output paths (default $") + kOutDirEnv +
                                             " or the working directory)");

    DistArgs dist;
    auto* d = app.add_subcommand("dist", "Tabulate a first-passage density on a log grid");
    d->add_option("--family", dist.family, "levy | igd | mixed-levy | mixed-igd")
        ->check(CLI::IsMember({"levy", "igd", "mixed-levy", "mixed-igd"}))
        ->capture_default_str();
    d->add_option("--sigma", dist.sigma, "Barrier stress")->capture_default_str();
    d->add_option("--D", dist.D, "Diffusion coefficient")->capture_default_str();
    d->add_option("--V", dist.V, "Loading rate")->capture_default_str();
    d->add_option("--psi", dist.psi, "Stress-mixture exponent")->capture_default_str();
    d->add_option("--t-min", dist.t_min, "First grid time, days")->capture_default_str();
    d->add_option("--t-max", dist.t_max, "Last grid time, days")->capture_default_str();
    d->add_option("--points", dist.points, "Grid points")->capture_default_str();
    d->add_option("--out", dist.out, "Output CSV (default stdout)");

    SimulateArgs sim;
    auto* sm = app.add_subcommand("simulate", "Monte Carlo first-passage times");
    sm->add_option("--sigma", sim.sigma, "Barrier stress")->capture_default_str();
    sm->add_option("--D", sim.D, "Diffusion coefficient")->capture_default_str();
    sm->add_option("--V", sim.V, "Loading rate")->capture_default_str();
    sm->add_option("--psi", sim.psi, "Mix barriers with density sigma^(-1-psi)");
    sm->add_option("--sigma-min", sim.sigma_min, "Lower barrier bound for --psi");
    sm->add_option("--sigma-max", sim.sigma_max, "Upper barrier bound for --psi");
    sm->add_option("--n", sim.n, "Paths")->capture_default_str();
    sm->add_option("--dt", sim.dt, "Time step, days")->capture_default_str();
    sm->add_option("--t-max", sim.t_max, "Censoring horizon, days")->capture_default_str();
    sm->add_flag("--no-bridge", sim.no_bridge, "Disable the Brownian-bridge crossing correction");
    sm->add_option("--workers", sim.workers, "Threads (0 = hardware)")->capture_default_str();
    sm->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
    sm->add_option("--out", sim.out, "Samples CSV");

    SynthArgs syn;
    auto* sy = app.add_subcommand("synth", "Synthetic Poisson-cluster catalog");
    sy->add_option("--rate", syn.rate, "Immigrant rate per year")->capture_default_str();
    sy->add_option("--mu", syn.mu, "Mean children per event")->capture_default_str();
    sy->add_option("--theta", syn.theta, "Power-law delay exponent")->capture_default_str();
    sy->add_option("--t-m", syn.t_m, "Minimum delay, days")->capture_default_str();
    sy->add_option("--duration", syn.duration, "Days")->capture_default_str();
    sy->add_option("--magnitude", syn.magnitude, "Magnitude of every event")->capture_default_str();
    sy->add_option("--seed", syn.seed, "Random seed")->capture_default_str();
    sy->add_option("--out", syn.out, "Catalog CSV (default stdout)");

    CatalogArgs cat;
    auto* c = app.add_subcommand("catalog", "Pair table, survival curves and variation of a catalog");
    c->add_option("input", cat.input, "Catalog CSV")->required();
    c->add_option("--prefix", cat.prefix, "Output file prefix")->capture_default_str();
    c->add_option("--T-days", cat.T_days, "Catalog duration (default: span of the events)");
    c->add_option("--t0-days", cat.t0_days, "Minimum pair interval")->capture_default_str();
    c->add_option("--m-min", cat.m_min, "Magnitude threshold")->capture_default_str();
    c->add_option("--r-max", cat.r_max, "Maximum centroid distance, km")->capture_default_str();
    c->add_option("--max-pairs", cat.max_pairs, "Refuse catalogs with more pairs")->capture_default_str();
    c->add_option("--theta", cat.theta, "Power-law exponent (default: fitted)");
    c->add_option("--points", cat.points, "Model curve points")->capture_default_str();
    c->add_option("--rate-table", cat.rate_table, "Rate table CSV for event selection");
    c->add_option("--rate-lo", cat.rate_lo, "Keep cells with rate >= this");
    c->add_option("--rate-hi", cat.rate_hi, "Keep cells with rate < this");
    c->add_option("--zone", cat.zone, "Keep cells with this zone tag");

    HazardArgs hz;
    auto* h = app.add_subcommand("hazard", "Zone background, recurrence and aftershock duration");
    h->add_option("scenario", hz.scenario, "Scenario file")->required();
    h->add_flag("--check", hz.check, "Compare with the New Madrid reference values (10%)");
    h->add_option("--out", hz.out, "Report JSON (default stdout)");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    Session session(args, out, err);
    session.set_out_dir(out_dir);
    try {
        if (d->parsed()) cmd_dist(session, dist);
        if (sm->parsed()) cmd_simulate(session, sim);
        if (sy->parsed()) cmd_synth(session, syn);
        if (c->parsed()) cmd_catalog(session, cat);
        if (h->parsed()) return cmd_hazard(session, hz);
    } catch (const Exit& e) {
        err << "error: " << e.message << '\n';
        return e.code;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}

}  // namespace quakestat::cli
