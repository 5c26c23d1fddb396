#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "quakestat/csv.hpp"

namespace fs = std::filesystem;
using namespace quakestat;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "quakestat");
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::pair<double, double>> table(const std::string& text) {
    std::istringstream in(text);
    const auto t = csv::read(in, {"t", "pdf"});
    std::vector<std::pair<double, double>> out;
    for (const auto& r : t.rows) out.emplace_back(csv::to_double(r, 0, "t"), csv::to_double(r, 1, "pdf"));
    return out;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("quakestat_cli_" + std::to_string(std::random_device{}()) + "_" +
               ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir);
        unsetenv(cli::kOutDirEnv);
    }
    void TearDown() override {
        std::error_code ec;
        fs::remove_all(dir, ec);
        unsetenv(cli::kOutDirEnv);
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
    void write(const std::string& name, const std::string& body) const { std::ofstream(dir / name) << body; }

    fs::path dir;
};

const char* kTableRow2 =
    "id,iso_time,lat,lon,depth_km,mw,strike,dip,rake\n"
    "kuril-a,1978-03-23T00:00:00Z,44.1,149.3,20,7.6,,,\n"
    "kuril-b,1978-03-24T16:33:36Z,44.2,149.0,20,7.6,,,\n";

}  // namespace

TEST(Sha256, KnownVectors) {
    const auto p = fs::temp_directory_path() / "quakestat_sha_abc";
    std::ofstream(p) << "abc";
    EXPECT_EQ(cli::sha256_file(p.string()), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    std::ofstream(p, std::ios::trunc).close();
    EXPECT_EQ(cli::sha256_file(p.string()), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    fs::remove(p);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run({}).code, cli::kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"dist", "--family", "gauss"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"dist", "--points", "many"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
    EXPECT_EQ(run({"catalog"}).code, cli::kExitUsage);
}

TEST_F(CliTest, DistMixedLevyIsHyperbola) {
    const auto r = run({"dist", "--family", "mixed-levy", "--psi", "0", "--D", "1", "--points", "25"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, 6), "t,pdf\n");
    const auto rows = table(r.out);
    ASSERT_EQ(rows.size(), 25u);
    EXPECT_DOUBLE_EQ(rows.front().first, 1e-3);
    EXPECT_DOUBLE_EQ(rows.back().first, 1e3);
    for (const auto& [t, f] : rows) EXPECT_NEAR(f, 1.0 / (2.0 * t), 1e-12 / t) << t;
}

TEST_F(CliTest, DistMixedIgdHasTwoSlopes) {
    const auto r = run({"dist", "--family", "mixed-igd", "--psi", "0.5", "--V", "1", "--D", "1", "--t-min", "1e-6",
                        "--t-max", "1e6", "--points", "121"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = table(r.out);
    auto slope = [&](std::size_t i) {
        return std::log(rows[i + 1].second / rows[i].second) / std::log(rows[i + 1].first / rows[i].first);
    };
    EXPECT_NEAR(slope(0), -1.25, 0.01);
    EXPECT_NEAR(slope(rows.size() - 2), -1.5, 0.01);
}

TEST_F(CliTest, DistBandViolation) {
    const auto r = run({"dist", "--family", "mixed-igd", "--psi", "1.2"});
    EXPECT_EQ(r.code, cli::kExitUsage);
    EXPECT_NE(r.err.find("psi < 1"), std::string::npos) << r.err;
    EXPECT_EQ(run({"dist", "--t-min", "0"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"dist", "--family", "igd", "--sigma", "-1"}).code, cli::kExitUsage);
}

TEST_F(CliTest, DistFileAndManifest) {
    const auto r = run({"dist", "--family", "igd", "--V", "0.5", "--out", path("igd.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto manifest = nlohmann::json::parse(slurp(path("igd.csv.manifest.json")));
    EXPECT_EQ(manifest["version"], "0.3.0");
    EXPECT_EQ(manifest["command"][0], "dist");
    ASSERT_EQ(manifest["outputs"].size(), 1u);
    EXPECT_EQ(manifest["outputs"][0]["sha256"], cli::sha256_file(path("igd.csv")));
}

TEST_F(CliTest, OutputDirectoryFromEnvironment) {
    setenv(cli::kOutDirEnv, dir.string().c_str(), 1);
    ASSERT_EQ(run({"dist", "--out", "env.csv"}).code, 0);
    EXPECT_TRUE(fs::exists(dir / "env.csv"));
    EXPECT_TRUE(fs::exists(dir / "env.csv.manifest.json"));
    ASSERT_EQ(run({"dist", "--out-dir", (dir / "sub").string(), "--out", "flag.csv"}).code, 0);
    EXPECT_TRUE(fs::exists(dir / "sub" / "flag.csv"));
}

TEST_F(CliTest, SimulateDeterministicGivenSeed) {
    const std::vector<std::string> args{"simulate", "--V", "1", "--n", "2000", "--seed", "11", "--workers", "3"};
    auto a = args;
    a.insert(a.end(), {"--out", path("a.csv")});
    auto b = args;
    b.insert(b.end(), {"--out", path("b.csv")});
    const auto ra = run(a);
    const auto rb = run(b);
    ASSERT_EQ(ra.code, 0) << ra.err;
    ASSERT_EQ(rb.code, 0) << rb.err;
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    const auto ja = nlohmann::json::parse(ra.out);
    EXPECT_EQ(ja["seed"], 11);
    EXPECT_LT(ja["ks_vs_analytic"].get<double>(), 0.05);
    const auto first = slurp(path("a.csv.manifest.json"));
    ASSERT_EQ(run(a).code, 0);
    EXPECT_EQ(slurp(path("a.csv.manifest.json")), first);
    ASSERT_EQ(run({"simulate", "--n", "2000", "--seed", "12", "--out", path("c.csv")}).code, 0);
    EXPECT_NE(slurp(path("a.csv")), slurp(path("c.csv")));
}

TEST_F(CliTest, CatalogTableRowPair) {
    write("t2.csv", std::string(kTableRow2) + "broken,1978-03-25,95,0,10,7.6,,,\n");
    const auto r = run({"catalog", path("t2.csv"), "--T-days", "12000", "--out-dir", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;
    std::istringstream pairs(slurp(dir / "catalog_pairs.csv"));
    const auto t = csv::read(pairs, {"id1", "id2", "R_km", "phi_deg", "dt_days", "eta"});
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_NEAR(csv::to_double(t.rows[0], t.column("dt_days"), "dt"), 1.69, 1e-9);
    EXPECT_EQ(t.rows[0].fields[t.column("phi_deg")], "");
    const auto summary = nlohmann::json::parse(slurp(dir / "catalog_summary.json"));
    EXPECT_EQ(summary["pairs"], 1);
    EXPECT_EQ(summary["row_errors"], 1);
    for (const char* f : {"catalog_survival_empirical.csv", "catalog_survival_poisson.csv", "catalog.manifest.json"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }
}

TEST_F(CliTest, CatalogDataErrors) {
    EXPECT_EQ(run({"catalog", path("missing.csv")}).code, cli::kExitData);
    write("empty.csv", "id,iso_time,lat,lon,depth_km,mw\n");
    EXPECT_EQ(run({"catalog", path("empty.csv")}).code, cli::kExitData);
    write("allbad.csv", "id,iso_time,lat,lon,depth_km,mw\na,2000-01-01,95,0,10,8\n");
    EXPECT_EQ(run({"catalog", path("allbad.csv")}).code, cli::kExitData);
    write("header.csv", "when,where\n");
    EXPECT_EQ(run({"catalog", path("header.csv")}).code, cli::kExitData);
    write("t2.csv", kTableRow2);
    EXPECT_EQ(run({"catalog", path("t2.csv"), "--T-days", "1", "--t0-days", "2"}).code, cli::kExitUsage);
}

TEST_F(CliTest, SyntheticPoissonCatalogHasUnitVariation) {
    ASSERT_EQ(run({"synth", "--rate", "3652.5", "--duration", "400", "--seed", "21", "--out", path("p.csv")}).code, 0);
    const auto r = run({"catalog", path("p.csv"), "--r-max", "0", "--out-dir", dir.string(), "--prefix", "p"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_GT(j["inter_event"]["n"].get<int>(), 3500);
    EXPECT_NEAR(j["inter_event"]["cv"].get<double>(), 1.0, 0.05);
    EXPECT_EQ(j["pairs"], 0);
}

TEST_F(CliTest, CatalogPairCapIsAUsageError) {
    ASSERT_EQ(run({"synth", "--rate", "365.25", "--duration", "100", "--out", path("s.csv")}).code, 0);
    const auto r = run({"catalog", path("s.csv"), "--max-pairs", "10", "--out-dir", dir.string()});
    EXPECT_EQ(r.code, cli::kExitUsage);
    EXPECT_NE(r.err.find("max_pairs"), std::string::npos);
}

TEST_F(CliTest, HazardBundledScenarioChecks) {
    const auto r = run({"hazard", QUAKESTAT_DATA_DIR "/newmadrid.scenario", "--check"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["moment_budget"]["alpha0_per_yr"].get<double>(), 1.27e-3, 0.03 * 1.27e-3);
    for (const auto& c : j["check"]) EXPECT_TRUE(c["pass"].get<bool>()) << c.dump();
}

TEST_F(CliTest, HazardCheckFailsOnDeviation) {
    write("fast.scenario", "zone_length_km = 240\nstrain_rate_per_yr = 3e-9\n");
    const auto r = run({"hazard", path("fast.scenario"), "--check"});
    EXPECT_EQ(r.code, cli::kExitData);
    EXPECT_NE(r.err.find("alpha0_per_yr"), std::string::npos) << r.err;
}

TEST_F(CliTest, HazardUncoupledZoneSerializesInf) {
    write("chi0.scenario", "zone_length_km = 240\nchi = 0\n");
    const auto r = run({"hazard", path("chi0.scenario"), "--out", path("chi0.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(path("chi0.json")));
    EXPECT_EQ(j["moment_budget"]["recurrence"][3]["recurrence_yr"], "inf");
    EXPECT_TRUE(fs::exists(path("chi0.json.manifest.json")));
}

TEST_F(CliTest, HazardMalformedScenario) {
    write("bad.scenario", "chi = lots\n");
    EXPECT_EQ(run({"hazard", path("bad.scenario")}).code, cli::kExitUsage);
    write("unknown.scenario", "colour = red\n");
    EXPECT_EQ(run({"hazard", path("unknown.scenario")}).code, cli::kExitUsage);
    write("band.scenario", "width_km = -20\n");
    EXPECT_EQ(run({"hazard", path("band.scenario")}).code, cli::kExitUsage);
    EXPECT_EQ(run({"hazard", path("absent.scenario")}).code, cli::kExitData);
}
