#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("beta_tails_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Outcome run(const std::string& args) const {
    const std::string err = path("stderr.txt");
    const std::string cmd = std::string(BETA_TAILS_EXE) + " " + args + " > " + path("stdout.txt") + " 2> " + err;
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  fs::path dir_;
};

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string header_of(const std::string& csv) {
  for (const auto& l : lines_of(csv))
    if (!l.empty() && l[0] != '#') return l;
  return "";
}

std::vector<std::vector<std::string>> data_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  bool header = true;
  for (const auto& l : lines_of(csv)) {
    if (l.empty() || l[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream in(l);
    for (std::string c; std::getline(in, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

bool has_line(const std::string& text, const std::string& line) {
  for (const auto& l : lines_of(text))
    if (l == line) return true;
  return false;
}

}  // namespace

TEST_F(Cli, HelpExitsZero) { EXPECT_EQ(run("--help").code, 0); }

TEST_F(Cli, MissingSubcommandIsConfigError) { EXPECT_EQ(run("").code, 2); }

TEST_F(Cli, UnknownSubcommandIsConfigError) { EXPECT_EQ(run("frobnicate --output " + path("x")).code, 2); }

TEST_F(Cli, UnknownFlagIsNamed) {
  const auto r = run("ensemble-sample --n 10 --reps 2 --bogus-flag 3 --output " + path("x.csv"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--bogus-flag"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("x.csv")));
}

TEST_F(Cli, MissingOutputIsConfigError) { EXPECT_EQ(run("rate-fn").code, 2); }

TEST_F(Cli, InvalidValuesAreConfigErrors) {
  EXPECT_EQ(run("ensemble-sample --beta -1 --output " + path("a.csv")).code, 2);
  EXPECT_EQ(run("ensemble-sample --kind jacobi --output " + path("a.csv")).code, 2);
  EXPECT_EQ(run("ensemble-sample --kind laguerre --n 10 --m 5 --output " + path("a.csv")).code, 2);
  EXPECT_EQ(run("ensemble-sample --n 10 --format xml --output " + path("a.csv")).code, 2);
  EXPECT_EQ(run("lil --schedule spiral:1:2:3 --output " + path("a.csv")).code, 2);
  EXPECT_EQ(run("rate-fn --eps -1 --output " + path("a.json")).code, 2);
  EXPECT_FALSE(fs::exists(path("a.csv")));
  EXPECT_FALSE(fs::exists(path("a.json")));
}

TEST_F(Cli, UnwritableOutputIsConfigError) {
  EXPECT_EQ(run("rate-fn --output " + path("missing_dir/out.json")).code, 2);
}

TEST_F(Cli, NumericalFailureExitsThreeAndKeepsTable) {
  // Thresholds far in the right tail: no hits, so the fit has no usable points.
  const auto r = run("tail-fit --kind hermite --n 50 --reps 500 --t-grid 6,7,8 --output " + path("t.csv"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("usable"), std::string::npos);
  const auto csv = slurp(path("t.csv"));
  EXPECT_EQ(header_of(csv), "t,p_hat,wilson_lo,wilson_hi,reps");
  EXPECT_EQ(data_rows(csv).size(), 3u);
  const auto manifest = json::parse(slurp(path("t.csv.manifest.json")));
  EXPECT_EQ(manifest["exit_code"], 3);
}

TEST_F(Cli, ConfigFileSuppliesDefaultsAndFlagsOverride) {
  write("a.cfg", "# sweep point\nn = 40\nreps=7\nkind=laguerre\n\n");
  ASSERT_EQ(run("ensemble-sample --config " + path("a.cfg") + " --n 30 --output " + path("a.csv")).code, 0);
  const auto csv = slurp(path("a.csv"));
  EXPECT_TRUE(has_line(csv, "# n=30"));
  EXPECT_TRUE(has_line(csv, "# reps=7"));
  EXPECT_TRUE(has_line(csv, "# kind=laguerre"));
  EXPECT_EQ(data_rows(csv).size(), 7u);

  ASSERT_EQ(run("ensemble-sample --n 30 --reps 7 --kind laguerre --output " + path("b.csv")).code, 0);
  EXPECT_EQ(csv, slurp(path("b.csv")));
}

TEST_F(Cli, ConfigFileFlagValues) {
  write("d.cfg", "half-space=true\nreps=200\n");
  ASSERT_EQ(run("dist-equal --config " + path("d.cfg") + " --n 4 --output " + path("d.json")).code, 0);
  const auto j = json::parse(slurp(path("d.json")));
  EXPECT_EQ(j["config"]["half-space"], "true");
  EXPECT_TRUE(j.contains("half_space"));
}

TEST_F(Cli, UnknownConfigKeyIsNamed) {
  write("bad.cfg", "n=10\nwibble=3\n");
  const auto r = run("ensemble-sample --config " + path("bad.cfg") + " --output " + path("a.csv"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("wibble"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("a.csv")));
}

TEST_F(Cli, MalformedConfigLine) {
  write("bad.cfg", "n 10\n");
  EXPECT_EQ(run("ensemble-sample --config " + path("bad.cfg") + " --output " + path("a.csv")).code, 2);
}

TEST_F(Cli, ManifestEchoesFullConfig) {
  ASSERT_EQ(run("lpp-run --n 20 --reps 4 --workers 2 --seed 11 --output " + path("l.csv")).code, 0);
  const auto m = json::parse(slurp(path("l.csv.manifest.json")));
  EXPECT_EQ(m["command"], "lpp-run");
  EXPECT_FALSE(m["version"].get<std::string>().empty());
  EXPECT_GE(m["wall_time_seconds"].get<double>(), 0.0);
  EXPECT_EQ(m["exit_code"], 0);
  EXPECT_EQ(m["config"]["seed"], "11");
  EXPECT_EQ(m["config"]["n"], "20");
  EXPECT_EQ(m["config"]["workers"], 2);
  EXPECT_EQ(m["config"]["output"], path("l.csv"));
  // The output itself embeds its generating config.
  const auto csv = slurp(path("l.csv"));
  EXPECT_TRUE(has_line(csv, "# command=lpp-run"));
  EXPECT_TRUE(has_line(csv, "# seed=11"));
  EXPECT_TRUE(has_line(csv, "# convention=exclude_initial"));
}

TEST_F(Cli, ByteIdenticalAcrossWorkerCounts) {
  const std::vector<std::string> cmds{
      "ensemble-sample --kind laguerre --beta 1 --n 60 --reps 300",
      "tail-fit --kind hermite --n 80 --reps 3000 --side left --t-grid 1,1.5,2",
      "tail-fit --kind p2l --n 20 --reps 500 --t-grid 0.5,1,1.5",
      "qform-check --n 200 --t 4 --reps 500",
      "riccati --n 500 --reps 500 --t-grid 1,2",
      "lpp-run --kind hs --n 30 --reps 200",
      "dist-equal --n 6 --reps 300 --half-space",
      "tf-scan --kind p2l --sizes 8,16,32 --fields 200",
  };
  for (const auto& c : cmds) {
    ASSERT_LE(run(c + " --workers 1 --output " + path("w1")).code, 3) << c;
    ASSERT_LE(run(c + " --workers 3 --output " + path("w3")).code, 3) << c;
    const auto a = slurp(path("w1"));
    EXPECT_FALSE(a.empty()) << c;
    EXPECT_EQ(a, slurp(path("w3"))) << c;
  }
}

TEST_F(Cli, LilRerunIsByteIdentical) {
  const std::string args = "lil --kind p2p --schedule geometric:1.15:16:30000 --seed 7 --output ";
  ASSERT_EQ(run(args + path("a.csv")).code, 0);
  ASSERT_EQ(run(args + path("b.csv")).code, 0);
  const auto a = slurp(path("a.csv"));
  EXPECT_EQ(a, slurp(path("b.csv")));
  EXPECT_EQ(header_of(a), "k,n_k,T,norm_plus,norm_minus,run_max_plus,run_min_minus");
  const auto rows = data_rows(a);
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows.front()[1], "16");
  EXPECT_LE(std::stoll(rows.back()[1]), 30000);
}

TEST_F(Cli, TailFitSchema) {
  ASSERT_EQ(run("tail-fit --beta 2 --kind hermite --n 500 --side right --t-grid 1,1.5,2,2.5,3 --reps 200000 --seed 7 "
                "--output " +
                path("t.csv"))
                .code,
            0);
  const auto csv = slurp(path("t.csv"));
  EXPECT_EQ(header_of(csv), "t,p_hat,wilson_lo,wilson_hi,reps");
  const auto rows = data_rows(csv);
  ASSERT_EQ(rows.size(), 5u);
  for (const auto& r : rows) {
    ASSERT_EQ(r.size(), 5u);
    EXPECT_EQ(r[4], "200000");
    EXPECT_LE(std::stod(r[2]), std::stod(r[1]));
    EXPECT_GE(std::stod(r[3]), std::stod(r[1]));
  }
  for (const char* key : {"coefficient", "power", "r2"}) {
    bool found = false;
    for (const auto& l : lines_of(csv)) found = found || l.rfind(std::string("# summary.fit.") + key + "=", 0) == 0;
    EXPECT_TRUE(found) << key;
  }
  EXPECT_TRUE(has_line(csv, "# summary.fit.power=1.5"));
}

TEST_F(Cli, DistEqualSchema) {
  ASSERT_EQ(run("dist-equal --n 15 --reps 10000 --seed 7 --output " + path("d.json")).code, 0);
  const auto j = json::parse(slurp(path("d.json")));
  ASSERT_TRUE(j.contains("ks_statistic"));
  ASSERT_TRUE(j.contains("p_value"));
  ASSERT_TRUE(j.contains("conventions"));
  EXPECT_GE(j["ks_statistic"].get<double>(), 0.0);
  EXPECT_LE(j["ks_statistic"].get<double>(), 1.0);
  EXPECT_GE(j["p_value"].get<double>(), 0.0);
  EXPECT_LE(j["p_value"].get<double>(), 1.0);
  EXPECT_EQ(j["conventions"]["passage"], "include_both");
  EXPECT_FALSE(j.contains("half_space"));
}

TEST_F(Cli, RateFnJson) {
  ASSERT_EQ(run("rate-fn --eps 1e-4,1e-2 --output " + path("r.json")).code, 0);
  const auto j = json::parse(slurp(path("r.json")));
  ASSERT_EQ(j["rows"].size(), 2u);
  EXPECT_NEAR(j["rows"][0]["ratio"].get<double>(), 1.0 / 6.0, 1e-3);
  EXPECT_DOUBLE_EQ(j["rows"][0]["J"].get<double>() / std::pow(1e-4, 1.5), j["rows"][0]["ratio"].get<double>());
}

TEST_F(Cli, TfScanSchema) {
  ASSERT_EQ(run("tf-scan --sizes 10,20,40 --fields 200 --output " + path("t.csv")).code, 0);
  const auto csv = slurp(path("t.csv"));
  EXPECT_EQ(header_of(csv), "n,std_psi,count");
  const auto rows = data_rows(csv);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][0], "10");
  EXPECT_EQ(rows[2][2], "200");
}

TEST_F(Cli, CsvRoundTripsJsonValues) {
  const std::string args = "ensemble-sample --n 40 --reps 20 --beta 1.5";
  ASSERT_EQ(run(args + " --output " + path("a.csv")).code, 0);
  ASSERT_EQ(run(args + " --format json --output " + path("a.json")).code, 0);
  const auto rows = data_rows(slurp(path("a.csv")));
  const auto j = json::parse(slurp(path("a.json")));
  ASSERT_EQ(rows.size(), j["rows"].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(std::strtod(rows[i][1].c_str(), nullptr), j["rows"][i]["raw_lambda_max"].get<double>());
    EXPECT_EQ(std::strtod(rows[i][2].c_str(), nullptr), j["rows"][i]["scaled"].get<double>());
    EXPECT_EQ(rows[i][1].find('e'), std::string::npos);
  }
}

TEST_F(Cli, ValidationPrecedesSampling) {
  // Would take hours if sampling started before the reps check.
  EXPECT_EQ(run("tail-fit --n 5000 --reps 10 --output " + path("t.csv")).code, 2);
  EXPECT_EQ(run("tf-scan --sizes 100,200 --output " + path("t.csv")).code, 2);
  EXPECT_FALSE(fs::exists(path("t.csv")));
}
