#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gqem/cli/commands.hpp>

namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gqem_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write_config(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "gqem");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return gqem::cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static std::string without_wall_time(const std::string& text) {
    std::istringstream in(text);
    std::string line, kept;
    while (std::getline(in, line))
      if (line.find("wall_time_s") == std::string::npos) kept += line + "\n";
    return kept;
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, VerifySphereAllPasses) {
  const auto cfg = write_config("s.cfg", "family = sphere\nn = 3\ntau = 1\nm = 2\nsuite = all\npoints = 40\n");
  EXPECT_EQ(run({"verify", "--config", cfg, "--json", path("r.json")}), 0) << out_.str() << err_.str();
  const auto j = nlohmann::json::parse(slurp(path("r.json")));
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["identities"].size(), gqem::pointwise_identities().size());
  ASSERT_EQ(j["negative_controls"].size(), 2u);
  for (const auto& c : j["negative_controls"]) EXPECT_TRUE(c["rejected"].get<bool>());
  EXPECT_NE(out_.str().find("OVERALL PASS"), std::string::npos);
}

TEST_F(CliTest, HyperbolicRunCarriesSignNote) {
  const auto cfg = write_config("h.cfg", "family = hyperbolic\nn = 2\ntau = -0.5\nm = 1\npoints = 20\n");
  EXPECT_EQ(run({"verify", "--config", cfg, "--json", path("r.json")}), 0) << out_.str();
  const auto j = nlohmann::json::parse(slurp(path("r.json")));
  ASSERT_FALSE(j["notes"].empty());
  EXPECT_NE(j["notes"][0].get<std::string>().find("cosh"), std::string::npos);
}

TEST_F(CliTest, InvalidTauIsConfigErrorWithoutReport) {
  const auto cfg = write_config("bad.cfg", "family = sphere\nn = 2\ntau = 0.4\nm = 2\n");
  EXPECT_EQ(run({"verify", "--config", cfg, "--json", path("r.json")}), 2);
  EXPECT_NE(err_.str().find("tau"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("r.json")));
}

TEST_F(CliTest, IntegralsOnNoncompactModelAreRejected) {
  const auto cfg = write_config("e.cfg", "family = euclidean\nn = 2\ntau = 1\nm = 2\nsuite = integrals\n");
  EXPECT_EQ(run({"verify", "--config", cfg, "--json", path("r.json")}), 2);
  EXPECT_EQ(run({"integrate", "--config", cfg, "--json", path("r.json")}), 2);
  EXPECT_FALSE(fs::exists(path("r.json")));
  const auto st = write_config("st.cfg", "family = sphere\nchart = stereographic\nn = 2\ntau = 1\nm = 2\n");
  EXPECT_EQ(run({"integrate", "--config", st}), 2);
  EXPECT_NE(err_.str().find("polar"), std::string::npos);
}

TEST_F(CliTest, MalformedConfigsAreRejected) {
  const std::vector<std::string> bad{
      "family = sphere\nn = 3\ntau = 1\nm = 2\ncolour = red\n",
      "family = sphere\nn = 3\ntau = 1,\nm = 2\n",
      "family = sphere\nn = 3\ntau = 1\nm = -1\n",
      "family = sphere\nn = 3\ntau = 1\nm = 2\nm = 3\n",
      "family = sphere\nn = 3\ntau = 1\n",
      "family = torus\nn = 3\ntau = 1\nm = 2\n",
      "family = sphere\nn = 3\ntau = 1\nm = 2\nsuite = no_such_check\n",
      "family = sphere\nn = 3\ntau = 1\nm = 2\ngrid = 0x4x4\n",
      "family = sphere\nn = 3\ntau = 1\nm = 2\ntol.order2 = 0\n",
      "family = sphere\nn = 3\ntau = nope\nm = 2\n",
  };
  for (std::size_t k = 0; k < bad.size(); ++k) {
    const auto cfg = write_config("b" + std::to_string(k) + ".cfg", bad[k]);
    EXPECT_EQ(run({"verify", "--config", cfg}), 2) << bad[k];
    EXPECT_FALSE(err_.str().empty());
  }
  EXPECT_NE(([&] {
              run({"verify", "--config", write_config("u.cfg", bad[0])});
              return err_.str();
            }())
                .find("unknown config key 'colour'"),
            std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"frobnicate"}), 2);
  EXPECT_EQ(run({"verify"}), 2);
  EXPECT_EQ(run({"verify", "--config", path("missing.cfg")}), 2);
  EXPECT_EQ(run({"--help"}), 0);
  EXPECT_NE(out_.str().find("verify"), std::string::npos);
  const auto cfg = write_config("s.cfg", "family = sphere\nn = 2\ntau = 1\nm = 2\n");
  EXPECT_EQ(run({"verify", "--config", cfg, "--tol-scale", "0"}), 2);
  const auto list = write_config("l.cfg", "family = sphere\nn = 2,3\ntau = 1\nm = 2\n");
  EXPECT_EQ(run({"verify", "--config", list}), 2);
}

TEST_F(CliTest, ToleranceFailureExitsOne) {
  const auto cfg = write_config("s.cfg", "family = sphere\nn = 2\ntau = 1\nm = 2\nsuite = defining_eq\npoints = 10\n");
  EXPECT_EQ(run({"verify", "--config", cfg, "--tol-scale", "1e-30"}), 1);
  EXPECT_NE(out_.str().find("OVERALL FAIL"), std::string::npos);
}

TEST_F(CliTest, ScanCsvHasOneRowPerCombinationAndIdentity) {
  const auto cfg = write_config(
      "scan.cfg", "family = sphere\nn = 2,3\ntau = 1,3\nm = 1,inf\nsuite = defining_eq,u_transform_eq\npoints = 10\n");
  EXPECT_EQ(run({"scan", "--config", cfg, "--csv", path("s.csv"), "--json", path("s.json")}), 0) << err_.str();
  std::istringstream csv(slurp(path("s.csv")));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "n,m,tau,identity,max_residual,pass");
  int rows = 0, u_rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    if (line.find("u_transform_eq") != std::string::npos) {
      ++u_rows;
      EXPECT_EQ(line.find(",inf,"), std::string::npos);
    }
  }
  // 8 combinations; u_transform_eq is skipped for the 4 with m = inf
  EXPECT_EQ(rows, 8 + 4);
  EXPECT_EQ(u_rows, 4);
  const auto j = nlohmann::json::parse(slurp(path("s.json")));
  EXPECT_EQ(j["skipped"].size(), 4u);
  EXPECT_EQ(j["rows"].size(), 12u);
}

TEST_F(CliTest, ScanValidatesEveryCombinationFirst) {
  const auto cfg = write_config("scan.cfg", "family = sphere\nn = 2,3\ntau = 1,0.4\nm = 2\nsuite = defining_eq\n");
  EXPECT_EQ(run({"scan", "--config", cfg, "--csv", path("s.csv")}), 2);
  EXPECT_FALSE(fs::exists(path("s.csv")));
  EXPECT_TRUE(out_.str().empty());
}

TEST_F(CliTest, IntegrateReportsChecksAndSanity) {
  const auto cfg = write_config("i.cfg", "family = sphere\nn = 2\ntau = 1\nm = 3\ngrid = 32x64\n");
  EXPECT_EQ(run({"integrate", "--config", cfg, "--json", path("i.json")}), 0) << out_.str();
  const auto j = nlohmann::json::parse(slurp(path("i.json")));
  EXPECT_EQ(j["integrals"].size(), gqem::integral_catalog().size());
  EXPECT_EQ(j["sanity"].size(), 4u);
  for (const auto& c : j["integrals"]) EXPECT_TRUE(c["pass"].get<bool>()) << c.dump();
  const auto pw = write_config("p.cfg", "family = sphere\nn = 2\ntau = 1\nm = 3\nsuite = defining_eq\n");
  EXPECT_EQ(run({"integrate", "--config", pw}), 2);
}

TEST_F(CliTest, CatalogListsEveryEntry) {
  EXPECT_EQ(run({"catalog", "--json", path("c.json")}), 0);
  const auto j = nlohmann::json::parse(slurp(path("c.json")));
  const auto expected =
      gqem::pointwise_identities().size() + gqem::sample_catalog().size() + gqem::integral_catalog().size();
  ASSERT_EQ(j["entries"].size(), expected);
  std::set<std::string> ids;
  for (const auto& e : j["entries"]) {
    EXPECT_FALSE(e["anchor"].get<std::string>().empty());
    EXPECT_FALSE(e["tag"].get<std::string>().empty());
    ids.insert(e["id"].get<std::string>());
  }
  EXPECT_EQ(ids.size(), expected);
  EXPECT_EQ(out_.str(), slurp(path("c.json")));
}

TEST_F(CliTest, ReportsAreDeterministic) {
  const auto cfg = write_config("s.cfg", "family = sphere\nn = 2\ntau = 1\nm = 2\npoints = 30\nseed = 7\n");
  ASSERT_EQ(run({"verify", "--config", cfg, "--json", path("a.json")}), 0);
  const auto out_a = out_.str();
  ASSERT_EQ(run({"verify", "--config", cfg, "--json", path("b.json")}), 0);
  EXPECT_EQ(out_a, out_.str());
  EXPECT_EQ(without_wall_time(slurp(path("a.json"))), without_wall_time(slurp(path("b.json"))));
  ASSERT_EQ(run({"verify", "--config", cfg, "--seed", "8", "--json", path("c.json")}), 0);
  EXPECT_NE(without_wall_time(slurp(path("a.json"))), without_wall_time(slurp(path("c.json"))));
  EXPECT_EQ(nlohmann::json::parse(slurp(path("c.json")))["config"]["seed"], 8);
}

}  // namespace
