#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "raddich/io.hpp"

namespace fs = std::filesystem;
using raddich::io::json;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("raddich_cli_" + std::string(
        ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  fs::path write(const std::string& name, const std::string& text) {
    auto p = dir / name;
    raddich::io::write_atomic(p, text);
    return p;
  }
  int run(const std::string& args) {
    const std::string cmd = "\"" RADDICH_CLI "\" " + args + " 2>\"" + (dir / "stderr.txt").string() + "\"";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }
  std::string stderr_text() { return raddich::io::read_file(dir / "stderr.txt"); }
  std::string read(const std::string& name) { return raddich::io::read_file(dir / name); }
  std::string out(const std::string& name) { return " --out \"" + (dir / name).string() + "\""; }

  fs::path dir;
};

}  // namespace

TEST_F(Cli, SpectrumIdentity) {
  auto cfg = write("id2.json", R"({"d":2,"V":[[[1,0],[0,0]],[[0,0],[1,0]]]})");
  ASSERT_EQ(run("spectrum --format json --config \"" + cfg.string() + "\"" + out("r.json")), 0);
  auto j = json::parse(read("r.json"));
  EXPECT_TRUE(j["hypotheses"]["h1"].get<bool>());
  EXPECT_TRUE(j["hypotheses"]["h2"].get<bool>());
  EXPECT_EQ(j["eigenvalues"].size(), 2u);
}

TEST_F(Cli, VerifyLemmasIsReproducible) {
  ASSERT_EQ(run("verify-lemmas --lemma A8 --count 1000 --seed 7" + out("a.json")), 0);
  ASSERT_EQ(run("verify-lemmas --lemma A8 --count 1000 --seed 7" + out("b.json")), 0);
  EXPECT_EQ(read("a.json"), read("b.json"));
  auto j = json::parse(read("a.json"));
  ASSERT_EQ(j.size(), 12u);
  for (const auto& rec : j) {
    EXPECT_EQ(rec["lemma"], "A8");
    EXPECT_TRUE(rec["pass"].get<bool>());
    EXPECT_TRUE(rec["worst_sample"]["lambda"].is_array());
    for (const char* k : {"mu", "r1", "r2"}) EXPECT_TRUE(rec["worst_sample"].contains(k));
  }
  ASSERT_EQ(run("verify-lemmas --lemma A8 --count 1000 --seed 8" + out("c.json")), 0);
  EXPECT_NE(read("a.json"), read("c.json"));
}

TEST_F(Cli, HypothesisViolationExitsTwo) {
  auto cfg = write("neg.json", R"({"d":1,"V":[[[-1,0]]]})");
  auto bc = write("bc.json", R"({"r0":1,"r1":3,"inner":{"n":3,"K":0,"d":1,"coeffs":[[1,0]]}})");
  EXPECT_EQ(run("solve --config \"" + cfg.string() + "\" --bc \"" + bc.string() + "\"" + out("s.csv")), 2);
  auto diag = json::parse(stderr_text());
  EXPECT_EQ(diag["code"], "HypothesisViolation");
  EXPECT_FALSE(diag["hypotheses"]["h1"].get<bool>());
  EXPECT_FALSE(fs::exists(dir / "s.csv"));
  EXPECT_EQ(run("spectrum --config \"" + cfg.string() + "\"" + out("r.json")), 2);
  EXPECT_EQ(run("dichotomy --config \"" + cfg.string() + "\"" + out("d.csv")), 2);
  EXPECT_EQ(run("verify-lemmas --lemma A2 --count 10 --config \"" + cfg.string() + "\"" + out("v.json")), 2);
}

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  auto bad = write("bad.json", R"({"d":1,"V":[[[1,0]]],"colour":"red"})");
  EXPECT_EQ(run("spectrum --config \"" + bad.string() + "\""), 1);
  EXPECT_EQ(json::parse(stderr_text())["code"], "ConfigError");
  EXPECT_EQ(run("verify-lemmas --lemma A9 --count 10"), 1);
  EXPECT_EQ(run("spectrum --config \"" + (dir / "missing.json").string() + "\""), 1);
}

TEST_F(Cli, SymbolsDumpCsv) {
  ASSERT_EQ(run("symbols dump --lambda 1,0 --mu 4 --r-min 1 --r-max 3 --points 3" + out("s.csv")), 0);
  EXPECT_EQ(read("s.csv"),
            "r,gamma_re,gamma_im,dgamma_re,dgamma_im\n"
            "1,2.23606797749979,0,-1.7888543819998317,0\n"
            "2,1.4142135623730951,0,-0.35355339059327373,0\n"
            "3,1.2018504251546631,0,-0.12326671027227314,0\n");
  EXPECT_EQ(run("symbols dump --lambda -1,0 --mu 0" + out("cut.csv")), 2);
}

TEST_F(Cli, DichotomyAndSolveOutputs) {
  auto cfg = write("c.json", R"({"d":1,"V":[[[1,0]]],"K":1})");
  const std::string c = " --config \"" + cfg.string() + "\"";
  ASSERT_EQ(run("dichotomy --r-from 1 --r-to 3" + c + out("e.csv")), 0);
  auto field = raddich::io::field_from_csv(read("e.csv"), {3, 1}, 1, raddich::Basis::canonical);
  EXPECT_NEAR(field.coeffs()[0].real(), std::exp(-2.0), 1e-10);
  ASSERT_EQ(run("dichotomy rates" + c + out("rates.json")), 0);
  auto rates = json::parse(read("rates.json"));
  EXPECT_NEAR(rates["eta"].get<double>(), 1.0, 1e-3);
  EXPECT_TRUE(rates["meets_floor"].get<bool>());

  auto bc = write("bc.json", R"({"r0":1,"r1":3,"inner":{"n":3,"K":1,"d":1,"coeffs":[[1,0],[0,0],[0,0],[0,0]]},
                                 "outer":{"n":3,"K":1,"d":1,"coeffs":[[0,0],[0,0],[0,0],[0,0]]}})");
  ASSERT_EQ(run("solve --N 64 --bc \"" + bc.string() + "\"" + c + out("sol.csv")), 0);
  const std::string sol = read("sol.csv");
  EXPECT_EQ(sol.substr(0, 14), "k,j,l,r,re,im\n");
  EXPECT_NE(sol.find("\n0,1,1,3,0,0\n"), std::string::npos);
  ASSERT_EQ(run("solve --N 64 --r1 2 --bc \"" + bc.string() + "\"" + c + out("sol2.csv")), 0);
  EXPECT_NE(read("sol2.csv").find("\n0,1,1,2,0,0\n"), std::string::npos);
}

TEST_F(Cli, ConfigFlagsOverride) {
  auto cfg = write("c.json", R"({"d":1,"V":[[[1,0]]],"K":1,"format":"json"})");
  ASSERT_EQ(run("dichotomy --K 0 --format csv --config \"" + cfg.string() + "\"" + out("e.csv")), 0);
  const std::string text = read("e.csv");
  // Default span 1 -> 5 with lambda = 1: factor e^{-4}.
  EXPECT_EQ(text, "k,j,l,re,im\n0,1,1,0.01831563888873418,0\n");
}
