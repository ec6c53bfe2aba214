#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "test_support.hpp"

namespace adiabatic {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int status = -1;
  std::string out;
};

/// Runs the audit binary with `args`; stdout is captured, stderr goes to `err_path`.
RunResult audit(const std::string& args, const std::string& err_path = "/dev/null") {
  const std::string cmd = std::string(ADIABATIC_AUDIT_PATH) + " " + args + " 2>" + err_path;
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("adiabatic_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  fs::path dir_;
};

TEST_F(Cli, EvolveDeepAdiabatic) {
  const RunResult r = audit("evolve --omega0 100 --omega 1 --theta 1.0472 --tau 6.2832 --steps 200000");
  ASSERT_EQ(r.status, 0);
  const Json doc = Json::parse(r.out);
  EXPECT_EQ(doc["report"]["verdicts"]["approximation_valid"], true);
  EXPECT_EQ(doc["report"]["verdicts"]["condition_satisfied"], true);
  EXPECT_EQ(doc["grid"]["steps"], 200000);
  EXPECT_TRUE(doc.contains("necessity"));
}

TEST_F(Cli, EvolveFastField) {
  const RunResult r = audit("evolve --omega0 1 --omega 10 --theta 0.06 --out " + path("r.json").string());
  ASSERT_EQ(r.status, 0);
  const Json doc = Json::parse(slurp(path("r.json")));
  EXPECT_GE(doc["report"]["fidelity"]["min"].get<double>(), 0.995);
  const double rate_ratio = doc["report"]["bloch"]["rate_ratio"];
  EXPECT_GE(rate_ratio, 8.0);
  EXPECT_LE(rate_ratio, 12.0);
  EXPECT_EQ(doc["report"]["verdicts"]["approximation_valid"], false);
  EXPECT_FALSE(doc.contains("necessity"));
}

TEST_F(Cli, EvolveCsvAndTrajectory) {
  const RunResult r = audit("evolve --omega0 2 --omega 1 --theta 1 --steps 500 --tau 3 --format csv --trajectory-out " +
                            path("traj.csv").string());
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "t,fidelity,abs_c_1,abs_c_2,ratio_max_at_t");
  const std::string traj = slurp(path("traj.csv"));
  EXPECT_EQ(std::count(traj.begin(), traj.end(), '\n'), 502);
}

TEST_F(Cli, Deterministic) {
  const std::string args = "evolve --omega0 3 --omega 1 --theta 0.7 --series";
  const RunResult a = audit(args), b = audit(args);
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST_F(Cli, ValidationErrors) {
  const fs::path err = path("err.txt");
  const RunResult missing = audit("evolve --omega0 1 --omega 1", err.string());
  EXPECT_EQ(missing.status, 2);
  const std::string msg = slurp(err);
  EXPECT_EQ(std::count(msg.begin(), msg.end(), '\n'), 1);
  EXPECT_NE(msg.find("theta"), std::string::npos);

  EXPECT_EQ(audit("").status, 2);
  EXPECT_EQ(audit("evolve --omega0 1 --omega 1 --theta 4").status, 2);
  EXPECT_EQ(audit("evolve --omega0 -1 --omega 1 --theta 1").status, 2);
  EXPECT_EQ(audit("evolve --omega0 1 --omega 1 --theta 1 --format xml").status, 2);
  EXPECT_EQ(audit("evolve --omega0 1 --omega 1 --theta 1 --level 3").status, 2);
  EXPECT_EQ(audit("sweep-f --theta 1.0472 --r-min 0.01 --r-max 3 --points 1").status, 2);
  EXPECT_EQ(audit("condition --model " + path("missing.json").string()).status, 2);
}

TEST_F(Cli, SweepF) {
  const RunResult acute = audit("sweep-f --theta 1.0471975511965976 --r-min 0.01 --r-max 3 --points 300");
  ASSERT_EQ(acute.status, 0);
  const Json a = Json::parse(acute.out);
  EXPECT_NEAR(a["argmax"].get<double>(), 0.5, 1e-9);
  EXPECT_NEAR(a["max"].get<double>(), 1.0, 1e-9);
  EXPECT_EQ(a["table"].size(), 300u);

  const RunResult obtuse = audit("sweep-f --theta 2.0943951023931953 --r-min 0.01 --r-max 3 --points 300 "
                                 "--format csv --summary-out " + path("s.json").string());
  ASSERT_EQ(obtuse.status, 0);
  EXPECT_EQ(obtuse.out.substr(0, 4), "r,f\n");
  const Json s = Json::parse(slurp(path("s.json")));
  EXPECT_EQ(s["verdicts"]["strictly_decreasing"], true);
}

TEST_F(Cli, Counterexample) {
  const RunResult r = audit("counterexample --omega0 100 --omega 1 --theta 0.7853981633974483");
  ASSERT_EQ(r.status, 0);
  const Json doc = Json::parse(r.out);
  const double ra = doc["ratio_a"], rb = doc["ratio_b"];
  EXPECT_NEAR(rb, ra, 0.1 * ra);
  EXPECT_EQ(doc["at_least_one_invalid"], true);
  EXPECT_EQ(doc["approximation_valid_a"], true);
  EXPECT_EQ(doc["approximation_valid_b"], false);
}

TEST_F(Cli, CoarseGridIsANumericalFailure) {
  EXPECT_EQ(audit("counterexample --omega0 100 --omega 1 --theta 0.785 --steps 50").status, 3);
  EXPECT_EQ(audit("evolve --omega0 100 --omega 1 --theta 0.785 --tau 6.28 --steps 300").status, 3);
}

TEST_F(Cli, ConditionSpinHalf) {
  const RunResult r = audit("condition --omega0 1 --omega 0.1 --theta 1.5707963267948966");
  ASSERT_EQ(r.status, 0);
  EXPECT_NEAR(Json::parse(r.out)["max_ratio"].get<double>(), 0.05, 1e-4 * 0.05);
}

TEST_F(Cli, ConditionSampledModels) {
  const fs::path constant = write("constant.json", R"({"dim": 2, "times": [0, 1, 2],
      "matrices": [[[-1,0],[0,0],[0,0],[1,0]], [[-1,0],[0,0],[0,0],[1,0]], [[-1,0],[0,0],[0,0],[1,0]]]})");
  const RunResult ok = audit("condition --model " + constant.string());
  ASSERT_EQ(ok.status, 0);
  EXPECT_EQ(Json::parse(ok.out)["max_ratio"], 0.0);

  const fs::path identity = write("identity.json", R"({"dim": 2, "times": [0, 1],
      "matrices": [[[1,0],[0,0],[0,0],[1,0]], [[1,0],[0,0],[0,0],[1,0]]]})");
  const fs::path err = path("err.txt");
  EXPECT_EQ(audit("condition --model " + identity.string(), err.string()).status, 3);
  EXPECT_NE(slurp(err).find("DegenerateSpectrum"), std::string::npos);

  const fs::path three = fs::path(ADIABATIC_SOURCE_DIR) / "demos/data/three_level_rotation.json";
  const RunResult multi = audit("condition --series --model " + three.string());
  ASSERT_EQ(multi.status, 0);
  EXPECT_EQ(Json::parse(multi.out)["series"]["pairs"].size(), 6u);
}

TEST_F(Cli, Bloch) {
  const RunResult r = audit("bloch --omega0 1 --omega 10 --theta 0.06");
  ASSERT_EQ(r.status, 0);
  const Json doc = Json::parse(r.out);
  EXPECT_GE(doc["rate_ratio"].get<double>(), 8.0);
  EXPECT_EQ(doc["field_rate"], 10.0);
}

}  // namespace
}  // namespace adiabatic
