#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "sobrig/cli.hpp"

using namespace sobrig;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(RunConfig, RoundTripsThroughArgs) {
  std::ostringstream sink;
  RunConfig cfg;
  cfg.command = Command::rigidity;
  cfg.m = 5;
  cfg.p = 1.7;
  cfg.lambda_list = {0.25, 3.0, 1.0 / 3.0};
  cfg.g_spec = "rational:0.05";
  cfg.t_max = 30.0;
  cfg.step = 2e-3;
  cfg.tol = 1e-7;
  cfg.c_m = 0.4;
  cfg.gamma = std::nullopt;
  cfg.T = 2.5;
  cfg.output = Format::json;
  cfg.out_path = "/tmp/x.json";
  EXPECT_EQ(parse_run_config(cfg.to_args(), sink), cfg);
  RunConfig defaults;
  defaults.m = 4;
  defaults.p = 2.0;
  EXPECT_EQ(parse_run_config({"constants", "--m", "4", "--p", "2"}, sink), defaults);
}

TEST(RunConfig, UsageErrors) {
  std::ostringstream sink;
  EXPECT_THROW(parse_run_config({"constants", "--m", "4"}, sink), UsageError);
  EXPECT_THROW(parse_run_config({"bogus", "--m", "4", "--p", "2"}, sink), UsageError);
  EXPECT_THROW(parse_run_config({"verify", "--m", "4", "--p", "2", "--lambda", "1,-2"}, sink),
               UsageError);
  EXPECT_THROW(parse_run_config({"verify", "--m", "4", "--p", "2", "--output", "xml"}, sink),
               UsageError);
  EXPECT_THROW(parse_run_config({"rigidity", "--m", "4", "--p", "2", "--gamma", "often"}, sink),
               UsageError);
}

TEST(Cli, InvalidExponentsExitTwo) {
  const Outcome o = invoke({"constants", "--m", "2", "--p", "2"});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("m > p > 1"), std::string::npos);
  EXPECT_EQ(invoke({"constants", "--m", "4"}).code, 2);
}

TEST(Cli, ConstantsPassAndTightToleranceFails) {
  const Outcome ok = invoke({"constants", "--m", "4", "--p", "2"});
  EXPECT_EQ(ok.code, 0) << ok.err << ok.out;
  EXPECT_NE(ok.out.find("quantity,value"), std::string::npos);
  EXPECT_NE(ok.out.find("K,0.312189205698"), std::string::npos);
  const Outcome tight = invoke({"constants", "--m", "4", "--p", "2", "--tol", "1e-15"});
  EXPECT_EQ(tight.code, 1);
  EXPECT_NE(tight.err.find("exceeds tol"), std::string::npos);
}

TEST(Cli, ModelChecksAndNegativeControl) {
  EXPECT_EQ(invoke({"model", "--m", "4", "--p", "2", "--g", "rational:0.1"}).code, 0);
  const Outcome bad = invoke({"model", "--m", "4", "--p", "2", "--g", "cone:1.5"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_EQ(invoke({"model", "--m", "4", "--p", "2", "--g", "nonsense"}).code, 2);
}

TEST(Cli, VerifyEuclidean) {
  const Outcome o = invoke({"verify", "--m", "4", "--p", "2", "--g", "zero", "--lambda", "0.5,1,5"});
  EXPECT_EQ(o.code, 0) << o.out;
}

TEST(Cli, LimitsExample) {
  const Outcome o =
      invoke({"limits", "--m", "4", "--p", "2", "--T", "1", "--lambda", "10,100,1000,10000"});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("lambda,head,tail,sum"), std::string::npos);
  EXPECT_EQ(invoke({"limits", "--m", "4", "--p", "2"}).code, 2);
}

TEST(Cli, JsonReportIsDeterministicAndParses) {
  const std::vector<std::string> args{"rigidity", "--m", "4", "--p", "2", "--g", "zero",
                                      "--c-m", "0.35", "--gamma", "1", "--output", "json"};
  const Outcome a = invoke(args);
  const Outcome b = invoke(args);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.code, 0) << a.out << a.err;
  const auto doc = nlohmann::json::parse(a.out);
  EXPECT_EQ(doc.at("verdict"), "consistent");
  EXPECT_EQ(doc.at("mode"), "theorem1");
  EXPECT_EQ(doc.at("C2"), 0.0);
}

TEST(Cli, InconsistentSobolevConstantRejected) {
  const Outcome o =
      invoke({"rigidity", "--m", "4", "--p", "2", "--g", "zero", "--c-m", "0.2", "--gamma", "1"});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("violates C_M >= K(m,p)"), std::string::npos);
}

TEST(Cli, BoundedGrowthRefusesEstimate) {
  const Outcome o = invoke({"rigidity", "--m", "4", "--p", "2", "--g", "cone:0", "--t-max", "500",
                            "--step", "1e-2"});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("Sobolev inequality unsupported"), std::string::npos);
}
