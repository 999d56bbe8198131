// Copyright 2026 The sstoken Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sstoken/cli.hpp"

#include <filesystem>
#include <sstream>

#include "gtest/gtest.h"

using namespace sstoken;
using json = nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("sstoken_cli_test_" + name)).string();
}

}  // namespace

TEST(Cli, synth_ghz_round_trips) {
  const std::string path = temp_path("g.qc");
  const CliRun r = invoke({"synth", "--kind", "ghz", "--n", "3", "-o", path});
  ASSERT_EQ(r.code, 0) << r.err;
  const json env = json::parse(r.out);
  EXPECT_EQ(env["command"], "synth");
  EXPECT_EQ(env["version"], cli::kFormatVersion);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(synth::parse(text), synth::ghz_circuit(3));
}

TEST(Cli, synth_schedule_layout) {
  const CliRun r = invoke({"synth", "--kind", "schedule", "--n", "3", "--order", "0,1,2", "-o", temp_path("s.qc")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json env = json::parse(r.out);
  EXPECT_EQ(env["result"]["x_qubits"], 3);
  EXPECT_EQ(env["result"]["ancillas"], 3);
  EXPECT_EQ(invoke({"synth", "--kind", "schedule", "--n", "3", "--order", "0,5", "-o", temp_path("bad.qc")}).code, 2);
  EXPECT_EQ(invoke({"synth", "--kind", "schedule", "--n", "3", "--order", "0,,1", "-o", temp_path("bad.qc")}).code, 2);
}

TEST(Cli, simulate_distributions) {
  const std::string w = temp_path("w.qc");
  ASSERT_EQ(invoke({"synth", "--kind", "w", "--n", "2", "-o", w}).code, 0);
  const CliRun r = invoke({"simulate", w});
  ASSERT_EQ(r.code, 0) << r.err;
  const json probs = json::parse(r.out)["result"]["distribution"]["probs"];
  EXPECT_EQ(probs.size(), 2u);
  EXPECT_DOUBLE_EQ(probs["10"].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(probs["01"].get<double>(), 0.5);

  const std::string fig4 = temp_path("fig4.qc");
  ASSERT_EQ(invoke({"synth", "--kind", "schedule", "--n", "3", "--order", "0", "-o", fig4}).code, 0);
  const CliRun csv = invoke({"simulate", fig4, "--marginal", "x", "--format", "csv"});
  EXPECT_EQ(csv.out,
            "outcome,probability\n001,0.250000000000\n011,0.250000000000\n"
            "100,0.250000000000\n110,0.250000000000\n");
  const json all = json::parse(invoke({"simulate", fig4, "--marginal", "all"}).out);
  EXPECT_EQ(all["result"]["distribution"]["width"], 4);
}

TEST(Cli, simulate_shots_are_deterministic) {
  const std::string fig7 = temp_path("fig7.qc");
  ASSERT_EQ(invoke({"synth", "--kind", "schedule", "--n", "3", "--order", "0,1,2", "-o", fig7}).code, 0);
  const CliRun a = invoke({"simulate", fig7, "--shots", "8192", "--seed", "7"});
  const CliRun b = invoke({"simulate", fig7, "--shots", "8192", "--seed", "7"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const json counts = json::parse(a.out)["result"]["counts"]["counts"];
  EXPECT_EQ(counts["000"].get<int>() + counts["111"].get<int>(), 8192);
  EXPECT_EQ(invoke({"simulate", fig7, "--shots", "10"}).code, 2);
}

TEST(Cli, simulate_parse_error_is_usage_error) {
  const std::string bad = temp_path("bad_text.qc");
  std::ofstream(bad) << "qubits 3\nh 99\nmeasure 0\n";
  const CliRun r = invoke({"simulate", bad});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
  EXPECT_EQ(invoke({"simulate", temp_path("does_not_exist.qc")}).code, 2);
}

TEST(Cli, verify_exit_codes) {
  EXPECT_EQ(invoke({"verify", "--n", "3", "--order", "0,1,2", "--tol", "1e-9"}).code, 0);
  EXPECT_EQ(invoke({"verify", "--n", "3", "--order", "0", "--tol", "1e-9"}).code, 0);
  EXPECT_EQ(invoke({"verify", "--n", "4", "--order", "0,1,2,3,0", "--tol", "1e-9"}).code, 0);
  const CliRun faulted = invoke({"verify", "--n", "3", "--order", "0,1,2", "--fault", "3:1"});
  ASSERT_EQ(faulted.code, 0);
  const json per = json::parse(faulted.out)["result"]["per_outcome"];
  EXPECT_DOUBLE_EQ(per["010"]["expected"].get<double>(), 0.5);
  EXPECT_EQ(invoke({"verify", "--n", "3", "--order", "0", "--fault", "9:1"}).code, 2);
  EXPECT_EQ(invoke({"verify", "--order", "0"}).code, 2);
}

TEST(Cli, verify_paper_figures) {
  for (const char* fig : {"1", "2", "4", "7"}) {
    const CliRun r = invoke({"verify", "--paper-figure", fig});
    EXPECT_EQ(r.code, 0) << fig << r.out;
  }
  EXPECT_EQ(invoke({"verify", "--paper-figure", "3"}).code, 2);
  // A negative tolerance can never pass: verification failure, not usage error.
  EXPECT_EQ(invoke({"verify", "--paper-figure", "7", "--tol", "-1"}).code, 1);
}

TEST(Cli, modelcheck) {
  const CliRun r = invoke({"modelcheck", "--n", "3"});
  ASSERT_EQ(r.code, 0);
  const json res = json::parse(r.out)["result"];
  EXPECT_TRUE(res["closure"]["holds"].get<bool>());
  EXPECT_TRUE(res["convergence"]["holds"].get<bool>());
  EXPECT_EQ(res["convergence"]["max_moves_to_legitimate"], 1);
  EXPECT_EQ(invoke({"modelcheck", "--n", "5"}).code, 0);
  const CliRun big = invoke({"modelcheck", "--n", "25"});
  EXPECT_EQ(big.code, 2);
  EXPECT_TRUE(big.out.empty());
}

TEST(Cli, trace) {
  const CliRun r = invoke({"trace", "--n", "3", "--start", "000", "--policy", "round-robin", "--steps", "6"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json steps = json::parse(r.out)["result"]["steps"];
  ASSERT_EQ(steps.size(), 6u);
  EXPECT_EQ(steps[5]["after"], "000");
  // one step per line
  EXPECT_NE(r.out.find("{\"after\":\"100\""), std::string::npos);

  const json adv = json::parse(invoke({"trace", "--n", "3", "--start", "010", "--policy", "adversarial", "--steps", "3"}).out);
  EXPECT_TRUE(adv["result"]["steps"][0]["legitimate"].get<bool>());

  const json faulted =
      json::parse(invoke({"trace", "--n", "3", "--start", "000", "--steps", "4", "--fault", "2:1"}).out);
  EXPECT_EQ(faulted["result"]["steps"][2]["kind"], "fault");
  EXPECT_TRUE(faulted["result"]["final_legitimate"].get<bool>());

  EXPECT_EQ(invoke({"trace", "--n", "3", "--start", "0a0", "--steps", "1"}).code, 2);
  EXPECT_EQ(invoke({"trace", "--n", "4", "--start", "000", "--steps", "1"}).code, 2);
  EXPECT_EQ(invoke({"trace", "--n", "3", "--start", "000", "--policy", "random", "--steps", "1"}).code, 2);
  EXPECT_EQ(invoke({"trace", "--n", "3", "--start", "000", "--policy", "fixed", "--steps", "1"}).code, 2);
  const CliRun fixed = invoke({"trace", "--n", "3", "--start", "000", "--policy", "fixed", "--schedule", "0,0", "--steps", "2"});
  EXPECT_EQ(json::parse(fixed.out)["result"]["steps"][1]["kind"], "skipped");
}

TEST(Cli, entangle_report) {
  const CliRun r = invoke({"entangle-report", "--n", "3", "--order", "0,1,2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  for (const auto& s : doc["result"]["per_qubit_entropy"]) EXPECT_NEAR(s.get<double>(), 1.0, 1e-9);
  EXPECT_EQ(r.out, invoke({"entangle-report", "--n", "3", "--order", "0,1,2"}).out);
  EXPECT_EQ(invoke({"entangle-report", "--n", "2", "--order", "0"}).code, 0);
  EXPECT_EQ(invoke({"entangle-report", "--n", "30", "--order", "0"}).code, 2);
}

TEST(Cli, usage_errors) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"bogus"}).code, 2);
  EXPECT_EQ(invoke({"synth", "--kind", "qft", "--n", "3", "-o", "x"}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}
