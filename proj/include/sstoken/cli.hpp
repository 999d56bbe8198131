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

#ifndef SSTOKEN_CLI_HPP_
#define SSTOKEN_CLI_HPP_

// Command dispatch for the `sstoken` tool. Every successful JSON run writes
// one envelope {"command", "params", "result", "version"} to `out`.
// Exit codes: 0 success, 1 verification failure, 2 usage error (nothing is
// written to `out` in that case).

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sstoken/errors.hpp"
#include "sstoken/qsim.hpp"
#include "sstoken/ring.hpp"
#include "sstoken/synth.hpp"
#include "sstoken/verify.hpp"

namespace sstoken::cli {

using json = nlohmann::json;

inline constexpr const char* kFormatVersion = "sstoken/1";

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsage = 2 };

namespace detail {

/// Rounds to 12 decimal digits for printing.
inline double round12(double p) { return std::round(p * 1e12) / 1e12; }

inline json to_json(const qsim::Distribution& d) {
  json probs = json::object();
  for (const auto& [k, p] : d.probs) probs[k] = round12(p);
  return {{"width", d.width}, {"probs", probs}};
}

inline json to_json(const qsim::ShotCounts& s) {
  json counts = json::object();
  for (const auto& [k, c] : s.counts) counts[k] = c;
  return {{"shots", s.shots}, {"seed", s.seed}, {"counts", counts}};
}

inline json to_json(const verify::ComparisonReport& r) {
  json per = json::object();
  for (const auto& [k, pair] : r.per_outcome) {
    per[k] = {{"expected", round12(pair.expected)}, {"actual", round12(pair.actual)}};
  }
  return {{"tv_distance", r.tv_distance},
          {"max_abs_diff", r.max_abs_diff},
          {"tolerance", r.tolerance},
          {"pass", r.pass},
          {"per_outcome", per}};
}

inline json to_json(const ring::TraceStep& s) {
  return {{"kind", ring::to_string(s.kind)},
          {"before", s.before.to_string()},
          {"privileged", s.privileged},
          {"chosen", s.chosen},
          {"after", s.after.to_string()},
          {"legitimate", ring::is_legitimate(s.after)}};
}

inline json configs_json(const std::vector<ring::RingConfig>& v) {
  json a = json::array();
  for (const auto& c : v) a.push_back(c.to_string());
  return a;
}

inline bool is_scalar_array(const json& j) {
  for (const auto& e : j) {
    if (e.is_structured()) return false;
  }
  return true;
}

/// Objects are indented; arrays of scalars stay inline; arrays of structures
/// print one compact element per line.
inline void write_json(std::ostream& out, const json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(depth + 1) * 2, ' ');
  if (j.is_object() && !j.empty()) {
    out << "{\n";
    std::size_t k = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++k) {
      out << inner << json(it.key()).dump() << ": ";
      write_json(out, it.value(), depth + 1);
      out << (k + 1 < j.size() ? ",\n" : "\n");
    }
    out << pad << '}';
  } else if (j.is_array() && !j.empty() && !is_scalar_array(j)) {
    out << "[\n";
    for (std::size_t k = 0; k < j.size(); ++k) {
      out << inner << j[k].dump() << (k + 1 < j.size() ? ",\n" : "\n");
    }
    out << pad << ']';
  } else {
    out << j.dump();
  }
}

inline std::string envelope(const std::string& command, const json& params, const json& result) {
  json env = {{"command", command}, {"params", params}, {"result", result}, {"version", kFormatVersion}};
  std::ostringstream s;
  write_json(s, env, 0);
  s << '\n';
  return s.str();
}

inline std::vector<std::size_t> parse_index_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
      throw UsageError(std::string("malformed ") + what + " list '" + text + "'");
    }
    out.push_back(v);
  }
  return out;
}

inline std::pair<std::size_t, std::size_t> parse_pair(const std::string& text, const char* what) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError(std::string(what) + " must look like a:b, got '" + text + "'");
  const auto a = parse_index_list(text.substr(0, colon), what);
  const auto b = parse_index_list(text.substr(colon + 1), what);
  if (a.size() != 1 || b.size() != 1) {
    throw UsageError(std::string(what) + " must look like a:b, got '" + text + "'");
  }
  return {a[0], b[0]};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
  if (!f) throw UsageError("failed writing '" + path + "'");
}

/// Output of one command: the text for stdout and the exit code.
struct Outcome {
  std::string text;
  int code = kOk;
};

// --- commands ---------------------------------------------------------------

struct SynthArgs {
  std::string kind;
  std::size_t n = 0;
  std::string order;
  std::string output;
};

inline Outcome cmd_synth(const SynthArgs& a) {
  synth::Circuit c;
  json params = {{"kind", a.kind}, {"n", a.n}, {"output", a.output}};
  if (a.kind == "ghz") {
    c = synth::ghz_circuit(a.n);
  } else if (a.kind == "w") {
    c = synth::w_circuit(a.n);
  } else {
    synth::ScheduleSpec spec{a.n, parse_index_list(a.order, "order")};
    params["order"] = spec.order;
    c = synth::schedule_circuit(spec);
  }
  write_file(a.output, synth::emit(c));
  json result = {{"path", a.output},
                 {"qubits", c.num_qubits},
                 {"x_qubits", c.layout.n_x},
                 {"ancillas", c.layout.n_anc},
                 {"gates", c.gates.size()},
                 {"schedule", c.schedule}};
  return {envelope("synth", params, result)};
}

struct SimulateArgs {
  std::string circuit;
  std::string marginal = "x";
  std::optional<std::size_t> shots;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
  std::string output;
};

inline Outcome cmd_simulate(const SimulateArgs& a) {
  if (a.shots && !a.seed) throw UsageError("--shots requires an explicit --seed");
  const synth::Circuit c = synth::parse(read_file(a.circuit));
  const std::vector<qsim::Qubit> keep =
      a.marginal == "all" ? qsim::all_qubits(c.num_qubits) : c.measured;
  const qsim::StateVector state = synth::simulate(c);

  std::ostringstream text;
  json params = {{"circuit", a.circuit}, {"marginal", a.marginal}, {"format", a.format}};
  if (a.shots) {
    const qsim::ShotCounts counts = qsim::sample(state, keep, *a.shots, *a.seed);
    params["shots"] = *a.shots;
    params["seed"] = *a.seed;
    if (a.format == "csv") {
      text << "outcome,count\n";
      for (const auto& [k, v] : counts.counts) text << k << ',' << v << '\n';
    } else {
      text << envelope("simulate", params, {{"counts", to_json(counts)}});
    }
  } else {
    const qsim::Distribution d = qsim::marginal(state, keep);
    if (a.format == "csv") {
      text << "outcome,probability\n";
      char buf[64];
      for (const auto& [k, p] : d.probs) {
        std::snprintf(buf, sizeof buf, "%.12f", p);
        text << k << ',' << buf << '\n';
      }
    } else {
      text << envelope("simulate", params, {{"distribution", to_json(d)}});
    }
  }
  if (!a.output.empty()) {
    write_file(a.output, text.str());
    if (a.format == "csv") return {};
    json note = {{"path", a.output}};
    return {envelope("simulate", params, {{"written", note}})};
  }
  return {text.str()};
}

struct VerifyArgs {
  std::size_t n = 0;
  std::string order;
  std::string fault;
  double tol = verify::kExactTolerance;
  std::optional<int> paper_figure;
};

/// Parameter sets and published distributions of the reproduced figures.
inline std::pair<qsim::Distribution, qsim::Distribution> figure_distributions(int figure) {
  auto dist = [](std::size_t width, std::map<std::string, double> probs) {
    return qsim::Distribution{width, std::move(probs)};
  };
  switch (figure) {
    case 1: {
      auto c = synth::ghz_circuit(3);
      return {dist(3, {{"000", 0.5}, {"111", 0.5}}), qsim::probabilities(synth::simulate(c))};
    }
    case 2: {
      auto c = synth::w_circuit(3);
      const double third = 1.0 / 3.0;
      return {dist(3, {{"001", third}, {"010", third}, {"100", third}}),
              qsim::probabilities(synth::simulate(c))};
    }
    case 4:
      return {dist(3, {{"001", 0.25}, {"011", 0.25}, {"100", 0.25}, {"110", 0.25}}),
              verify::simulated_x_marginal({3, {0}})};
    case 7:
      return {dist(3, {{"000", 0.5}, {"111", 0.5}}), verify::simulated_x_marginal({3, {0, 1, 2}})};
    default:
      throw UsageError("--paper-figure must be one of 1, 2, 4, 7");
  }
}

inline Outcome cmd_verify(const VerifyArgs& a) {
  json params = {{"tol", a.tol}};
  verify::ComparisonReport report;
  if (a.paper_figure) {
    params["paper_figure"] = *a.paper_figure;
    auto [expected, actual] = figure_distributions(*a.paper_figure);
    report = verify::compare_distributions(expected, actual, a.tol);
  } else {
    if (a.n == 0) throw UsageError("verify needs --n (or --paper-figure)");
    synth::ScheduleSpec spec{a.n, parse_index_list(a.order, "order")};
    params["n"] = a.n;
    params["order"] = spec.order;
    std::optional<verify::FaultSpec> fault;
    if (!a.fault.empty()) {
      auto [pos, target] = parse_pair(a.fault, "--fault");
      fault = verify::FaultSpec{pos, target};
      params["fault"] = {{"position", pos}, {"target", target}};
    }
    report = verify::compare_distributions(verify::oracle_distribution(spec, fault),
                                           verify::simulated_x_marginal(spec, fault), a.tol);
  }
  return {envelope("verify", params, to_json(report)), report.pass ? kOk : kVerificationFailed};
}

inline Outcome cmd_modelcheck(std::size_t n) {
  const ring::ClosureReport closure = ring::check_closure(n);
  const ring::ConvergenceReport conv = ring::check_convergence(n);
  json c = {{"holds", closure.holds}};
  if (closure.counterexample) {
    c["counterexample"] = {{"before", closure.counterexample->before.to_string()},
                           {"node", closure.counterexample->node},
                           {"after", closure.counterexample->after.to_string()}};
  }
  json v = {{"holds", conv.holds}};
  if (conv.max_moves_to_legitimate) v["max_moves_to_legitimate"] = *conv.max_moves_to_legitimate;
  if (conv.witness_cycle) v["witness_cycle"] = configs_json(*conv.witness_cycle);
  return {envelope("modelcheck", {{"n", n}}, {{"closure", c}, {"convergence", v}})};
}

struct TraceArgs {
  std::size_t n = 0;
  std::string start;
  std::string policy = "round-robin";
  std::optional<std::uint64_t> seed;
  std::string schedule;
  std::size_t steps = 1;
  std::string fault;
};

inline Outcome cmd_trace(const TraceArgs& a) {
  const ring::RingConfig start = ring::RingConfig::from_string(a.start);
  if (start.size() != a.n) {
    throw UsageError("--start has " + std::to_string(start.size()) + " bits but --n is " + std::to_string(a.n));
  }
  json params = {{"n", a.n}, {"start", a.start}, {"policy", a.policy}, {"steps", a.steps}};
  std::optional<ring::DemonPolicy> policy;
  if (a.policy == "round-robin") {
    policy = ring::DemonPolicy::round_robin();
  } else if (a.policy == "adversarial") {
    policy = ring::DemonPolicy::adversarial();
  } else if (a.policy == "random") {
    if (!a.seed) throw UsageError("--policy random requires --seed");
    params["seed"] = *a.seed;
    policy = ring::DemonPolicy::random(*a.seed);
  } else {
    const auto sched = parse_index_list(a.schedule, "schedule");
    params["schedule"] = sched;
    policy = ring::DemonPolicy::fixed(sched);
  }
  std::optional<ring::TransientFault> fault;
  if (!a.fault.empty()) {
    auto [step, node] = parse_pair(a.fault, "--fault");
    fault = ring::TransientFault{step, node};
    params["fault"] = {{"step", step}, {"node", node}};
  }
  const ring::Trace trace = ring::run_demon(start, *policy, a.steps, fault);
  json steps = json::array();
  for (const auto& s : trace.steps) steps.push_back(to_json(s));
  const ring::RingConfig& final_cfg = trace.steps.empty() ? start : trace.steps.back().after;
  json result = {{"status", ring::to_string(trace.status)},
                 {"final", final_cfg.to_string()},
                 {"final_legitimate", ring::is_legitimate(final_cfg)},
                 {"steps", steps}};
  return {envelope("trace", params, result)};
}

inline Outcome cmd_entangle_report(std::size_t n, const std::string& order) {
  synth::ScheduleSpec spec{n, parse_index_list(order, "order")};
  const verify::EntanglementReport r = verify::entanglement_report(spec);
  json result = {{"x_vs_anc_entropy", r.x_vs_anc_entropy},
                 {"per_qubit_entropy", r.per_qubit_entropy},
                 {"x_marginal_purity", r.x_marginal_purity}};
  return {envelope("entangle-report", {{"n", n}, {"order", spec.order}}, result)};
}

}  // namespace detail

/// Entry point shared by the executable and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-state self-stabilizing token ring: classical model checking and quantum circuits",
               "sstoken"};
  app.require_subcommand(1);

  detail::SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Write a circuit file");
  synth_cmd->add_option("--kind", synth_args.kind, "ghz | w | schedule")
      ->required()
      ->check(CLI::IsMember({"ghz", "w", "schedule"}));
  synth_cmd->add_option("--n", synth_args.n, "Ring size / qubit count")->required();
  synth_cmd->add_option("--order", synth_args.order, "Comma-separated rule order (schedule kind)");
  synth_cmd->add_option("-o,--output", synth_args.output, "Circuit file to write")->required();

  detail::SimulateArgs sim_args;
  std::size_t shots = 0;
  std::uint64_t sim_seed = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a circuit file");
  sim_cmd->add_option("circuit", sim_args.circuit, "Circuit file")->required();
  sim_cmd->add_option("--marginal", sim_args.marginal, "x | all")->check(CLI::IsMember({"x", "all"}));
  auto* shots_opt = sim_cmd->add_option("--shots", shots, "Sample this many shots")->check(CLI::PositiveNumber);
  auto* sim_seed_opt = sim_cmd->add_option("--seed", sim_seed, "Sampling seed");
  sim_cmd->add_option("--format", sim_args.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  sim_cmd->add_option("-o,--output", sim_args.output, "Write output here instead of stdout");

  detail::VerifyArgs verify_args;
  int figure = 0;
  auto* verify_cmd = app.add_subcommand("verify", "Compare simulated x-marginal against the classical oracle");
  verify_cmd->add_option("--n", verify_args.n, "Ring size");
  verify_cmd->add_option("--order", verify_args.order, "Comma-separated rule order");
  verify_cmd->add_option("--fault", verify_args.fault, "position:target");
  verify_cmd->add_option("--tol", verify_args.tol, "Max absolute difference");
  auto* figure_opt = verify_cmd->add_option("--paper-figure", figure, "Reproduce figure 1, 2, 4 or 7");

  std::size_t mc_n = 0;
  auto* mc_cmd = app.add_subcommand("modelcheck", "Exhaustive closure and convergence check");
  mc_cmd->add_option("--n", mc_n, "Ring size")->required();

  detail::TraceArgs trace_args;
  std::uint64_t trace_seed = 0;
  auto* trace_cmd = app.add_subcommand("trace", "Run the central demon");
  trace_cmd->add_option("--n", trace_args.n, "Ring size")->required();
  trace_cmd->add_option("--start", trace_args.start, "Initial bits, x_0 first")->required();
  trace_cmd->add_option("--policy", trace_args.policy, "round-robin | random | adversarial | fixed")
      ->check(CLI::IsMember({"round-robin", "random", "adversarial", "fixed"}));
  auto* trace_seed_opt = trace_cmd->add_option("--seed", trace_seed, "Seed for the random policy");
  trace_cmd->add_option("--schedule", trace_args.schedule, "Node list for the fixed policy");
  trace_cmd->add_option("--steps", trace_args.steps, "Step budget")->check(CLI::PositiveNumber);
  trace_cmd->add_option("--fault", trace_args.fault, "step:node transient flip");

  std::size_t ent_n = 0;
  std::string ent_order;
  auto* ent_cmd = app.add_subcommand("entangle-report", "Entropies and purity of a schedule circuit");
  ent_cmd->add_option("--n", ent_n, "Ring size")->required();
  ent_cmd->add_option("--order", ent_order, "Comma-separated rule order");

  std::vector<const char*> argv{"sstoken"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  detail::Outcome outcome;
  try {
    if (synth_cmd->parsed()) {
      outcome = detail::cmd_synth(synth_args);
    } else if (sim_cmd->parsed()) {
      if (*shots_opt) sim_args.shots = shots;
      if (*sim_seed_opt) sim_args.seed = sim_seed;
      outcome = detail::cmd_simulate(sim_args);
    } else if (verify_cmd->parsed()) {
      if (*figure_opt) verify_args.paper_figure = figure;
      outcome = detail::cmd_verify(verify_args);
    } else if (mc_cmd->parsed()) {
      outcome = detail::cmd_modelcheck(mc_n);
    } else if (trace_cmd->parsed()) {
      if (*trace_seed_opt) trace_args.seed = trace_seed;
      outcome = detail::cmd_trace(trace_args);
    } else {
      outcome = detail::cmd_entangle_report(ent_n, ent_order);
    }
  } catch (const ParseError& e) {
    err << "error: circuit " << e.what() << '\n';
    return kUsage;
  } catch (const std::logic_error& e) {  // UsageError, ContractError, ConstructionError, CapacityError
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  out << outcome.text;
  return outcome.code;
}

}  // namespace sstoken::cli

#endif  // SSTOKEN_CLI_HPP_
