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

#ifndef SSTOKEN_VERIFY_HPP_
#define SSTOKEN_VERIFY_HPP_

// Ties the classical ring to the quantum circuits: a brute-force oracle for
// schedule outcomes, distribution comparison, entanglement measurements and
// single transient-fault experiments.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sstoken/errors.hpp"
#include "sstoken/qsim.hpp"
#include "sstoken/ring.hpp"
#include "sstoken/synth.hpp"

namespace sstoken::verify {

using qsim::Distribution;
using ring::NodeId;
using synth::ScheduleSpec;

/// Tolerance for comparisons where both sides are exact dyadic values.
inline constexpr double kExactTolerance = 1e-9;

/// Unconditional flip of x_target, injected before the rule application at
/// `position` (position == schedule length means after every rule).
struct FaultSpec {
  std::size_t position;
  NodeId target;
};

inline void validate(const ScheduleSpec& spec, const std::optional<FaultSpec>& fault) {
  spec.validate();
  if (!fault) return;
  if (fault->position > spec.order.size()) {
    throw UsageError("fault position " + std::to_string(fault->position) +
                     " beyond schedule length " + std::to_string(spec.order.size()));
  }
  if (fault->target >= spec.n) {
    throw UsageError("fault target " + std::to_string(fault->target) + " out of range for ring of size " +
                     std::to_string(spec.n));
  }
}

/// Runs every x-basis input through the schedule classically, each with
/// weight 2^-n, and tallies the final x values.
inline Distribution oracle_distribution(const ScheduleSpec& spec,
                                        const std::optional<FaultSpec>& fault = std::nullopt) {
  validate(spec, fault);
  if (spec.n > qsim::kMaxQubits) throw CapacityError("ring too large for oracle enumeration");
  const std::uint64_t inputs = std::uint64_t{1} << spec.n;
  const double weight = 1.0 / static_cast<double>(inputs);
  std::vector<double> dense(inputs, 0.0);
  for (std::uint64_t w = 0; w < inputs; ++w) {
    ring::RingConfig x(spec.n, w);
    for (std::size_t k = 0; k <= spec.order.size(); ++k) {
      if (fault && fault->position == k) x = ring::inject_bit_fault(x, fault->target);
      if (k == spec.order.size()) break;
      const NodeId i = spec.order[k];
      if (ring::is_privileged(x, i)) x = ring::apply_move(x, i);
    }
    dense[x.word()] += weight;
  }
  return qsim::detail::to_distribution(dense, spec.n);
}

struct OutcomePair {
  double expected;
  double actual;
};

struct ComparisonReport {
  double tv_distance = 0;
  double max_abs_diff = 0;
  double tolerance = 0;
  bool pass = false;
  std::map<std::string, OutcomePair> per_outcome;
};

/// Missing keys count as probability 0. pass iff max_abs_diff <= tol.
inline ComparisonReport compare_distributions(const Distribution& expected, const Distribution& actual,
                                              double tol) {
  if (expected.width != actual.width) {
    throw UsageError("distribution widths differ: " + std::to_string(expected.width) + " vs " +
                     std::to_string(actual.width));
  }
  ComparisonReport r;
  r.tolerance = tol;
  for (const auto& [k, p] : expected.probs) r.per_outcome[k] = {p, 0.0};
  for (const auto& [k, p] : actual.probs) r.per_outcome[k].actual = p;
  double l1 = 0;
  for (const auto& [k, pair] : r.per_outcome) {
    const double d = std::abs(pair.expected - pair.actual);
    l1 += d;
    r.max_abs_diff = std::max(r.max_abs_diff, d);
  }
  r.tv_distance = std::min(1.0, l1 / 2);
  r.pass = r.max_abs_diff <= tol;
  return r;
}

/// Like synth::schedule_circuit but allows an empty order and an X fault.
inline synth::Circuit fault_circuit(const ScheduleSpec& spec,
                                    const std::optional<FaultSpec>& fault = std::nullopt) {
  validate(spec, fault);
  synth::ScheduleBuilder b(spec.n, spec.order.size());
  b.uniform_init();
  for (std::size_t k = 0; k <= spec.order.size(); ++k) {
    if (fault && fault->position == k) b.flip(fault->target);
    if (k < spec.order.size()) b.rule(spec.order[k], k);
  }
  return std::move(b).build();
}

inline Distribution simulated_x_marginal(const ScheduleSpec& spec,
                                         const std::optional<FaultSpec>& fault = std::nullopt) {
  const synth::Circuit c = fault_circuit(spec, fault);
  return qsim::marginal(synth::simulate(c), c.layout.x_qubits());
}

struct EntanglementReport {
  ScheduleSpec schedule;
  /// Entropy of the x register against the ancillas.
  double x_vs_anc_entropy = 0;
  /// Entropy of each x qubit against the rest of the full register.
  std::vector<double> per_qubit_entropy;
  /// Tr(rho_x^2) of the reduced x register.
  double x_marginal_purity = 0;
};

inline EntanglementReport entanglement_report(const ScheduleSpec& spec) {
  const synth::Circuit c = fault_circuit(spec);
  const qsim::StateVector state = synth::simulate(c);
  const qsim::DensityMatrix rho_x = qsim::reduced_density(state, c.layout.x_qubits());

  EntanglementReport r;
  r.schedule = spec;
  r.x_vs_anc_entropy = qsim::entropy(rho_x);
  r.x_marginal_purity = rho_x.purity();
  for (std::size_t i = 0; i < spec.n; ++i) {
    r.per_qubit_entropy.push_back(qsim::entropy(qsim::reduced_density(state, {c.layout.x_index(i)})));
  }
  return r;
}

/// Simulated x-marginal with the fault as an X gate, against the faulted oracle.
inline ComparisonReport fault_experiment(const ScheduleSpec& spec, const FaultSpec& fault,
                                         double tol = kExactTolerance) {
  return compare_distributions(oracle_distribution(spec, fault), simulated_x_marginal(spec, fault), tol);
}

}  // namespace sstoken::verify

#endif  // SSTOKEN_VERIFY_HPP_
