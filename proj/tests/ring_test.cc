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

#include "sstoken/ring.hpp"

#include <set>

#include "gtest/gtest.h"

#include "oracles.hpp"

using namespace sstoken;
using namespace sstoken::ring;

namespace {

RingConfig cfg(const char* bits) { return RingConfig::from_string(bits); }

}  // namespace

TEST(RingConfig, bit_order_and_parsing) {
  const RingConfig c = cfg("100");
  EXPECT_EQ(c.size(), 3u);
  EXPECT_EQ(c.word(), 4u);
  EXPECT_TRUE(c.bit(0));
  EXPECT_FALSE(c.bit(2));
  EXPECT_EQ(c.to_string(), "100");
  EXPECT_THROW(cfg("1"), UsageError);
  EXPECT_THROW(cfg("012"), UsageError);
  EXPECT_THROW(RingConfig(3, 8), UsageError);
  EXPECT_THROW(c.bit(3), UsageError);
}

TEST(Ring, is_privileged_examples) {
  EXPECT_TRUE(is_privileged(cfg("000"), 0));
  EXPECT_TRUE(is_privileged(cfg("001"), 2));
  EXPECT_FALSE(is_privileged(cfg("001"), 1));
  for (NodeId i = 0; i < 3; ++i) EXPECT_TRUE(is_privileged(cfg("101"), i));
  EXPECT_THROW(is_privileged(cfg("000"), 3), UsageError);
}

TEST(Ring, privileged_set_examples) {
  EXPECT_EQ(privileged_set(cfg("010")), (std::vector<NodeId>{0, 1, 2}));
  EXPECT_EQ(privileged_set(cfg("100")), (std::vector<NodeId>{1}));
  EXPECT_EQ(privileged_set(cfg("0101")), (std::vector<NodeId>{1, 2, 3}));
}

TEST(Ring, privileged_set_matches_rule_definition) {
  for (std::size_t n = 2; n <= 10; ++n) {
    for (std::uint64_t w = 0; w < (1u << n); ++w) {
      const auto expected = oracle::privileged(oracle::bits_of(w, n));
      ASSERT_EQ(privileged_set(RingConfig(n, w)), expected) << "n=" << n << " w=" << w;
    }
  }
}

TEST(Ring, apply_move_examples) {
  EXPECT_EQ(apply_move(cfg("010"), 1), cfg("000"));
  EXPECT_EQ(apply_move(cfg("000"), 0), cfg("100"));
  EXPECT_EQ(apply_move(cfg("111"), 0), cfg("011"));
}

TEST(Ring, apply_move_errors_are_distinct) {
  EXPECT_THROW(apply_move(cfg("001"), 1), ContractError);
  EXPECT_THROW(apply_move(cfg("001"), 7), UsageError);
}

TEST(Ring, legitimate_configs_n3) {
  EXPECT_TRUE(is_legitimate(cfg("000")));
  EXPECT_FALSE(is_legitimate(cfg("010")));
  EXPECT_FALSE(is_legitimate(cfg("101")));
  std::set<std::string> legit;
  for (std::uint64_t w = 0; w < 8; ++w) {
    if (is_legitimate(RingConfig(3, w))) legit.insert(RingConfig(3, w).to_string());
  }
  EXPECT_EQ(legit, (std::set<std::string>{"000", "001", "011", "100", "110", "111"}));
}

TEST(Ring, parity_of_privileged_count) {
  for (std::size_t n = 2; n <= 12; ++n) {
    for (std::uint64_t w = 0; w < (1u << n); ++w) {
      ASSERT_EQ(privileged_set(RingConfig(n, w)).size() % 2, 1u) << "n=" << n << " w=" << w;
    }
  }
}

TEST(Ring, closure_and_token_handoff) {
  for (std::size_t n = 3; n <= 12; ++n) {
    for (std::uint64_t w = 0; w < (1u << n); ++w) {
      const RingConfig c(n, w);
      if (!is_legitimate(c)) continue;
      const NodeId holder = privileged_set(c).front();
      const RingConfig next = apply_move(c, holder);
      ASSERT_TRUE(is_legitimate(next));
      ASSERT_EQ(privileged_set(next).front(), (holder + 1) % n);
    }
  }
}

TEST(Ring, inject_bit_fault_is_unconditional) {
  EXPECT_EQ(inject_bit_fault(cfg("000"), 1), cfg("010"));
  EXPECT_EQ(inject_bit_fault(cfg("111"), 2), cfg("110"));
  EXPECT_THROW(inject_bit_fault(cfg("111"), 3), UsageError);
  for (std::uint64_t w = 0; w < 16; ++w) {
    const RingConfig c(4, w);
    for (NodeId i = 0; i < 4; ++i) EXPECT_EQ(inject_bit_fault(inject_bit_fault(c, i), i), c);
  }
}

TEST(ModelCheck, closure_holds) {
  for (std::size_t n : {2u, 3u, 4u, 12u}) {
    const ClosureReport r = check_closure(n);
    EXPECT_TRUE(r.holds) << n;
    EXPECT_FALSE(r.counterexample.has_value());
  }
  EXPECT_THROW(check_closure(21), CapacityError);
  EXPECT_TRUE(check_closure(20).holds);
}

TEST(ModelCheck, convergence_n3) {
  const ConvergenceReport r = check_convergence(3);
  EXPECT_TRUE(r.holds);
  ASSERT_TRUE(r.max_moves_to_legitimate.has_value());
  EXPECT_EQ(*r.max_moves_to_legitimate, 1u);
  EXPECT_FALSE(r.witness_cycle.has_value());
}

// Checker verdicts against an independent value-iteration oracle.
TEST(ModelCheck, convergence_matches_value_iteration) {
  for (std::size_t n = 2; n <= 10; ++n) {
    const ConvergenceReport r = check_convergence(n);
    const auto expected = oracle::longest_to_legitimate(n);
    ASSERT_EQ(r.holds, expected.has_value()) << "n=" << n;
    ASSERT_NE(r.max_moves_to_legitimate.has_value(), r.witness_cycle.has_value());
    if (expected) {
      EXPECT_EQ(*r.max_moves_to_legitimate, *expected) << "n=" << n;
    }
  }
}

TEST(ModelCheck, witness_cycles_are_real) {
  for (std::size_t n = 2; n <= 12; ++n) {
    const ConvergenceReport r = check_convergence(n);
    if (r.holds) continue;
    const auto& cycle = *r.witness_cycle;
    ASSERT_FALSE(cycle.empty());
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      const RingConfig& a = cycle[k];
      const RingConfig& b = cycle[(k + 1) % cycle.size()];
      EXPECT_FALSE(is_legitimate(a));
      bool step = false;
      for (NodeId i : privileged_set(a)) step = step || apply_move(a, i) == b;
      EXPECT_TRUE(step) << "n=" << n << " " << a.to_string() << " -> " << b.to_string();
    }
  }
}

TEST(Demon, round_robin_circulates_token) {
  const Trace t = run_demon(cfg("000"), DemonPolicy::round_robin(), 6);
  ASSERT_EQ(t.steps.size(), 6u);
  const std::vector<std::string> configs{"000", "100", "110", "111", "011", "001", "000"};
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_EQ(t.steps[k].kind, StepKind::move);
    EXPECT_EQ(t.steps[k].before.to_string(), configs[k]);
    EXPECT_EQ(t.steps[k].after.to_string(), configs[k + 1]);
    EXPECT_EQ(t.steps[k].chosen, k % 3);
  }
}

TEST(Demon, one_step_from_010_is_legitimate_under_any_policy) {
  for (const auto& p : {DemonPolicy::round_robin(), DemonPolicy::random(1), DemonPolicy::random(99),
                        DemonPolicy::adversarial(), DemonPolicy::fixed({1}), DemonPolicy::fixed({2})}) {
    const Trace t = run_demon(cfg("010"), p, 1);
    ASSERT_EQ(t.steps.size(), 1u);
    EXPECT_TRUE(is_legitimate(t.steps[0].after));
  }
}

TEST(Demon, fixed_schedule_skips_unprivileged_entries) {
  const Trace t = run_demon(cfg("000"), DemonPolicy::fixed({0, 0}), 2);
  ASSERT_EQ(t.steps.size(), 2u);
  EXPECT_EQ(t.steps[0].after, cfg("100"));
  EXPECT_EQ(t.steps[1].kind, StepKind::skipped);
  EXPECT_EQ(t.steps[1].after, cfg("100"));
  EXPECT_EQ(t.status, TraceStatus::completed);

  const Trace short_run = run_demon(cfg("000"), DemonPolicy::fixed({0}), 5);
  EXPECT_EQ(short_run.steps.size(), 1u);
  EXPECT_EQ(short_run.status, TraceStatus::schedule_exhausted);

  EXPECT_THROW(DemonPolicy::fixed({}), UsageError);
  EXPECT_THROW(run_demon(cfg("000"), DemonPolicy::fixed({3}), 1), UsageError);
}

TEST(Demon, trace_step_invariants) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Trace t = run_demon(RingConfig(7, seed * 5 % 128), DemonPolicy::random(seed), 40);
    for (const auto& s : t.steps) {
      ASSERT_TRUE(std::find(s.privileged.begin(), s.privileged.end(), s.chosen) != s.privileged.end());
      ASSERT_EQ(s.after, apply_move(s.before, s.chosen));
    }
  }
}

TEST(Demon, random_policy_is_deterministic_per_seed) {
  const Trace a = run_demon(cfg("0101101"), DemonPolicy::random(42), 30);
  const Trace b = run_demon(cfg("0101101"), DemonPolicy::random(42), 30);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t k = 0; k < a.steps.size(); ++k) EXPECT_EQ(a.steps[k].chosen, b.steps[k].chosen);
}

TEST(Demon, adversarial_realizes_the_checked_bound) {
  for (std::size_t n = 3; n <= 10; ++n) {
    const ConvergenceReport r = check_convergence(n);
    if (!r.holds) continue;
    const ForcedDistances d = forced_distances(n);
    std::uint64_t worst = 0;
    for (std::uint64_t w = 0; w < d.remaining.size(); ++w) {
      if (d.remaining[w] > d.remaining[worst]) worst = w;
    }
    const Trace t = run_demon(RingConfig(n, worst), DemonPolicy::adversarial(), *r.max_moves_to_legitimate + 1);
    std::size_t first_legit = t.steps.size();
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
      if (is_legitimate(t.steps[k].after)) {
        first_legit = k + 1;
        break;
      }
    }
    EXPECT_EQ(first_legit, *r.max_moves_to_legitimate) << "n=" << n;
  }
}

TEST(Demon, fault_then_reconverge_within_bound) {
  for (std::size_t n = 3; n <= 8; ++n) {
    const ConvergenceReport r = check_convergence(n);
    if (!r.holds) continue;
    const std::size_t bound = *r.max_moves_to_legitimate;
    for (std::uint64_t w = 0; w < (1u << n); ++w) {
      const RingConfig start(n, w);
      if (!is_legitimate(start)) continue;
      for (NodeId i = 0; i < n; ++i) {
        const RingConfig faulty = inject_bit_fault(start, i);
        const Trace t = run_demon(faulty, DemonPolicy::round_robin(), bound + 1);
        bool reached = is_legitimate(faulty);
        for (std::size_t k = 0; k < bound && !reached; ++k) reached = is_legitimate(t.steps[k].after);
        EXPECT_TRUE(reached) << "n=" << n << " start=" << start.to_string() << " fault=" << i;
      }
    }
  }
}

TEST(Demon, mid_trace_fault_is_recorded) {
  const Trace t = run_demon(cfg("000"), DemonPolicy::round_robin(), 4, TransientFault{2, 1});
  ASSERT_EQ(t.steps.size(), 5u);
  EXPECT_EQ(t.steps[2].kind, StepKind::fault);
  EXPECT_EQ(t.steps[2].before, cfg("110"));
  EXPECT_EQ(t.steps[2].after, cfg("100"));
  EXPECT_TRUE(is_legitimate(t.steps.back().after));
  EXPECT_THROW(run_demon(cfg("000"), DemonPolicy::round_robin(), 4, TransientFault{5, 1}), UsageError);
}

TEST(Demon, adversarial_capacity) {
  EXPECT_THROW(run_demon(RingConfig::zeros(21), DemonPolicy::adversarial(), 1), CapacityError);
  EXPECT_NO_THROW(run_demon(RingConfig::zeros(21), DemonPolicy::round_robin(), 1));
}
