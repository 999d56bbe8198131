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

#ifndef SSTOKEN_RING_HPP_
#define SSTOKEN_RING_HPP_

// Classical semantics of the two-state self-stabilizing token ring.
//
// Node 0 is privileged when x_0 == x_{n-1}; node i >= 1 is privileged when
// x_i != x_{i-1}. A privileged node moves by flipping its own bit. A central
// demon serializes moves, picking one privileged node at a time. A
// configuration is legitimate when exactly one node is privileged; the
// privileged node is read as the token holder.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sstoken/errors.hpp"

namespace sstoken::ring {

using NodeId = std::size_t;

/// Largest ring a RingConfig can hold.
inline constexpr std::size_t kMaxRingSize = 63;
/// Largest ring accepted by the exhaustive checkers (2^20 configurations).
inline constexpr std::size_t kMaxCheckedRingSize = 20;

/// The n two-state variables of the ring. Bits are packed so that x_0 is the
/// most significant of the low n bits, which makes `word()` equal to the
/// basis-state index of the x register in the quantum model.
class RingConfig {
 public:
  RingConfig(std::size_t n, std::uint64_t word) : n_(n), word_(word) {
    if (n < 2 || n > kMaxRingSize) {
      throw UsageError("ring size must be in [2, " + std::to_string(kMaxRingSize) +
                       "], got " + std::to_string(n));
    }
    if (n < 64 && (word >> n) != 0) {
      throw UsageError("config word has bits beyond ring size " + std::to_string(n));
    }
  }

  static RingConfig zeros(std::size_t n) { return RingConfig(n, 0); }

  /// Parses a bitstring such as "010" (leftmost character is x_0).
  static RingConfig from_string(std::string_view bits) {
    std::uint64_t word = 0;
    for (char c : bits) {
      if (c != '0' && c != '1') {
        throw UsageError("config must be a string of 0/1, got '" + std::string(bits) + "'");
      }
      word = (word << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return RingConfig(bits.size(), word);
  }

  std::size_t size() const noexcept { return n_; }
  std::uint64_t word() const noexcept { return word_; }

  bool bit(NodeId i) const {
    check_index(i);
    return ((word_ >> position(i)) & 1u) != 0;
  }

  RingConfig flipped(NodeId i) const {
    check_index(i);
    return RingConfig(n_, word_ ^ (std::uint64_t{1} << position(i)));
  }

  std::string to_string() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i) {
      if ((word_ >> position(i)) & 1u) s[i] = '1';
    }
    return s;
  }

  void check_index(NodeId i) const {
    if (i >= n_) {
      throw UsageError("node index " + std::to_string(i) + " out of range for ring of size " +
                       std::to_string(n_));
    }
  }

  friend bool operator==(const RingConfig&, const RingConfig&) = default;

 private:
  std::size_t position(NodeId i) const noexcept { return n_ - 1 - i; }

  std::size_t n_;
  std::uint64_t word_;
};

namespace detail {

inline std::uint64_t low_mask(std::size_t n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

/// Privileged nodes as a bit mask in the same packing as RingConfig::word().
inline std::uint64_t privileged_mask(std::size_t n, std::uint64_t word) {
  // Position p < n-1 holds x_i with x_{i-1} at p+1.
  std::uint64_t mask = (word ^ (word >> 1)) & low_mask(n - 1);
  const std::uint64_t x0 = (word >> (n - 1)) & 1u;
  const std::uint64_t xlast = word & 1u;
  if (x0 == xlast) mask |= std::uint64_t{1} << (n - 1);
  return mask;
}

inline bool legitimate_word(std::size_t n, std::uint64_t word) {
  return std::popcount(privileged_mask(n, word)) == 1;
}

inline void check_checked_size(std::size_t n) {
  if (n < 2) throw UsageError("ring size must be at least 2");
  if (n > kMaxCheckedRingSize) {
    throw CapacityError("ring size " + std::to_string(n) + " exceeds the exhaustive-check bound " +
                        std::to_string(kMaxCheckedRingSize));
  }
}

}  // namespace detail

inline bool is_privileged(const RingConfig& cfg, NodeId i) {
  cfg.check_index(i);
  if (i == 0) return cfg.bit(0) == cfg.bit(cfg.size() - 1);
  return cfg.bit(i) != cfg.bit(i - 1);
}

/// Ascending list of privileged nodes. Never empty: the count is always odd.
inline std::vector<NodeId> privileged_set(const RingConfig& cfg) {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < cfg.size(); ++i) {
    if (is_privileged(cfg, i)) out.push_back(i);
  }
  return out;
}

inline RingConfig apply_move(const RingConfig& cfg, NodeId i) {
  if (!is_privileged(cfg, i)) {
    throw ContractError("node " + std::to_string(i) + " is not privileged in " + cfg.to_string());
  }
  return cfg.flipped(i);
}

inline bool is_legitimate(const RingConfig& cfg) {
  return detail::legitimate_word(cfg.size(), cfg.word());
}

/// Transient fault: flips bit i regardless of privilege.
inline RingConfig inject_bit_fault(const RingConfig& cfg, NodeId i) { return cfg.flipped(i); }

// ---------------------------------------------------------------------------
// Model checking

struct ClosureCounterexample {
  RingConfig before;
  NodeId node;
  RingConfig after;
};

struct ClosureReport {
  std::size_t n;
  bool holds;
  std::optional<ClosureCounterexample> counterexample;
};

inline ClosureReport check_closure(std::size_t n) {
  detail::check_checked_size(n);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t w = 0; w < total; ++w) {
    const std::uint64_t mask = detail::privileged_mask(n, w);
    if (std::popcount(mask) != 1) continue;
    const std::uint64_t next = w ^ mask;
    if (!detail::legitimate_word(n, next)) {
      const NodeId node = n - 1 - static_cast<std::size_t>(std::countr_zero(mask));
      return {n, false, ClosureCounterexample{RingConfig(n, w), node, RingConfig(n, next)}};
    }
  }
  return {n, true, std::nullopt};
}

/// Number of moves the demon can still force before the ring becomes
/// legitimate, for every configuration of an n-ring (indexed by word).
/// Legitimate configurations map to 0; configurations from which a cycle of
/// illegitimate configurations is reachable map to kUnbounded.
struct ForcedDistances {
  static constexpr std::uint32_t kUnbounded = std::numeric_limits<std::uint32_t>::max();

  std::size_t n = 0;
  std::vector<std::uint32_t> remaining;
  std::optional<std::vector<RingConfig>> witness_cycle;

  std::uint32_t at(const RingConfig& cfg) const { return remaining.at(cfg.word()); }
};

inline ForcedDistances forced_distances(std::size_t n) {
  detail::check_checked_size(n);
  enum : std::uint8_t { kWhite, kGray, kBlack };

  const std::uint64_t total = std::uint64_t{1} << n;
  ForcedDistances out;
  out.n = n;
  out.remaining.assign(total, 0);
  std::vector<std::uint8_t> colour(total, kWhite);

  struct Frame {
    std::uint64_t word;
    std::uint64_t pending;  // privileged moves not yet explored
    std::uint32_t best;
  };
  std::vector<Frame> stack;

  for (std::uint64_t root = 0; root < total; ++root) {
    if (colour[root] != kWhite) continue;
    if (detail::legitimate_word(n, root)) {
      colour[root] = kBlack;
      continue;
    }
    colour[root] = kGray;
    stack.push_back({root, detail::privileged_mask(n, root), 0});

    while (!stack.empty()) {
      Frame& top = stack.back();
      if (top.pending == 0) {
        out.remaining[top.word] = top.best;
        colour[top.word] = kBlack;
        const std::uint32_t done = top.best;
        stack.pop_back();
        if (!stack.empty()) {
          Frame& parent = stack.back();
          const std::uint32_t via =
              done == ForcedDistances::kUnbounded ? done : done + 1;
          parent.best = std::max(parent.best, via);
        }
        continue;
      }
      const std::uint64_t move = top.pending & (~top.pending + 1);
      top.pending ^= move;
      const std::uint64_t next = top.word ^ move;

      if (detail::legitimate_word(n, next)) {
        top.best = std::max<std::uint32_t>(top.best, 1);
      } else if (colour[next] == kBlack) {
        const std::uint32_t r = out.remaining[next];
        top.best = std::max(top.best, r == ForcedDistances::kUnbounded ? r : r + 1);
      } else if (colour[next] == kGray) {
        top.best = ForcedDistances::kUnbounded;
        if (!out.witness_cycle) {
          std::vector<RingConfig> cycle;
          auto it = std::find_if(stack.begin(), stack.end(),
                                 [next](const Frame& f) { return f.word == next; });
          for (; it != stack.end(); ++it) cycle.emplace_back(n, it->word);
          out.witness_cycle = std::move(cycle);
        }
      } else {
        colour[next] = kGray;
        stack.push_back({next, detail::privileged_mask(n, next), 0});
      }
    }
  }
  return out;
}

struct ConvergenceReport {
  std::size_t n;
  bool holds;
  /// Longest demon execution through illegitimate configs; present iff holds.
  std::optional<std::size_t> max_moves_to_legitimate;
  /// Cycle of illegitimate configs, each reachable from the previous by one
  /// privileged move and the last leading back to the first; present iff !holds.
  std::optional<std::vector<RingConfig>> witness_cycle;
};

/// Every demon execution reaches the legitimate set iff the transition graph
/// restricted to illegitimate configs is acyclic.
inline ConvergenceReport check_convergence(std::size_t n) {
  ForcedDistances d = forced_distances(n);
  if (d.witness_cycle) return {n, false, std::nullopt, std::move(d.witness_cycle)};
  const auto longest = *std::max_element(d.remaining.begin(), d.remaining.end());
  return {n, true, static_cast<std::size_t>(longest), std::nullopt};
}

// ---------------------------------------------------------------------------
// Demon-driven execution

enum class DemonKind { round_robin, random, adversarial, fixed };

class DemonPolicy {
 public:
  static DemonPolicy round_robin() { return DemonPolicy(DemonKind::round_robin, 0, {}); }
  static DemonPolicy random(std::uint64_t seed) { return DemonPolicy(DemonKind::random, seed, {}); }
  static DemonPolicy adversarial() { return DemonPolicy(DemonKind::adversarial, 0, {}); }
  static DemonPolicy fixed(std::vector<NodeId> schedule) {
    if (schedule.empty()) throw UsageError("fixed demon schedule must be nonempty");
    return DemonPolicy(DemonKind::fixed, 0, std::move(schedule));
  }

  DemonKind kind() const noexcept { return kind_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<NodeId>& schedule() const noexcept { return schedule_; }

 private:
  DemonPolicy(DemonKind kind, std::uint64_t seed, std::vector<NodeId> schedule)
      : kind_(kind), seed_(seed), schedule_(std::move(schedule)) {}

  DemonKind kind_;
  std::uint64_t seed_;
  std::vector<NodeId> schedule_;
};

enum class StepKind {
  move,     // chosen node was privileged and moved
  skipped,  // fixed schedule named a non-privileged node; after == before
  fault,    // transient bit flip injected between moves
};

struct TraceStep {
  StepKind kind;
  RingConfig before;
  std::vector<NodeId> privileged;
  NodeId chosen;
  RingConfig after;
};

enum class TraceStatus { completed, schedule_exhausted };

struct Trace {
  std::vector<TraceStep> steps;
  TraceStatus status = TraceStatus::completed;
};

/// Flip `node` just before demon step `before_step` (0-based). Equal to the
/// step budget means after the last step.
struct TransientFault {
  std::size_t before_step;
  NodeId node;
};

inline const char* to_string(DemonKind k) {
  switch (k) {
    case DemonKind::round_robin: return "round-robin";
    case DemonKind::random: return "random";
    case DemonKind::adversarial: return "adversarial";
    case DemonKind::fixed: return "fixed";
  }
  return "?";
}

inline const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::move: return "move";
    case StepKind::skipped: return "skipped";
    case StepKind::fault: return "fault";
  }
  return "?";
}

inline const char* to_string(TraceStatus s) {
  return s == TraceStatus::completed ? "completed" : "schedule_exhausted";
}

/// Runs up to `max_steps` demon steps from `start`. Round-robin picks the
/// first privileged node at or after (last chosen + 1), cyclically, starting
/// from node 0. Random draws uniformly with mt19937_64 (index = draw % count).
/// Adversarial picks the move whose successor has the largest forced distance
/// to the legitimate set, lowest index on ties. Fixed consumes one schedule
/// entry per step and records a skip when the entry is not privileged.
inline Trace run_demon(const RingConfig& start, const DemonPolicy& policy, std::size_t max_steps,
                       std::optional<TransientFault> fault = std::nullopt) {
  const std::size_t n = start.size();
  if (max_steps == 0) throw UsageError("max_steps must be at least 1");
  for (NodeId node : policy.schedule()) start.check_index(node);
  if (fault) {
    start.check_index(fault->node);
    if (fault->before_step > max_steps) {
      throw UsageError("fault step " + std::to_string(fault->before_step) +
                       " is beyond the step budget " + std::to_string(max_steps));
    }
  }

  std::optional<ForcedDistances> distances;
  if (policy.kind() == DemonKind::adversarial) distances = forced_distances(n);
  std::mt19937_64 rng(policy.seed());
  NodeId last = n - 1;

  Trace trace;
  RingConfig cfg = start;
  auto maybe_fault = [&](std::size_t step) {
    if (fault && fault->before_step == step) {
      RingConfig after = inject_bit_fault(cfg, fault->node);
      trace.steps.push_back({StepKind::fault, cfg, privileged_set(cfg), fault->node, after});
      cfg = after;
    }
  };

  for (std::size_t step = 0; step < max_steps; ++step) {
    maybe_fault(step);
    std::vector<NodeId> privileged = privileged_set(cfg);
    NodeId chosen = privileged.front();
    switch (policy.kind()) {
      case DemonKind::round_robin: {
        const NodeId from = (last + 1) % n;
        auto it = std::lower_bound(privileged.begin(), privileged.end(), from);
        chosen = it != privileged.end() ? *it : privileged.front();
        break;
      }
      case DemonKind::random:
        chosen = privileged[rng() % privileged.size()];
        break;
      case DemonKind::adversarial: {
        std::uint32_t best = 0;
        for (NodeId i : privileged) {
          const std::uint32_t d = distances->at(cfg.flipped(i));
          if (i == privileged.front() || d > best) {
            best = d;
            chosen = i;
          }
        }
        break;
      }
      case DemonKind::fixed: {
        if (step >= policy.schedule().size()) {
          trace.status = TraceStatus::schedule_exhausted;
          return trace;
        }
        chosen = policy.schedule()[step];
        if (!is_privileged(cfg, chosen)) {
          trace.steps.push_back({StepKind::skipped, cfg, std::move(privileged), chosen, cfg});
          continue;
        }
        break;
      }
    }
    RingConfig after = apply_move(cfg, chosen);
    trace.steps.push_back({StepKind::move, cfg, std::move(privileged), chosen, after});
    cfg = after;
    last = chosen;
  }
  maybe_fault(max_steps);
  return trace;
}

}  // namespace sstoken::ring

#endif  // SSTOKEN_RING_HPP_
