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

#ifndef SSTOKEN_QSIM_HPP_
#define SSTOKEN_QSIM_HPP_

// Exact statevector simulation for the small gate set used by the ring
// circuits: H, X, RY, CX, CCX and polarity-controlled MCX.
//
// Basis index convention: qubit 0 is the most significant bit of the index,
// so |x_0 x_1 ... x_{m-1}> reads left to right like the ket.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "sstoken/errors.hpp"

namespace sstoken::qsim {

using Amplitude = std::complex<double>;
using Qubit = std::size_t;

inline constexpr std::size_t kMaxQubits = 24;
/// Distribution entries below this probability are dropped.
inline constexpr double kPruneThreshold = 1e-12;
/// Eigenvalues at or below this are treated as zero by entropy().
inline constexpr double kEigenFloor = 1e-12;

namespace gates {

struct H {
  Qubit target;
};
struct X {
  Qubit target;
};
struct RY {
  Qubit target;
  double theta;
};
struct CX {
  Qubit control;
  Qubit target;
};
struct CCX {
  Qubit control1;
  Qubit control2;
  Qubit target;
};
struct Control {
  Qubit qubit;
  bool positive = true;
  friend bool operator==(const Control&, const Control&) = default;
};
struct MCX {
  std::vector<Control> controls;
  Qubit target;
};

inline bool operator==(const H& a, const H& b) { return a.target == b.target; }
inline bool operator==(const X& a, const X& b) { return a.target == b.target; }
inline bool operator==(const RY& a, const RY& b) {
  return a.target == b.target && a.theta == b.theta;
}
inline bool operator==(const CX& a, const CX& b) {
  return a.control == b.control && a.target == b.target;
}
inline bool operator==(const CCX& a, const CCX& b) {
  return a.control1 == b.control1 && a.control2 == b.control2 && a.target == b.target;
}
inline bool operator==(const MCX& a, const MCX& b) {
  return a.controls == b.controls && a.target == b.target;
}

}  // namespace gates

using Gate = std::variant<gates::H, gates::X, gates::RY, gates::CX, gates::CCX, gates::MCX>;

/// Every qubit a gate touches, target last.
inline std::vector<Qubit> qubits_of(const Gate& gate) {
  return std::visit(
      [](const auto& g) -> std::vector<Qubit> {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, gates::CX>) {
          return {g.control, g.target};
        } else if constexpr (std::is_same_v<T, gates::CCX>) {
          return {g.control1, g.control2, g.target};
        } else if constexpr (std::is_same_v<T, gates::MCX>) {
          std::vector<Qubit> q;
          for (const auto& c : g.controls) q.push_back(c.qubit);
          q.push_back(g.target);
          return q;
        } else {
          return {g.target};
        }
      },
      gate);
}

/// Throws UsageError when an index is out of range or qubits repeat.
inline void validate(const Gate& gate, std::size_t num_qubits) {
  const std::vector<Qubit> q = qubits_of(gate);
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (q[a] >= num_qubits) {
      throw UsageError("qubit index " + std::to_string(q[a]) + " out of range for " +
                       std::to_string(num_qubits) + " qubits");
    }
    for (std::size_t b = a + 1; b < q.size(); ++b) {
      if (q[a] == q[b]) throw UsageError("gate uses qubit " + std::to_string(q[a]) + " twice");
    }
  }
}

class StateVector {
 public:
  /// |0...0> on m qubits.
  explicit StateVector(std::size_t num_qubits) : m_(num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
      throw CapacityError("qubit count " + std::to_string(num_qubits) + " outside [1, " +
                          std::to_string(kMaxQubits) + "]");
    }
    amps_.assign(std::size_t{1} << m_, Amplitude{0.0, 0.0});
    amps_[0] = 1.0;
  }

  std::size_t num_qubits() const noexcept { return m_; }
  std::size_t dimension() const noexcept { return amps_.size(); }
  const std::vector<Amplitude>& amplitudes() const noexcept { return amps_; }
  Amplitude operator[](std::size_t index) const { return amps_.at(index); }

  double norm_squared() const {
    double s = 0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  /// Bit mask of qubit q inside a basis index.
  std::size_t mask(Qubit q) const { return std::size_t{1} << (m_ - 1 - q); }

  void apply(const Gate& gate) {
    validate(gate, m_);
    std::visit([this](const auto& g) { apply_impl(g); }, gate);
  }

 private:
  void apply_impl(const gates::H& g) {
    static const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
    const std::size_t t = mask(g.target);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (i & t) continue;
      const Amplitude a0 = amps_[i];
      const Amplitude a1 = amps_[i | t];
      amps_[i] = (a0 + a1) * kInvSqrt2;
      amps_[i | t] = (a0 - a1) * kInvSqrt2;
    }
  }

  void apply_impl(const gates::RY& g) {
    const double c = std::cos(g.theta / 2);
    const double s = std::sin(g.theta / 2);
    const std::size_t t = mask(g.target);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (i & t) continue;
      const Amplitude a0 = amps_[i];
      const Amplitude a1 = amps_[i | t];
      amps_[i] = c * a0 - s * a1;
      amps_[i | t] = s * a0 + c * a1;
    }
  }

  // Flips the target on every basis state where (i & care) == want.
  void controlled_flip(std::size_t care, std::size_t want, Qubit target) {
    const std::size_t t = mask(target);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if ((i & t) == 0 && (i & care) == want) std::swap(amps_[i], amps_[i | t]);
    }
  }

  void apply_impl(const gates::X& g) { controlled_flip(0, 0, g.target); }
  void apply_impl(const gates::CX& g) {
    controlled_flip(mask(g.control), mask(g.control), g.target);
  }
  void apply_impl(const gates::CCX& g) {
    const std::size_t c = mask(g.control1) | mask(g.control2);
    controlled_flip(c, c, g.target);
  }
  void apply_impl(const gates::MCX& g) {
    std::size_t care = 0, want = 0;
    for (const auto& c : g.controls) {
      care |= mask(c.qubit);
      if (c.positive) want |= mask(c.qubit);
    }
    controlled_flip(care, want, g.target);
  }

  std::size_t m_;
  std::vector<Amplitude> amps_;
};

inline StateVector init_state(std::size_t num_qubits) { return StateVector(num_qubits); }

inline StateVector apply(StateVector state, const Gate& gate) {
  state.apply(gate);
  return state;
}

inline StateVector run(std::size_t num_qubits, const std::vector<Gate>& gate_list) {
  StateVector state(num_qubits);
  for (const auto& g : gate_list) state.apply(g);
  return state;
}

/// Probabilities keyed by bitstring. Entries below kPruneThreshold are omitted.
struct Distribution {
  std::size_t width = 0;
  std::map<std::string, double> probs;

  double at(const std::string& key) const {
    auto it = probs.find(key);
    return it == probs.end() ? 0.0 : it->second;
  }
  double total() const {
    double s = 0;
    for (const auto& [k, p] : probs) s += p;
    return s;
  }
};

inline std::string to_bitstring(std::uint64_t value, std::size_t width) {
  std::string s(width, '0');
  for (std::size_t i = 0; i < width; ++i) {
    if ((value >> (width - 1 - i)) & 1u) s[i] = '1';
  }
  return s;
}

namespace detail {

inline void check_keep(const StateVector& state, const std::vector<Qubit>& keep) {
  if (keep.empty()) throw UsageError("qubit selection must be nonempty");
  std::vector<bool> seen(state.num_qubits(), false);
  for (Qubit q : keep) {
    if (q >= state.num_qubits()) {
      throw UsageError("qubit index " + std::to_string(q) + " out of range for " +
                       std::to_string(state.num_qubits()) + " qubits");
    }
    if (seen[q]) throw UsageError("qubit " + std::to_string(q) + " selected twice");
    seen[q] = true;
  }
}

/// Index of a basis state restricted to `keep`, keep[0] most significant.
inline std::size_t project(const StateVector& state, const std::vector<Qubit>& keep,
                           std::size_t index) {
  std::size_t out = 0;
  for (Qubit q : keep) out = (out << 1) | static_cast<std::size_t>((index & state.mask(q)) != 0);
  return out;
}

inline std::vector<double> marginal_dense(const StateVector& state, const std::vector<Qubit>& keep) {
  check_keep(state, keep);
  std::vector<double> p(std::size_t{1} << keep.size(), 0.0);
  const auto& amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) p[project(state, keep, i)] += std::norm(amps[i]);
  return p;
}

inline Distribution to_distribution(const std::vector<double>& dense, std::size_t width) {
  Distribution d;
  d.width = width;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] >= kPruneThreshold) d.probs.emplace(to_bitstring(i, width), dense[i]);
  }
  return d;
}

}  // namespace detail

inline Distribution marginal(const StateVector& state, const std::vector<Qubit>& keep) {
  return detail::to_distribution(detail::marginal_dense(state, keep), keep.size());
}

inline std::vector<Qubit> all_qubits(std::size_t m) {
  std::vector<Qubit> q(m);
  for (std::size_t i = 0; i < m; ++i) q[i] = i;
  return q;
}

inline Distribution probabilities(const StateVector& state) {
  return marginal(state, all_qubits(state.num_qubits()));
}

struct ShotCounts {
  std::size_t shots = 0;
  std::uint64_t seed = 0;
  std::map<std::string, std::size_t> counts;
};

/// Draws `shots` outcomes of the `keep` marginal. Uses mt19937_64 seeded with
/// `seed`; each draw is (rng() >> 11) * 2^-53 inverted through the cumulative
/// distribution in ascending bitstring order.
inline ShotCounts sample(const StateVector& state, const std::vector<Qubit>& keep,
                         std::size_t shots, std::uint64_t seed) {
  if (shots == 0) throw UsageError("shots must be at least 1");
  const std::vector<double> p = detail::marginal_dense(state, keep);
  std::vector<double> cumulative(p.size());
  double acc = 0;
  for (std::size_t i = 0; i < p.size(); ++i) cumulative[i] = acc += p[i];

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> tally(p.size(), 0);
  for (std::size_t s = 0; s < shots; ++s) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * acc;
    std::size_t k = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    if (k >= p.size()) k = p.size() - 1;
    ++tally[k];
  }

  ShotCounts out{shots, seed, {}};
  for (std::size_t i = 0; i < tally.size(); ++i) {
    if (tally[i] > 0) out.counts.emplace(to_bitstring(i, keep.size()), tally[i]);
  }
  return out;
}

struct DensityMatrix {
  std::size_t num_qubits = 0;
  Eigen::MatrixXcd entries;

  double trace() const { return entries.trace().real(); }
  double purity() const { return (entries * entries).trace().real(); }
};

/// Partial trace of |state><state| over every qubit not in `keep`. Row and
/// column indices follow the order of `keep`, keep[0] most significant.
inline DensityMatrix reduced_density(const StateVector& state, const std::vector<Qubit>& keep) {
  detail::check_keep(state, keep);
  std::vector<Qubit> rest;
  {
    std::vector<bool> kept(state.num_qubits(), false);
    for (Qubit q : keep) kept[q] = true;
    for (Qubit q = 0; q < state.num_qubits(); ++q) {
      if (!kept[q]) rest.push_back(q);
    }
  }
  const std::size_t rows = std::size_t{1} << keep.size();
  const std::size_t cols = std::size_t{1} << rest.size();
  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows),
                                                static_cast<Eigen::Index>(cols));
  const auto& amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (amps[i] == Amplitude{}) continue;
    const auto r = static_cast<Eigen::Index>(detail::project(state, keep, i));
    const auto c = rest.empty() ? Eigen::Index{0}
                                : static_cast<Eigen::Index>(detail::project(state, rest, i));
    psi(r, c) = amps[i];
  }
  return {keep.size(), psi * psi.adjoint()};
}

/// Von Neumann entropy in bits.
inline double entropy(const DensityMatrix& dm) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dm.entries, Eigen::EigenvaluesOnly);
  double s = 0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double lambda = solver.eigenvalues()[i];
    if (lambda > kEigenFloor) s -= lambda * std::log2(lambda);
  }
  return s;
}

}  // namespace sstoken::qsim

#endif  // SSTOKEN_QSIM_HPP_
