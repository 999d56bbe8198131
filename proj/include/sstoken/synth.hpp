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

#ifndef SSTOKEN_SYNTH_HPP_
#define SSTOKEN_SYNTH_HPP_

// Circuit construction for the token ring and the reference entangled states.
//
// Register layout: x_i lives on qubit i, ancilla j on qubit n_x + j. A rule
// application for node i uses one fresh ancilla: the ancilla receives the
// guard of node i, then controls the flip of x_i. The ancilla is left dirty;
// the pair (x after the move, guard bit) is an injective image of the input x.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sstoken/errors.hpp"
#include "sstoken/qsim.hpp"
#include "sstoken/ring.hpp"

namespace sstoken::synth {

using qsim::Gate;
using qsim::Qubit;
using ring::NodeId;

struct RegisterLayout {
  std::size_t n_x = 0;
  std::size_t n_anc = 0;

  std::size_t total() const noexcept { return n_x + n_anc; }

  Qubit x_index(std::size_t i) const {
    if (i >= n_x) throw UsageError("x register index " + std::to_string(i) + " out of range");
    return i;
  }
  Qubit anc_index(std::size_t j) const {
    if (j >= n_anc) throw UsageError("ancilla index " + std::to_string(j) + " out of range");
    return n_x + j;
  }
  std::vector<Qubit> x_qubits() const {
    std::vector<Qubit> q(n_x);
    for (std::size_t i = 0; i < n_x; ++i) q[i] = i;
    return q;
  }
  std::vector<Qubit> anc_qubits() const {
    std::vector<Qubit> q(n_anc);
    for (std::size_t j = 0; j < n_anc; ++j) q[j] = n_x + j;
    return q;
  }

  friend bool operator==(const RegisterLayout&, const RegisterLayout&) = default;
};

struct Circuit {
  std::size_t num_qubits = 0;
  RegisterLayout layout;
  std::vector<Gate> gates;
  std::vector<Qubit> measured;
  /// Rule applications this circuit encodes, in order (empty for GHZ/W).
  std::vector<NodeId> schedule;

  friend bool operator==(const Circuit&, const Circuit&) = default;
};

/// Serialized rule applications on a ring of size n.
struct ScheduleSpec {
  std::size_t n = 0;
  std::vector<NodeId> order;

  void validate() const {
    if (n < 2) throw UsageError("ring size must be at least 2");
    for (NodeId i : order) {
      if (i >= n) {
        throw UsageError("schedule entry " + std::to_string(i) + " out of range for ring of size " +
                         std::to_string(n));
      }
    }
  }
};

inline qsim::StateVector simulate(const Circuit& circuit) {
  return qsim::run(circuit.num_qubits, circuit.gates);
}

/// One H per x qubit.
inline std::vector<Gate> uniform_init(std::size_t n) {
  if (n < 1) throw UsageError("uniform_init needs at least one qubit");
  std::vector<Gate> g;
  for (Qubit q = 0; q < n; ++q) g.push_back(qsim::gates::H{q});
  return g;
}

/// Gates for one rule application of node i on a ring of size n, recording
/// the guard in qubit `anc`, which must hold |0>.
inline std::vector<Gate> rule_fragment(const RegisterLayout& layout, NodeId i, Qubit anc) {
  using namespace qsim::gates;
  const std::size_t n = layout.n_x;
  if (n < 2) throw UsageError("ring size must be at least 2");
  const Qubit xi = layout.x_index(i);
  if (i == 0) {
    const Qubit xlast = layout.x_index(n - 1);
    return {CX{xlast, anc}, CX{xi, anc}, X{anc}, CX{anc, xi}};
  }
  const Qubit xprev = layout.x_index(i - 1);
  return {CX{xprev, anc}, CX{xi, anc}, CX{anc, xi}};
}

/// Incremental construction of ring circuits. Each ancilla slot may host one
/// rule application.
class ScheduleBuilder {
 public:
  ScheduleBuilder(std::size_t n, std::size_t ancillas) {
    if (n < 2) throw UsageError("ring size must be at least 2");
    circuit_.layout = {n, ancillas};
    circuit_.num_qubits = n + ancillas;
    if (circuit_.num_qubits > qsim::kMaxQubits) {
      throw CapacityError("circuit needs " + std::to_string(circuit_.num_qubits) +
                          " qubits, limit is " + std::to_string(qsim::kMaxQubits));
    }
    circuit_.measured = circuit_.layout.x_qubits();
    used_.assign(ancillas, false);
  }

  ScheduleBuilder& uniform_init() {
    for (auto& g : synth::uniform_init(circuit_.layout.n_x)) circuit_.gates.push_back(std::move(g));
    return *this;
  }

  ScheduleBuilder& rule(NodeId i, std::size_t slot) {
    const Qubit anc = circuit_.layout.anc_index(slot);
    if (used_[slot]) throw ConstructionError("ancilla slot " + std::to_string(slot) + " already used");
    used_[slot] = true;
    for (auto& g : rule_fragment(circuit_.layout, i, anc)) circuit_.gates.push_back(std::move(g));
    circuit_.schedule.push_back(i);
    return *this;
  }

  /// Unconditional X on x_i (a transient fault).
  ScheduleBuilder& flip(NodeId i) {
    circuit_.gates.push_back(qsim::gates::X{circuit_.layout.x_index(i)});
    return *this;
  }

  Circuit build() const& { return circuit_; }
  Circuit build() && { return std::move(circuit_); }

 private:
  Circuit circuit_;
  std::vector<bool> used_;
};

/// A single rule application for node i on an n-ring with one ancilla and no
/// initialization, for basis-state checks.
inline Circuit rule_circuit(std::size_t n, NodeId i) {
  return ScheduleBuilder(n, 1).rule(i, 0).build();
}

/// Uniform initialization followed by one rule application per schedule entry,
/// each on its own fresh ancilla.
inline Circuit schedule_circuit(const ScheduleSpec& spec) {
  spec.validate();
  if (spec.order.empty()) throw UsageError("schedule must contain at least one rule application");
  ScheduleBuilder b(spec.n, spec.order.size());
  b.uniform_init();
  for (std::size_t k = 0; k < spec.order.size(); ++k) b.rule(spec.order[k], k);
  return std::move(b).build();
}

namespace detail {

inline Circuit plain_circuit(std::size_t n, std::vector<Gate> gate_list) {
  Circuit c;
  c.num_qubits = n;
  c.layout = {n, 0};
  c.gates = std::move(gate_list);
  c.measured = c.layout.x_qubits();
  return c;
}

}  // namespace detail

/// (|0...0> + |1...1>)/sqrt(2): H on qubit 0, then a CX chain.
inline Circuit ghz_circuit(std::size_t n) {
  if (n < 2) throw UsageError("GHZ circuit needs at least 2 qubits");
  if (n > qsim::kMaxQubits) throw CapacityError("GHZ circuit exceeds qubit limit");
  std::vector<Gate> g{qsim::gates::H{0}};
  for (Qubit q = 0; q + 1 < n; ++q) g.push_back(qsim::gates::CX{q, q + 1});
  return detail::plain_circuit(n, std::move(g));
}

/// Uniform superposition of the n one-hot states. Starts from |10...0> and
/// moves amplitude down the register: at step k a controlled RY from qubit
/// k-1 to k keeps 1/sqrt(n) on qubit k-1 and a CX(k, k-1) clears the
/// transferred branch. Controlled RY is spelled with two RY halves around CX.
inline Circuit w_circuit(std::size_t n) {
  using namespace qsim::gates;
  if (n < 2) throw UsageError("W circuit needs at least 2 qubits");
  if (n > qsim::kMaxQubits) throw CapacityError("W circuit exceeds qubit limit");
  std::vector<Gate> g{X{0}};
  for (Qubit k = 1; k < n; ++k) {
    const double remaining = static_cast<double>(n - k + 1);
    const double theta = 2.0 * std::acos(std::sqrt(1.0 / remaining));
    g.push_back(RY{k, theta / 2});
    g.push_back(CX{k - 1, k});
    g.push_back(RY{k, -theta / 2});
    g.push_back(CX{k - 1, k});
    g.push_back(CX{k, k - 1});
  }
  return detail::plain_circuit(n, std::move(g));
}

// ---------------------------------------------------------------------------
// Text format
//
//   qubits <m>
//   x <i0,i1,...>          optional pair; present iff the circuit has ancillas
//   anc <j0,j1,...>|-
//   h <q> | x <q> | ry <q> <theta> | cx <c> <t> | ccx <c1> <c2> <t>
//   mcx <c:+|-> ... <t>
//   measure <i0,i1,...>
//
// `#` starts a comment. The comment `# schedule <list>` carries the schedule
// annotation.

namespace detail {

inline std::string join(const std::vector<std::size_t>& v, const char* empty = "") {
  if (v.empty()) return empty;
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(v[k]);
  }
  return s;
}

inline std::string format_angle(double theta) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", theta);
  return buf;
}

struct GateWriter {
  std::ostream& out;
  void operator()(const qsim::gates::H& g) const { out << "h " << g.target; }
  void operator()(const qsim::gates::X& g) const { out << "x " << g.target; }
  void operator()(const qsim::gates::RY& g) const {
    out << "ry " << g.target << ' ' << format_angle(g.theta);
  }
  void operator()(const qsim::gates::CX& g) const { out << "cx " << g.control << ' ' << g.target; }
  void operator()(const qsim::gates::CCX& g) const {
    out << "ccx " << g.control1 << ' ' << g.control2 << ' ' << g.target;
  }
  void operator()(const qsim::gates::MCX& g) const {
    out << "mcx";
    for (const auto& c : g.controls) out << ' ' << c.qubit << ':' << (c.positive ? '+' : '-');
    out << ' ' << g.target;
  }
};

}  // namespace detail

inline std::string emit(const Circuit& c) {
  std::ostringstream out;
  out << "qubits " << c.num_qubits << '\n';
  if (!c.schedule.empty()) out << "# schedule " << detail::join(c.schedule) << '\n';
  if (c.layout.n_anc > 0) {
    out << "x " << detail::join(c.layout.x_qubits()) << '\n';
    out << "anc " << detail::join(c.layout.anc_qubits(), "-") << '\n';
  }
  for (const auto& g : c.gates) {
    std::visit(detail::GateWriter{out}, g);
    out << '\n';
  }
  out << "measure " << detail::join(c.measured) << '\n';
  return out.str();
}

namespace detail {

struct Statement {
  std::size_t line;
  std::vector<std::string> words;
};

inline std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) words.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return words;
}

inline std::size_t parse_index(const std::string& word, std::size_t line) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
  if (ec != std::errc{} || ptr != word.data() + word.size()) {
    throw ParseError(line, "expected a nonnegative integer, got '" + word + "'");
  }
  return v;
}

inline std::vector<std::size_t> parse_list(const std::string& word, std::size_t line) {
  std::vector<std::size_t> out;
  if (word == "-") return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = word.find(',', start);
    out.push_back(parse_index(word.substr(start, comma - start), line));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_angle(const std::string& word, std::size_t line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
  if (ec != std::errc{} || ptr != word.data() + word.size() || !std::isfinite(v)) {
    throw ParseError(line, "expected a finite angle, got '" + word + "'");
  }
  return v;
}

inline void expect_arity(const Statement& st, std::size_t args) {
  if (st.words.size() != args + 1) {
    throw ParseError(st.line, "'" + st.words[0] + "' takes " + std::to_string(args) +
                                  " argument(s), got " + std::to_string(st.words.size() - 1));
  }
}

inline Gate parse_gate(const Statement& st) {
  using namespace qsim::gates;
  const std::string& op = st.words[0];
  auto idx = [&](std::size_t k) { return parse_index(st.words[k], st.line); };
  if (op == "h") {
    expect_arity(st, 1);
    return H{idx(1)};
  }
  if (op == "x") {
    expect_arity(st, 1);
    return X{idx(1)};
  }
  if (op == "ry") {
    expect_arity(st, 2);
    return RY{idx(1), parse_angle(st.words[2], st.line)};
  }
  if (op == "cx") {
    expect_arity(st, 2);
    return CX{idx(1), idx(2)};
  }
  if (op == "ccx") {
    expect_arity(st, 3);
    return CCX{idx(1), idx(2), idx(3)};
  }
  if (op == "mcx") {
    if (st.words.size() < 3) throw ParseError(st.line, "'mcx' needs at least one control and a target");
    MCX g;
    for (std::size_t k = 1; k + 1 < st.words.size(); ++k) {
      const std::string& w = st.words[k];
      const std::size_t colon = w.find(':');
      if (colon == std::string::npos || colon + 2 != w.size() ||
          (w.back() != '+' && w.back() != '-')) {
        throw ParseError(st.line, "mcx control must look like <qubit>:+ or <qubit>:-, got '" + w + "'");
      }
      g.controls.push_back({parse_index(w.substr(0, colon), st.line), w.back() == '+'});
    }
    g.target = idx(st.words.size() - 1);
    return g;
  }
  throw ParseError(st.line, "unknown statement '" + op + "'");
}

inline void expect_range(const std::vector<std::size_t>& got, std::size_t from, std::size_t count,
                         const char* what, std::size_t line) {
  bool ok = got.size() == count;
  for (std::size_t k = 0; ok && k < count; ++k) ok = got[k] == from + k;
  if (!ok) {
    throw ParseError(line, std::string(what) + " register must be the contiguous ascending range starting at " +
                               std::to_string(from));
  }
}

}  // namespace detail

/// Parses the text format. Errors carry the 1-based physical line number.
inline Circuit parse(std::string_view text) {
  std::vector<detail::Statement> statements;
  std::vector<NodeId> schedule;
  std::size_t schedule_line = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) {
      auto comment = detail::split_words(line.substr(hash + 1));
      if (comment.size() == 2 && comment[0] == "schedule") {
        schedule = detail::parse_list(comment[1], line_no);
        schedule_line = line_no;
      }
      line = line.substr(0, hash);
    }
    auto words = detail::split_words(line);
    if (!words.empty()) statements.push_back({line_no, std::move(words)});
    if (end == text.size()) break;
  }

  if (statements.empty()) throw ParseError(line_no, "empty circuit text");
  const auto& head = statements.front();
  if (head.words[0] != "qubits") throw ParseError(head.line, "first statement must be 'qubits <m>'");
  detail::expect_arity(head, 1);

  Circuit c;
  c.num_qubits = detail::parse_index(head.words[1], head.line);
  if (c.num_qubits < 1 || c.num_qubits > qsim::kMaxQubits) {
    throw ParseError(head.line, "qubit count must be in [1, " + std::to_string(qsim::kMaxQubits) + "]");
  }
  c.layout = {c.num_qubits, 0};

  std::size_t k = 1;
  if (statements.size() > 2 && statements[1].words[0] == "x" && statements[2].words[0] == "anc") {
    detail::expect_arity(statements[1], 1);
    detail::expect_arity(statements[2], 1);
    const auto xs = detail::parse_list(statements[1].words[1], statements[1].line);
    const auto ancs = detail::parse_list(statements[2].words[1], statements[2].line);
    detail::expect_range(xs, 0, xs.size(), "x", statements[1].line);
    if (xs.size() + ancs.size() != c.num_qubits) {
      throw ParseError(statements[2].line, "x and anc registers must cover all " +
                                               std::to_string(c.num_qubits) + " qubits");
    }
    detail::expect_range(ancs, xs.size(), ancs.size(), "anc", statements[2].line);
    c.layout = {xs.size(), ancs.size()};
    k = 3;
  }

  for (; k < statements.size(); ++k) {
    const auto& st = statements[k];
    if (st.words[0] == "measure") {
      if (k + 1 != statements.size()) throw ParseError(statements[k + 1].line, "statement after 'measure'");
      detail::expect_arity(st, 1);
      c.measured = detail::parse_list(st.words[1], st.line);
      for (Qubit q : c.measured) {
        if (q >= c.num_qubits) {
          throw ParseError(st.line, "measured qubit " + std::to_string(q) + " out of range for " +
                                        std::to_string(c.num_qubits) + " qubits");
        }
      }
      break;
    }
    Gate g = detail::parse_gate(st);
    try {
      qsim::validate(g, c.num_qubits);
    } catch (const UsageError& e) {
      throw ParseError(st.line, e.what());
    }
    c.gates.push_back(std::move(g));
  }
  if (k == statements.size()) throw ParseError(line_no, "missing final 'measure' statement");
  for (NodeId i : schedule) {
    if (i >= c.layout.n_x) {
      throw ParseError(schedule_line,
                       "schedule annotation names node " + std::to_string(i) + " outside the x register");
    }
  }
  c.schedule = std::move(schedule);
  return c;
}

}  // namespace sstoken::synth

#endif  // SSTOKEN_SYNTH_HPP_
