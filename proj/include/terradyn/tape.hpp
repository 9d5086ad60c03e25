// Copyright 2026 The terradyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Scalar reverse-mode tape. Every Var arithmetic op performs exactly the
// same double operation the plain-double code path performs, so a taped
// rollout is bit-identical to the untaped one. Branches (contact on/off,
// clamps) are decided on values and recorded implicitly by which nodes
// get pushed; backward holds them fixed.

#ifndef TERRADYN_TAPE_HPP_
#define TERRADYN_TAPE_HPP_

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "terradyn/core.hpp"

namespace terradyn::ad {

enum class Op : std::uint8_t {
  kLeaf,
  kAdd,   // a + b
  kSub,   // a - b
  kMul,   // a * b
  kDiv,   // a / b
  kNeg,   // -a
  kAddC,  // a + c
  kSubC,  // a - c
  kSubRC, // c - a
  kMulC,  // a * c
  kDivC,  // a / c
  kDivRC, // c / a
  kSqrt,
  kSin,
  kCos,
  kAtan2, // atan2(a, b)
  kMin,   // a if a <= b else b
  kMax,   // a if a >= b else b
  kMinC,  // min(a, c)
  kMaxC,  // max(a, c)
};

struct Node {
  Op op = Op::kLeaf;
  std::int32_t a = -1;
  std::int32_t b = -1;
  double pa = 0;  // d val / d a
  double pb = 0;  // d val / d b, or the constant operand for *C ops
  double val = 0;
};

class Tape;

struct Var {
  Tape* tape = nullptr;
  std::int32_t idx = -1;
  double v = 0;

  Var() = default;
  // Constant not attached to any tape; combining it with taped Vars
  // records the constant operand without a node of its own.
  Var(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
  Var(Tape* t, std::int32_t i, double value) : tape(t), idx(i), v(value) {}
};

inline double value_of(double x) { return x; }
inline double value_of(const Var& x) { return x.v; }

class Tape {
 public:
  explicit Tape(std::size_t max_nodes = 50'000'000) : max_nodes_(max_nodes) {}

  Var leaf(double value) {
    return Var(this, push(Node{Op::kLeaf, -1, -1, 0, 0, value}), value);
  }

  std::size_t size() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }

  std::int32_t push(Node n) {
    if (nodes_.size() >= max_nodes_)
      throw NumericalError("Tape: node limit exceeded (" +
                           std::to_string(max_nodes_) +
                           "); raise SimConfig.max_tape_nodes");
    nodes_.push_back(n);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  // Reverse sweep: seeds are (node index, upstream adjoint) pairs; returns
  // the adjoint of every node.
  std::vector<double> adjoints(
      const std::vector<std::pair<std::int32_t, double>>& seeds) const {
    std::vector<double> adj(nodes_.size(), 0.0);
    for (auto& [i, g] : seeds) adj[static_cast<std::size_t>(i)] += g;
    for (std::size_t k = nodes_.size(); k-- > 0;) {
      double g = adj[k];
      if (g == 0.0) continue;
      const Node& n = nodes_[k];
      if (n.a >= 0) adj[static_cast<std::size_t>(n.a)] += n.pa * g;
      if (n.b >= 0 && op_has_parent_b(n.op))
        adj[static_cast<std::size_t>(n.b)] += n.pb * g;
    }
    return adj;
  }

  // Recompute every node value from its parents; used to check that the
  // tape reproduces the recorded forward pass.
  std::vector<double> replay() const {
    std::vector<double> val(nodes_.size());
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      const Node& n = nodes_[k];
      auto A = [&] { return val[static_cast<std::size_t>(n.a)]; };
      auto B = [&] { return val[static_cast<std::size_t>(n.b)]; };
      switch (n.op) {
        case Op::kLeaf: val[k] = n.val; break;
        case Op::kAdd: val[k] = A() + B(); break;
        case Op::kSub: val[k] = A() - B(); break;
        case Op::kMul: val[k] = A() * B(); break;
        case Op::kDiv: val[k] = A() / B(); break;
        case Op::kNeg: val[k] = -A(); break;
        case Op::kAddC: val[k] = A() + n.pb; break;
        case Op::kSubC: val[k] = A() - n.pb; break;
        case Op::kSubRC: val[k] = n.pb - A(); break;
        case Op::kMulC: val[k] = A() * n.pb; break;
        case Op::kDivC: val[k] = A() / n.pb; break;
        case Op::kDivRC: val[k] = n.pb / A(); break;
        case Op::kSqrt: val[k] = std::sqrt(A()); break;
        case Op::kSin: val[k] = std::sin(A()); break;
        case Op::kCos: val[k] = std::cos(A()); break;
        case Op::kAtan2: val[k] = std::atan2(A(), B()); break;
        case Op::kMin: val[k] = A() <= B() ? A() : B(); break;
        case Op::kMax: val[k] = A() >= B() ? A() : B(); break;
        case Op::kMinC: val[k] = A() <= n.pb ? A() : n.pb; break;
        case Op::kMaxC: val[k] = A() >= n.pb ? A() : n.pb; break;
      }
    }
    return val;
  }

 private:
  static bool op_has_parent_b(Op op) {
    switch (op) {
      case Op::kAdd:
      case Op::kSub:
      case Op::kMul:
      case Op::kDiv:
      case Op::kAtan2:
      case Op::kMin:
      case Op::kMax:
        return true;
      default:
        return false;
    }
  }

  std::vector<Node> nodes_;
  std::size_t max_nodes_;
};

namespace detail {
inline Var push2(const Var& a, const Var& b, Op op, double val, double pa,
                 double pb) {
  Tape* t = a.tape ? a.tape : b.tape;
  if (!t) return Var(val);
  // Materialize detached constants as leaves so the tape stays replayable.
  std::int32_t ia = a.idx >= 0 ? a.idx : t->push(Node{Op::kLeaf, -1, -1, 0, 0, a.v});
  std::int32_t ib = b.idx >= 0 ? b.idx : t->push(Node{Op::kLeaf, -1, -1, 0, 0, b.v});
  return Var(t, t->push(Node{op, ia, ib, pa, pb, val}), val);
}
inline Var push1(const Var& a, Op op, double val, double pa, double c = 0) {
  Tape* t = a.tape;
  if (!t) return Var(val);
  return Var(t, t->push(Node{op, a.idx, -1, pa, c, val}), val);
}
}  // namespace detail

inline Var operator+(const Var& a, const Var& b) {
  return detail::push2(a, b, Op::kAdd, a.v + b.v, 1, 1);
}
inline Var operator-(const Var& a, const Var& b) {
  return detail::push2(a, b, Op::kSub, a.v - b.v, 1, -1);
}
inline Var operator*(const Var& a, const Var& b) {
  return detail::push2(a, b, Op::kMul, a.v * b.v, b.v, a.v);
}
inline Var operator/(const Var& a, const Var& b) {
  double val = a.v / b.v;
  return detail::push2(a, b, Op::kDiv, val, 1.0 / b.v, -val / b.v);
}
inline Var operator-(const Var& a) {
  return detail::push1(a, Op::kNeg, -a.v, -1);
}

inline Var operator+(const Var& a, double c) {
  return detail::push1(a, Op::kAddC, a.v + c, 1, c);
}
inline Var operator+(double c, const Var& a) { return a + c; }
inline Var operator-(const Var& a, double c) {
  return detail::push1(a, Op::kSubC, a.v - c, 1, c);
}
inline Var operator-(double c, const Var& a) {
  return detail::push1(a, Op::kSubRC, c - a.v, -1, c);
}
inline Var operator*(const Var& a, double c) {
  return detail::push1(a, Op::kMulC, a.v * c, c, c);
}
inline Var operator*(double c, const Var& a) {
  // Same operand order as the double path.
  return detail::push1(a, Op::kMulC, c * a.v, c, c);
}
inline Var operator/(const Var& a, double c) {
  return detail::push1(a, Op::kDivC, a.v / c, 1.0 / c, c);
}
inline Var operator/(double c, const Var& a) {
  double val = c / a.v;
  return detail::push1(a, Op::kDivRC, val, -val / a.v, c);
}

inline Var sqrt(const Var& a) {
  double val = std::sqrt(a.v);
  return detail::push1(a, Op::kSqrt, val, 0.5 / val);
}
inline Var sin(const Var& a) {
  return detail::push1(a, Op::kSin, std::sin(a.v), std::cos(a.v));
}
inline Var cos(const Var& a) {
  return detail::push1(a, Op::kCos, std::cos(a.v), -std::sin(a.v));
}
inline Var atan2(const Var& y, const Var& x) {
  double denom = x.v * x.v + y.v * y.v;
  return detail::push2(y, x, Op::kAtan2, std::atan2(y.v, x.v), x.v / denom,
                       -y.v / denom);
}

inline bool operator<(const Var& a, const Var& b) { return a.v < b.v; }
inline bool operator<=(const Var& a, const Var& b) { return a.v <= b.v; }
inline bool operator>(const Var& a, const Var& b) { return a.v > b.v; }
inline bool operator>=(const Var& a, const Var& b) { return a.v >= b.v; }
inline bool operator<(const Var& a, double b) { return a.v < b; }
inline bool operator<=(const Var& a, double b) { return a.v <= b; }
inline bool operator>(const Var& a, double b) { return a.v > b; }
inline bool operator>=(const Var& a, double b) { return a.v >= b; }

// Branch-selecting min/max; ties take the first argument on both code
// paths so double and Var rollouts agree.
inline Var min(const Var& a, const Var& b) {
  bool first = a.v <= b.v;
  return detail::push2(a, b, Op::kMin, first ? a.v : b.v, first ? 1.0 : 0.0,
                       first ? 0.0 : 1.0);
}
inline Var max(const Var& a, const Var& b) {
  bool first = a.v >= b.v;
  return detail::push2(a, b, Op::kMax, first ? a.v : b.v, first ? 1.0 : 0.0,
                       first ? 0.0 : 1.0);
}
inline Var min(const Var& a, double c) {
  bool first = a.v <= c;
  return detail::push1(a, Op::kMinC, first ? a.v : c, first ? 1.0 : 0.0, c);
}
inline Var max(const Var& a, double c) {
  bool first = a.v >= c;
  return detail::push1(a, Op::kMaxC, first ? a.v : c, first ? 1.0 : 0.0, c);
}

}  // namespace terradyn::ad

namespace terradyn::scalar {
// Generic helpers resolving to the same semantics on double and Var.
inline double smin(double a, double b) { return a <= b ? a : b; }
inline double smax(double a, double b) { return a >= b ? a : b; }
inline ad::Var smin(const ad::Var& a, const ad::Var& b) { return ad::min(a, b); }
inline ad::Var smax(const ad::Var& a, const ad::Var& b) { return ad::max(a, b); }
inline ad::Var smin_c(const ad::Var& a, double c) { return ad::min(a, c); }
inline double smin_c(double a, double c) { return a <= c ? a : c; }
inline ad::Var smax_c(const ad::Var& a, double c) { return ad::max(a, c); }
inline double smax_c(double a, double c) { return a >= c ? a : c; }
}  // namespace terradyn::scalar

#endif  // TERRADYN_TAPE_HPP_
