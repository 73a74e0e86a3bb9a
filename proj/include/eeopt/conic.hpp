// Copyright 2026 The eeopt Authors
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

// Backend-neutral description of a convex program with a linear objective
// and linear, second-order-cone and exponential-cone constraints.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eeopt/errors.hpp"

namespace eeopt::conic {

struct Variable {
  std::size_t index = 0;
};

/// Affine expression sum_i a_i x_i + b over program variables.
class LinExpr {
 public:
  LinExpr() = default;
  LinExpr(double constant) : constant_(constant) {}  // NOLINT
  LinExpr(Variable v) { terms_.emplace_back(v.index, 1.0); }  // NOLINT

  LinExpr& add(Variable v, double coef) {
    if (coef != 0.0) terms_.emplace_back(v.index, coef);
    return *this;
  }
  LinExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }

  LinExpr& operator+=(const LinExpr& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    constant_ += o.constant_;
    return *this;
  }
  LinExpr& operator-=(const LinExpr& o) { return *this += o * -1.0; }
  LinExpr& operator*=(double s) {
    for (auto& t : terms_) t.second *= s;
    constant_ *= s;
    return *this;
  }

  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(LinExpr a, double s) { return a *= s; }
  friend LinExpr operator*(double s, LinExpr a) { return a *= s; }
  friend LinExpr operator-(LinExpr a) { return a *= -1.0; }

  double constant() const { return constant_; }
  const std::vector<std::pair<std::size_t, double>>& terms() const {
    return terms_;
  }

  double evaluate(std::span<const double> x) const {
    double v = constant_;
    for (const auto& [i, a] : terms_) v += a * x[i];
    return v;
  }

  std::size_t max_index_plus_one() const {
    std::size_t m = 0;
    for (const auto& t : terms_) m = std::max(m, t.first + 1);
    return m;
  }

 private:
  std::vector<std::pair<std::size_t, double>> terms_;
  double constant_ = 0.0;
};

inline LinExpr operator*(Variable v, double s) { return LinExpr(v) * s; }
inline LinExpr operator*(double s, Variable v) { return LinExpr(v) * s; }

enum class ConstraintKind {
  Linear,           ///< exprs[0] >= 0
  Equality,         ///< exprs[0] == 0
  SecondOrderCone,  ///< ||exprs[1..]|| <= exprs[0]
  Exponential,      ///< exp(exprs[0]) <= exprs[1]
};

struct Constraint {
  ConstraintKind kind;
  std::vector<LinExpr> exprs;
  std::string label;
};

using ConstraintHandle = std::size_t;

class ConicProgram {
 public:
  Variable add_variable(std::string name) {
    names_.push_back(std::move(name));
    return Variable{names_.size() - 1};
  }

  std::vector<Variable> add_variables(const std::string& name,
                                      std::size_t count) {
    std::vector<Variable> vs;
    vs.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
      vs.push_back(add_variable(name + "[" + std::to_string(i) + "]"));
    return vs;
  }

  /// The program maximizes this expression.
  void maximize(LinExpr objective) {
    check(objective);
    objective_ = std::move(objective);
  }

  /// expr >= 0
  ConstraintHandle add_nonnegative(LinExpr expr, std::string label = {}) {
    return push(ConstraintKind::Linear, {std::move(expr)}, std::move(label));
  }

  /// lhs >= rhs
  ConstraintHandle add_greater_equal(const LinExpr& lhs, const LinExpr& rhs,
                                     std::string label = {}) {
    return add_nonnegative(lhs - rhs, std::move(label));
  }

  ConstraintHandle add_equality(LinExpr expr, std::string label = {}) {
    return push(ConstraintKind::Equality, {std::move(expr)}, std::move(label));
  }

  /// ||w|| <= u
  ConstraintHandle add_soc(const std::vector<LinExpr>& w, LinExpr u,
                           std::string label = {}) {
    std::vector<LinExpr> exprs;
    exprs.reserve(w.size() + 1);
    exprs.push_back(std::move(u));
    exprs.insert(exprs.end(), w.begin(), w.end());
    return push(ConstraintKind::SecondOrderCone, std::move(exprs),
                std::move(label));
  }

  /// ||w||^2 <= a * b with a, b >= 0, stored as
  /// ||(2w, a - b)|| <= a + b.
  ConstraintHandle add_rotated_quadratic(const std::vector<LinExpr>& w,
                                         const LinExpr& a, const LinExpr& b,
                                         std::string label = {}) {
    std::vector<LinExpr> lhs;
    lhs.reserve(w.size() + 1);
    for (const auto& e : w) lhs.push_back(2.0 * e);
    lhs.push_back(a - b);
    return add_soc(lhs, a + b, std::move(label));
  }

  /// exp(exponent) <= bound
  ConstraintHandle add_exponential(LinExpr exponent, LinExpr bound,
                                   std::string label = {}) {
    return push(ConstraintKind::Exponential,
                {std::move(exponent), std::move(bound)}, std::move(label));
  }

  std::size_t num_variables() const { return names_.size(); }
  const std::string& name(Variable v) const { return names_.at(v.index); }
  const std::vector<std::string>& names() const { return names_; }
  const LinExpr& objective() const { return objective_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  std::size_t count(ConstraintKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(constraints_.begin(), constraints_.end(),
                      [kind](const Constraint& c) { return c.kind == kind; }));
  }

  bool has_exponential() const {
    return count(ConstraintKind::Exponential) > 0;
  }

  /// Plain-text listing: variables first, then one constraint per line.
  std::string listing() const;

 private:
  void check(const LinExpr& e) const {
    if (e.max_index_plus_one() > names_.size())
      throw InvalidArgument("expression references an undeclared variable");
  }

  ConstraintHandle push(ConstraintKind kind, std::vector<LinExpr> exprs,
                        std::string label) {
    for (const auto& e : exprs) check(e);
    constraints_.push_back({kind, std::move(exprs), std::move(label)});
    return constraints_.size() - 1;
  }

  std::vector<std::string> names_;
  LinExpr objective_;
  std::vector<Constraint> constraints_;
};

/// Amount by which x violates constraint c (0 when satisfied).
inline double violation(const Constraint& c, std::span<const double> x) {
  switch (c.kind) {
    case ConstraintKind::Linear:
      return std::max(0.0, -c.exprs[0].evaluate(x));
    case ConstraintKind::Equality:
      return std::abs(c.exprs[0].evaluate(x));
    case ConstraintKind::SecondOrderCone: {
      double sq = 0.0;
      for (std::size_t i = 1; i < c.exprs.size(); ++i) {
        const double v = c.exprs[i].evaluate(x);
        sq += v * v;
      }
      return std::max(0.0, std::sqrt(sq) - c.exprs[0].evaluate(x));
    }
    case ConstraintKind::Exponential:
      return std::max(0.0,
                      std::exp(c.exprs[0].evaluate(x)) - c.exprs[1].evaluate(x));
  }
  return std::numeric_limits<double>::infinity();
}

/// Largest violation over all constraints; an independent feasibility check.
inline double max_violation(const ConicProgram& p, std::span<const double> x) {
  if (x.size() != p.num_variables())
    throw InvalidArgument("assignment size does not match variable count");
  double worst = 0.0;
  for (const auto& c : p.constraints()) worst = std::max(worst, violation(c, x));
  return worst;
}

enum class Status { Optimal, Infeasible, NumericalFailure };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::NumericalFailure: return "numerical_failure";
  }
  return "?";
}

struct SolveStatus {
  Status status = Status::NumericalFailure;
  double objective_value = std::numeric_limits<double>::quiet_NaN();
  /// Present iff status == Optimal; indexed by Variable::index.
  std::optional<std::vector<double>> assignment;
  int solver_iterations = 0;

  bool optimal() const { return status == Status::Optimal; }
  double value(Variable v) const { return assignment.value().at(v.index); }
};

struct BackendCapabilities {
  bool second_order_cone = true;
  bool exponential_cone = true;
};

/// Anything that can solve a ConicProgram. Implementations must be
/// stateless with respect to solve() so one instance can serve many threads.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendCapabilities capabilities() const = 0;
  /// `hint` optionally suggests a starting point (may be infeasible).
  virtual SolveStatus solve(const ConicProgram& program,
                            std::span<const double> hint = {}) const = 0;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string render(const LinExpr& e, const ConicProgram& p) {
  std::string s;
  for (const auto& [i, a] : e.terms()) {
    if (!s.empty()) s += a < 0 ? " - " : " + ";
    else if (a < 0) s += "-";
    s += fmt(std::abs(a)) + "*" + p.names()[i];
  }
  if (e.constant() != 0.0 || s.empty()) {
    if (!s.empty()) s += e.constant() < 0 ? " - " : " + ";
    else if (e.constant() < 0) s += "-";
    s += fmt(std::abs(e.constant()));
  }
  return s;
}

}  // namespace detail

inline std::string ConicProgram::listing() const {
  std::ostringstream os;
  os << "variables " << names_.size() << "\n";
  for (const auto& n : names_) os << "  " << n << "\n";
  os << "maximize " << detail::render(objective_, *this) << "\n";
  os << "constraints " << constraints_.size() << "\n";
  for (const auto& c : constraints_) {
    os << "  ";
    if (!c.label.empty()) os << c.label << ": ";
    switch (c.kind) {
      case ConstraintKind::Linear:
        os << detail::render(c.exprs[0], *this) << " >= 0";
        break;
      case ConstraintKind::Equality:
        os << detail::render(c.exprs[0], *this) << " == 0";
        break;
      case ConstraintKind::SecondOrderCone: {
        os << "||(";
        for (std::size_t i = 1; i < c.exprs.size(); ++i)
          os << (i > 1 ? ", " : "") << detail::render(c.exprs[i], *this);
        os << ")|| <= " << detail::render(c.exprs[0], *this);
        break;
      }
      case ConstraintKind::Exponential:
        os << "exp(" << detail::render(c.exprs[0], *this)
           << ") <= " << detail::render(c.exprs[1], *this);
        break;
    }
    os << "\n";
  }
  return os.str();
}

/// Adds sum_i ||p_i||^2 <= p_t over the real-expanded precoder entries.
inline ConstraintHandle add_power_constraint(ConicProgram& program,
                                             std::span<const Variable> entries,
                                             double p_t) {
  if (!(p_t >= 0.0)) throw InvalidArgument("power budget must be >= 0");
  std::vector<LinExpr> w;
  w.reserve(entries.size());
  for (auto v : entries) w.emplace_back(v);
  return program.add_soc(w, LinExpr(std::sqrt(p_t)), "power");
}

/// Adds theta >= 2^(alpha / W) as an exponential-cone constraint.
inline ConstraintHandle add_exp_rate_link(ConicProgram& program, Variable alpha,
                                          Variable theta, double bandwidth,
                                          const BackendCapabilities& caps = {},
                                          std::string label = "rate_link") {
  if (!caps.exponential_cone)
    throw BackendUnsupported("backend has no exponential cone support");
  if (!(bandwidth > 0.0)) throw InvalidArgument("bandwidth must be > 0");
  return program.add_exponential(alpha * (std::log(2.0) / bandwidth),
                                 LinExpr(theta), std::move(label));
}

}  // namespace eeopt::conic
