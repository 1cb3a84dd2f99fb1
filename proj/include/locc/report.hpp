#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "locc/states.hpp"

namespace locc {

/// One evaluated inequality lhs >= rhs. `k` or `mu` names the monotone.
struct Inequality {
  std::string name;
  std::optional<std::size_t> k;
  std::optional<double> mu;
  double lhs = 0.0;
  double rhs = 0.0;

  double margin() const { return lhs - rhs; }
  bool holds(double tol) const { return lhs >= rhs - tol; }
};

/// Violated inequality certifying a negative verdict.
struct ViolationWitness {
  Inequality inequality;
};

/// y with y^T A <= 0 on every column of the equality-form system
/// A z = b, z >= 0, and y^T b > 0. Rows are listed in `row_labels` order;
/// multipliers of inequality rows are <= 0.
struct FarkasWitness {
  std::vector<double> multipliers;
  std::vector<std::string> row_labels;
  double combined_rhs = 0.0;
};

/// Every checked condition with both sides; certifies verdicts whose method
/// is a monotone criterion rather than a constructive channel.
struct MarginTable {
  std::vector<Inequality> rows;
};

struct TrivialReason {
  std::string reason;
};

using Certificate =
    std::variant<TrivialReason, ConditionalChannel, ViolationWitness, FarkasWitness, MarginTable>;

struct DecisionReport {
  bool verdict = false;
  std::string method;
  Certificate certificate;
  // All evaluated conditions, including those that held.
  std::vector<Inequality> margins;

  // Smallest lhs - rhs among the margins (+inf if none).
  double min_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : margins) m = std::min(m, r.margin());
    return m;
  }
};

}  // namespace locc
