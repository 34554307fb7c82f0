#pragma once

#include <optional>
#include <vector>

#include "fleq/model.hpp"

namespace fleq {

// Solves A x = b by partially pivoted elimination. Throws SingularMatrix when
// the smallest pivot magnitude falls below 1e-12 * max|A|. The returned x is
// verified to satisfy ||A x - b||_inf <= 1e-9 * max(1, ||b||_inf).
Vector solve_linear(const Matrix& a, const Vector& b);

// Closed interval; +-infinity stand in for unbounded ends.
struct Interval {
  double lo;
  double hi;

  bool empty() const { return !(lo <= hi); }
  bool contains(double x, double tol = 0.0) const {
    return x >= lo - tol && x <= hi + tol;
  }
};

// Disjoint closed intervals, sorted ascending.
class IntervalSet {
 public:
  IntervalSet() = default;

  static IntervalSet none() { return IntervalSet(); }
  static IntervalSet all();
  static IntervalSet of(double lo, double hi);
  // Sorts, drops empty parts, merges overlaps.
  static IntervalSet from_parts(std::vector<Interval> parts);

  bool empty() const { return parts_.empty(); }
  bool contains(double x, double tol = 0.0) const;
  IntervalSet intersect(const IntervalSet& other) const;
  const std::vector<Interval>& parts() const { return parts_; }

 private:
  std::vector<Interval> parts_;
};

// All x with a2 x^2 + a1 x + a0 <= 0.
IntervalSet solve_quadratic_le_zero(double a2, double a1, double a0);

// Optional per-period surcharge on one storage: (a[t]/2) x^2 + b[t] x.
struct PeriodQuadratic {
  Vector a;
  Vector b;
};

// Profit of storage i playing `row` while the other rows of `others` stay
// fixed, net of the surcharge.
double response_objective(Eigen::Index i, const Vector& row, const Schedule& others,
                          const MarketParams& market, const Fleet& fleet,
                          const std::optional<PeriodQuadratic>& extra_cost = std::nullopt);

// Budget-constrained best response of storage i against the other rows, by
// projected gradient ascent with backtracking. Row i of `others` seeds the
// search; stops once the projected gradient max-norm is at most 1e-10, throws
// NonConvergence past 1e5 iterations.
Vector numeric_best_response(Eigen::Index i, const Schedule& others,
                             const MarketParams& market, const Fleet& fleet,
                             const std::optional<PeriodQuadratic>& extra_cost = std::nullopt);

}  // namespace fleq
