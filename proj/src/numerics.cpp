#include "fleq/numerics.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fleq/errors.hpp"

namespace fleq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Vector solve_linear(const Matrix& a, const Vector& b) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix is not square");
  if (a.rows() != b.size()) throw std::invalid_argument("rhs size mismatch");
  if (a.rows() == 0) return Vector();

  const double scale = a.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw SingularMatrix("zero matrix");

  Eigen::PartialPivLU<Matrix> lu(a);
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (min_pivot < 1e-12 * scale)
    throw SingularMatrix("pivot below 1e-12 of matrix scale");

  Vector x = lu.solve(b);
  const double residual = (a * x - b).cwiseAbs().maxCoeff();
  const double bound = 1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff());
  if (!(residual <= bound))
    throw SingularMatrix("solution residual exceeds tolerance");
  return x;
}

IntervalSet IntervalSet::all() { return of(-kInf, kInf); }

IntervalSet IntervalSet::of(double lo, double hi) {
  return from_parts({Interval{lo, hi}});
}

IntervalSet IntervalSet::from_parts(std::vector<Interval> parts) {
  std::erase_if(parts, [](const Interval& p) { return p.empty(); });
  std::sort(parts.begin(), parts.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalSet set;
  for (const Interval& p : parts) {
    if (!set.parts_.empty() && p.lo <= set.parts_.back().hi)
      set.parts_.back().hi = std::max(set.parts_.back().hi, p.hi);
    else
      set.parts_.push_back(p);
  }
  return set;
}

bool IntervalSet::contains(double x, double tol) const {
  for (const Interval& p : parts_)
    if (p.contains(x, tol)) return true;
  return false;
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  std::vector<Interval> out;
  for (const Interval& p : parts_)
    for (const Interval& q : other.parts_) {
      Interval r{std::max(p.lo, q.lo), std::min(p.hi, q.hi)};
      if (!r.empty()) out.push_back(r);
    }
  return from_parts(std::move(out));
}

IntervalSet solve_quadratic_le_zero(double a2, double a1, double a0) {
  if (!(std::isfinite(a2) && std::isfinite(a1) && std::isfinite(a0)))
    throw std::invalid_argument("coefficients must be finite");

  if (a2 != 0.0) {
    const double disc = a1 * a1 - 4.0 * a2 * a0;
    if (a2 > 0.0) {
      if (disc < 0.0) return IntervalSet::none();
      const double s = std::sqrt(disc);
      const double r1 = (-a1 - s) / (2.0 * a2);
      const double r2 = (-a1 + s) / (2.0 * a2);
      return IntervalSet::of(std::min(r1, r2), std::max(r1, r2));
    }
    // Opens downward: nonpositive everywhere or outside the root pair.
    if (disc < 0.0) return IntervalSet::all();
    const double s = std::sqrt(disc);
    const double r1 = (-a1 - s) / (2.0 * a2);
    const double r2 = (-a1 + s) / (2.0 * a2);
    const double lo = std::min(r1, r2), hi = std::max(r1, r2);
    return IntervalSet::from_parts({{-kInf, lo}, {hi, kInf}});
  }

  if (a1 != 0.0) {
    const double x0 = -a0 / a1;
    return a1 > 0.0 ? IntervalSet::of(-kInf, x0) : IntervalSet::of(x0, kInf);
  }
  return a0 <= 0.0 ? IntervalSet::all() : IntervalSet::none();
}

namespace {

struct ResponseProblem {
  Vector beta;
  Vector gamma;
  Vector others_total;  // demand of everyone but i, per period
  double eps;
  Vector a;
  Vector b;

  double value(const Vector& x) const {
    double v = 0.0;
    for (Eigen::Index t = 0; t < x.size(); ++t) {
      const double p = beta[t] + gamma[t] * (others_total[t] + x[t]);
      v += -p * x[t] - 0.5 * (eps + a[t]) * x[t] * x[t] - b[t] * x[t];
    }
    return v;
  }

  Vector gradient(const Vector& x) const {
    Vector g(x.size());
    for (Eigen::Index t = 0; t < x.size(); ++t)
      g[t] = -beta[t] - gamma[t] * others_total[t] - 2.0 * gamma[t] * x[t] -
             (eps + a[t]) * x[t] - b[t];
    return g;
  }

  // Per-period curvature magnitude of the concave objective.
  Vector curvature() const { return 2.0 * gamma + Vector::Constant(gamma.size(), eps) + a; }
};

ResponseProblem make_problem(Eigen::Index i, const Schedule& others,
                             const MarketParams& market, const Fleet& fleet,
                             const std::optional<PeriodQuadratic>& extra_cost) {
  if (i < 0 || i >= fleet.size()) throw std::out_of_range("storage index");
  if (others.rows() != fleet.size() || others.cols() != market.periods())
    throw std::invalid_argument("schedule dimensions mismatch");
  const Eigen::Index nt = market.periods();
  ResponseProblem prob;
  prob.beta = market.beta;
  prob.gamma = market.gamma;
  prob.others_total = others.colwise().sum().transpose() - others.row(i).transpose();
  prob.eps = fleet.eps[i];
  if (extra_cost) {
    if (extra_cost->a.size() != nt || extra_cost->b.size() != nt)
      throw std::invalid_argument("surcharge size mismatch");
    prob.a = extra_cost->a;
    prob.b = extra_cost->b;
  } else {
    prob.a = Vector::Zero(nt);
    prob.b = Vector::Zero(nt);
  }
  return prob;
}

}  // namespace

double response_objective(Eigen::Index i, const Vector& row, const Schedule& others,
                          const MarketParams& market, const Fleet& fleet,
                          const std::optional<PeriodQuadratic>& extra_cost) {
  if (row.size() != market.periods()) throw std::invalid_argument("row size mismatch");
  return make_problem(i, others, market, fleet, extra_cost).value(row);
}

Vector numeric_best_response(Eigen::Index i, const Schedule& others,
                             const MarketParams& market, const Fleet& fleet,
                             const std::optional<PeriodQuadratic>& extra_cost) {
  const ResponseProblem prob = make_problem(i, others, market, fleet, extra_cost);
  const Vector curv = prob.curvature();

  Vector x = others.row(i).transpose();
  x.array() -= x.mean();

  constexpr int kMaxIter = 100000;
  constexpr double kGradTol = 1e-10;

  for (int iter = 0; iter < kMaxIter; ++iter) {
    Vector g = prob.gradient(x);
    g.array() -= g.mean();  // keep the search on the budget hyperplane
    if (g.cwiseAbs().maxCoeff() <= kGradTol) return x;

    const double gg = g.squaredNorm();
    const double gh = (curv.array() * g.array().square()).sum();
    double alpha = gh > 0.0 ? gg / gh : 1.0;

    const double f0 = prob.value(x);
    const double slope = 1e-4 * gg;
    // Near the optimum the true per-step gain drops below the rounding noise
    // of the objective, so acceptance carries a noise floor.
    const double noise = 1e-14 * (1.0 + std::abs(f0));
    bool stepped = false;
    for (int k = 0; k < 60; ++k) {
      Vector trial = x + alpha * g;
      trial.array() -= trial.mean();
      if (prob.value(trial) >= f0 + alpha * slope - noise) {
        x = std::move(trial);
        stepped = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!stepped)
      throw NonConvergence("best response stalled before reaching tolerance");
  }
  throw NonConvergence("best response exceeded the iteration budget");
}

}  // namespace fleq
