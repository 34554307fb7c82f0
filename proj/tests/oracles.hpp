#pragma once

// Test-side reference computations, kept independent of the library's solver
// paths on purpose: golden-section search over one variable and random
// problem instances from the pinned PRNG.

#include <cmath>
#include <functional>

#include "fleq/model.hpp"
#include "fleq/rng.hpp"

namespace oracle {

inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         double tol = 1e-13) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

struct RandomInstance {
  fleq::MarketParams market;
  fleq::Fleet fleet;
};

// n in [2, n_max], nt in [2, nt_max], beta in [0, 100], gamma in [0.01, 2],
// eps in [0.1, 10]. Continuous draws, so base prices tie only with
// probability zero and the coalition target always trades somewhere.
inline RandomInstance random_instance(fleq::SplitMix64& rng, Eigen::Index n_max = 20,
                                      Eigen::Index nt_max = 24) {
  const auto n = static_cast<Eigen::Index>(2 + rng.next_u64() % (n_max - 1));
  const auto nt = static_cast<Eigen::Index>(2 + rng.next_u64() % (nt_max - 1));
  fleq::Vector beta(nt);
  fleq::Vector gamma(nt);
  for (Eigen::Index t = 0; t < nt; ++t) {
    beta[t] = rng.uniform(0.0, 100.0);
    gamma[t] = rng.uniform(0.01, 2.0);
  }
  fleq::Vector eps(n);
  for (Eigen::Index i = 0; i < n; ++i) eps[i] = rng.uniform(0.1, 10.0);
  return {fleq::MarketParams(std::move(beta), std::move(gamma)),
          fleq::Fleet(std::move(eps))};
}

// Zero-sum perturbation of size `scale`, for probing budget-feasible moves.
inline fleq::Vector zero_mean_noise(fleq::SplitMix64& rng, Eigen::Index nt, double scale) {
  fleq::Vector v(nt);
  for (Eigen::Index t = 0; t < nt; ++t) v[t] = rng.uniform(-scale, scale);
  v.array() -= v.mean();
  return v;
}

}  // namespace oracle
