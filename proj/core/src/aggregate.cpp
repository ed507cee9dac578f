#include "audbandit/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "audbandit/errors.hpp"

namespace audbandit {

double StopReport::max_ppvr() const {
  return ppvr.empty() ? 0.0 : *std::max_element(ppvr.begin(), ppvr.end());
}

DrawCube draw_theta(const PosteriorState& state, int draws, Rng& rng) {
  if (draws < 1) throw Error(Errc::kInvalidArgument, "draw count H must be >= 1");
  const int creatives = state.creatives();
  const int contexts = state.contexts();
  DrawCube cube(draws, creatives, contexts);
  for (int r = 0; r < creatives; ++r) {
    for (int j = 0; j < contexts; ++j) {
      BetaSampler sampler(state.alpha(r, j), state.beta(r, j));
      for (int h = 0; h < draws; ++h) cube(h, r, j) = sampler(rng);
    }
  }
  return cube;
}

DrawCube aggregate_lambda(const DrawCube& theta, const Partition& partition) {
  if (theta.columns() != partition.num_cells()) {
    throw Error(Errc::kInvalidDimensions, "theta draws do not match the partition's cell count");
  }
  const int audiences = partition.num_audiences();
  DrawCube lambda(theta.draws(), theta.creatives(), audiences);
  for (int h = 0; h < theta.draws(); ++h) {
    for (int r = 0; r < theta.creatives(); ++r) {
      for (int k = 0; k < audiences; ++k) {
        double sum = 0.0;
        for (int j : partition.overlap_set(k)) sum += theta(h, r, j) * partition.cond_prob(j, k);
        lambda(h, r, k) = sum;
      }
    }
  }
  return lambda;
}

Eigen::MatrixXd aggregate_cost(const Eigen::MatrixXd& cost_da, const Partition& partition) {
  if (cost_da.cols() != partition.num_cells()) {
    throw Error(Errc::kInvalidDimensions, "cost matrix does not match the partition's cell count");
  }
  Eigen::MatrixXd cost_ta = Eigen::MatrixXd::Zero(cost_da.rows(), partition.num_audiences());
  for (int r = 0; r < cost_da.rows(); ++r) {
    for (int k = 0; k < partition.num_audiences(); ++k) {
      for (int j : partition.overlap_set(k)) cost_ta(r, k) += cost_da(r, j) * partition.cond_prob(j, k);
    }
  }
  return cost_ta;
}

DrawCube compute_omega(const DrawCube& lambda, double gamma, const Eigen::MatrixXd& cost_ta) {
  if (cost_ta.rows() != lambda.creatives() || cost_ta.cols() != lambda.columns()) {
    throw Error(Errc::kInvalidDimensions, "TA cost matrix does not match lambda draws");
  }
  DrawCube omega(lambda.draws(), lambda.creatives(), lambda.columns());
  for (int h = 0; h < lambda.draws(); ++h) {
    for (int r = 0; r < lambda.creatives(); ++r) {
      for (int k = 0; k < lambda.columns(); ++k) {
        omega(h, r, k) = gamma * lambda(h, r, k) - cost_ta(r, k);
      }
    }
  }
  return omega;
}

int best_creative(const DrawCube& omega, int k) {
  if (omega.draws() < 1) throw Error(Errc::kInvalidArgument, "no draws");
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < omega.creatives(); ++r) {
    double top = -std::numeric_limits<double>::infinity();
    for (int h = 0; h < omega.draws(); ++h) top = std::max(top, omega(h, r, k));
    if (top > best_value) {
      best_value = top;
      best = r;
    }
  }
  return best;
}

double nearest_rank(std::vector<double>& values, double percentile) {
  if (values.empty()) throw Error(Errc::kInvalidArgument, "percentile of an empty sample");
  if (!(percentile > 0.0 && percentile <= 1.0)) {
    throw Error(Errc::kInvalidArgument, "percentile must lie in (0,1]");
  }
  const auto n = static_cast<double>(values.size());
  // The epsilon keeps products such as 0.95 * 1000 from rounding up a rank.
  auto rank = static_cast<std::size_t>(std::ceil(percentile * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

std::vector<double> compute_ppvr(const DrawCube& omega, std::span<const int> best,
                                 double percentile) {
  if (static_cast<int>(best.size()) != omega.columns()) {
    throw Error(Errc::kInvalidDimensions, "one best creative per target audience required");
  }
  std::vector<double> ppvr(omega.columns());
  std::vector<double> rho(omega.draws());
  for (int k = 0; k < omega.columns(); ++k) {
    const int r_star = best[k];
    for (int h = 0; h < omega.draws(); ++h) {
      double top = omega(h, 0, k);
      for (int r = 1; r < omega.creatives(); ++r) top = std::max(top, omega(h, r, k));
      const double denom = omega(h, r_star, k);
      if (!(denom > 0.0)) {
        throw Error(Errc::kNonpositivePayoffDenominator,
                    "payoff of the best creative for TA" + std::to_string(k + 1) +
                        " is not positive in draw " + std::to_string(h + 1));
      }
      rho[h] = (top - denom) / denom;
    }
    ppvr[k] = nearest_rank(rho, percentile);
  }
  return ppvr;
}

bool should_stop(std::span<const double> ppvr, double threshold) {
  return std::all_of(ppvr.begin(), ppvr.end(), [&](double v) { return v < threshold; });
}

double posterior_best_prob(const DrawCube& omega, ArmIndex arm) {
  if (arm.creative < 0 || arm.creative >= omega.creatives() || arm.audience < 0 ||
      arm.audience >= omega.columns()) {
    throw Error(Errc::kInvalidArgument, "true-best combination out of range");
  }
  if (omega.draws() < 1) throw Error(Errc::kInvalidArgument, "no draws");
  int hits = 0;
  for (int h = 0; h < omega.draws(); ++h) {
    double top = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < omega.creatives(); ++r) {
      for (int k = 0; k < omega.columns(); ++k) top = std::max(top, omega(h, r, k));
    }
    if (omega(h, arm.creative, arm.audience) == top) ++hits;
  }
  return static_cast<double>(hits) / omega.draws();
}

Eigen::MatrixXd best_arm_probabilities(const DrawCube& omega) {
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(omega.creatives(), omega.columns());
  for (int h = 0; h < omega.draws(); ++h) {
    ArmIndex best{0, 0};
    double top = omega(h, 0, 0);
    for (int k = 0; k < omega.columns(); ++k) {
      for (int r = 0; r < omega.creatives(); ++r) {
        if (omega(h, r, k) > top) {
          top = omega(h, r, k);
          best = {r, k};
        }
      }
    }
    counts(best.creative, best.audience) += 1.0;
  }
  return counts / static_cast<double>(omega.draws());
}

StopReport evaluate_stop(const DrawCube& omega, double threshold, double percentile,
                         ArmIndex true_best) {
  StopReport report;
  report.best_creative.resize(omega.columns());
  for (int k = 0; k < omega.columns(); ++k) report.best_creative[k] = best_creative(omega, k);
  report.ppvr = compute_ppvr(omega, report.best_creative, percentile);
  report.should_stop = should_stop(report.ppvr, threshold);
  report.post_best_prob = posterior_best_prob(omega, true_best);
  report.best_arm_prob = best_arm_probabilities(omega);
  double top = -1.0;
  for (int k = 0; k < omega.columns(); ++k) {
    for (int r = 0; r < omega.creatives(); ++r) {
      if (report.best_arm_prob(r, k) > top) {
        top = report.best_arm_prob(r, k);
        report.identified_best = {r, k};
      }
    }
  }
  return report;
}

}  // namespace audbandit
