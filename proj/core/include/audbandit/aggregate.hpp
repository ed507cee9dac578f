#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "audbandit/audience.hpp"
#include "audbandit/posterior.hpp"
#include "audbandit/random.hpp"

namespace audbandit {

// H Monte-Carlo draws of an R x C matrix, addressed (draw, creative, column).
// Columns are contexts (DAs) for theta draws and target audiences for
// lambda / omega draws.
class DrawCube {
 public:
  DrawCube() = default;
  DrawCube(int draws, int creatives, int columns, double fill = 0.0)
      : draws_(draws), creatives_(creatives), columns_(columns),
        data_(static_cast<std::size_t>(draws) * creatives * columns, fill) {}

  int draws() const { return draws_; }
  int creatives() const { return creatives_; }
  int columns() const { return columns_; }

  double& operator()(int h, int r, int c) { return data_[index(h, r, c)]; }
  double operator()(int h, int r, int c) const { return data_[index(h, r, c)]; }

  friend bool operator==(const DrawCube&, const DrawCube&) = default;

 private:
  std::size_t index(int h, int r, int c) const {
    return (static_cast<std::size_t>(h) * creatives_ + r) * columns_ + c;
  }

  int draws_ = 0;
  int creatives_ = 0;
  int columns_ = 0;
  std::vector<double> data_;
};

// Identifies one (creative, target audience) combination.
struct ArmIndex {
  int creative = 0;
  int audience = 0;
  friend bool operator==(ArmIndex, ArmIndex) = default;
};

struct StopReport {
  std::vector<double> ppvr;          // per TA
  std::vector<int> best_creative;    // r*_k per TA
  bool should_stop = false;
  double post_best_prob = 0.0;       // for the configured true-best combination
  // Fraction of draws in which each (r,k) is the global best; R x K.
  Eigen::MatrixXd best_arm_prob;
  ArmIndex identified_best;          // argmax of best_arm_prob

  double max_ppvr() const;
};

// H joint draws of every arm's theta from the posterior.
DrawCube draw_theta(const PosteriorState& state, int draws, Rng& rng);

// lambda_rk = sum_{j in O(k)} theta_rj p(j|k), per draw.
DrawCube aggregate_lambda(const DrawCube& theta, const Partition& partition);

// The same weighted sum applied to average display costs; R x J -> R x K.
Eigen::MatrixXd aggregate_cost(const Eigen::MatrixXd& cost_da, const Partition& partition);

// omega = gamma * lambda - cost_ta, per draw.
DrawCube compute_omega(const DrawCube& lambda, double gamma, const Eigen::MatrixXd& cost_ta);

// The creative whose largest payoff across all draws is highest within TA k.
// Ties go to the lowest index.
int best_creative(const DrawCube& omega, int k);

// 1-based nearest-rank percentile: the ceil(p*n)-th smallest value.
// Reorders `values`.
double nearest_rank(std::vector<double>& values, double percentile);

// Per-TA percentile of the normalized regret
//   rho_h = (max_r omega_h(r,k) - omega_h(r*_k,k)) / omega_h(r*_k,k).
// Throws NonpositivePayoffDenominator when omega_h(r*_k,k) <= 0 for a draw.
std::vector<double> compute_ppvr(const DrawCube& omega, std::span<const int> best,
                                 double percentile);

bool should_stop(std::span<const double> ppvr, double threshold);

// Fraction of draws in which `arm` attains the maximum over all (r,k).
double posterior_best_prob(const DrawCube& omega, ArmIndex arm);

// Fraction of draws in which each (r,k) is the strict global argmax
// (lowest audience, then lowest creative, on ties). Columns sum to one overall.
Eigen::MatrixXd best_arm_probabilities(const DrawCube& omega);

// Builds the full per-batch stop report from omega draws.
StopReport evaluate_stop(const DrawCube& omega, double threshold, double percentile,
                         ArmIndex true_best);

}  // namespace audbandit
