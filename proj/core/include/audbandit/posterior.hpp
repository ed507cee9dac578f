#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "audbandit/random.hpp"

namespace audbandit {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Impressions n and clicks s per (creative, context) arm for one batch.
struct BatchOutcome {
  CountMatrix impressions;
  CountMatrix clicks;

  static BatchOutcome zeros(int creatives, int contexts);

  std::int64_t total_impressions() const { return impressions.sum(); }
};

// Beta-Bernoulli posterior over the click-through rate of every
// (creative, context) arm, starting from a uniform Beta(1,1) prior.
//
// Only integer counts are stored; alpha = 1 + clicks and
// beta = 1 + impressions - clicks are derived from them so that
// alpha + beta - 2 always equals the impressions recorded for the arm.
class PosteriorState {
 public:
  PosteriorState(int creatives, int contexts);

  int creatives() const { return static_cast<int>(impressions_.rows()); }
  int contexts() const { return static_cast<int>(impressions_.cols()); }
  // 1 before any update; incremented once per applied batch.
  int batch_index() const { return batch_index_; }

  double alpha(int r, int j) const { return 1.0 + static_cast<double>(clicks_(r, j)); }
  double beta(int r, int j) const {
    return 1.0 + static_cast<double>(impressions_(r, j) - clicks_(r, j));
  }
  double mean(int r, int j) const { return alpha(r, j) / (alpha(r, j) + beta(r, j)); }
  Eigen::MatrixXd alpha() const;
  Eigen::MatrixXd beta() const;

  const CountMatrix& impressions() const { return impressions_; }
  const CountMatrix& clicks() const { return clicks_; }

  // Conjugate update. Throws InvalidDimensions on shape mismatch and
  // InvalidBatch if any count is negative or clicks exceed impressions.
  void apply(const BatchOutcome& batch);

  friend bool operator==(const PosteriorState&, const PosteriorState&) = default;

 private:
  CountMatrix impressions_;
  CountMatrix clicks_;
  int batch_index_ = 1;
};

PosteriorState init_posterior(int creatives, int contexts);

PosteriorState update_posterior(PosteriorState state, const BatchOutcome& batch);

// One joint draw of theta for context j, one entry per creative.
std::vector<double> sample_theta(const PosteriorState& state, int j, Rng& rng);

}  // namespace audbandit
