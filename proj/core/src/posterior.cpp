#include "audbandit/posterior.hpp"

#include <string>

#include "audbandit/errors.hpp"

namespace audbandit {

BatchOutcome BatchOutcome::zeros(int creatives, int contexts) {
  return {CountMatrix::Zero(creatives, contexts), CountMatrix::Zero(creatives, contexts)};
}

PosteriorState::PosteriorState(int creatives, int contexts) {
  if (creatives < 1 || contexts < 1) {
    throw Error(Errc::kInvalidDimensions,
                "posterior needs at least one creative and one context, got " +
                    std::to_string(creatives) + "x" + std::to_string(contexts));
  }
  impressions_ = CountMatrix::Zero(creatives, contexts);
  clicks_ = CountMatrix::Zero(creatives, contexts);
}

Eigen::MatrixXd PosteriorState::alpha() const {
  return clicks_.cast<double>().array() + 1.0;
}

Eigen::MatrixXd PosteriorState::beta() const {
  return (impressions_ - clicks_).cast<double>().array() + 1.0;
}

void PosteriorState::apply(const BatchOutcome& batch) {
  if (batch.impressions.rows() != impressions_.rows() ||
      batch.impressions.cols() != impressions_.cols() ||
      batch.clicks.rows() != impressions_.rows() || batch.clicks.cols() != impressions_.cols()) {
    throw Error(Errc::kInvalidDimensions, "batch shape does not match posterior");
  }
  if ((batch.clicks.array() < 0).any() || (batch.clicks.array() > batch.impressions.array()).any()) {
    throw Error(Errc::kInvalidBatch, "clicks must satisfy 0 <= s <= n for every arm");
  }
  impressions_ += batch.impressions;
  clicks_ += batch.clicks;
  ++batch_index_;
}

PosteriorState init_posterior(int creatives, int contexts) {
  return PosteriorState(creatives, contexts);
}

PosteriorState update_posterior(PosteriorState state, const BatchOutcome& batch) {
  state.apply(batch);
  return state;
}

std::vector<double> sample_theta(const PosteriorState& state, int j, Rng& rng) {
  if (j < 0 || j >= state.contexts()) {
    throw Error(Errc::kInvalidDimensions, "context index " + std::to_string(j) + " out of range");
  }
  std::vector<double> theta(state.creatives());
  for (int r = 0; r < state.creatives(); ++r) {
    theta[r] = sample_beta(state.alpha(r, j), state.beta(r, j), rng);
  }
  return theta;
}

}  // namespace audbandit
