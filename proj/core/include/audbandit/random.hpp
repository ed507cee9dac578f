#pragma once

#include <cstdint>
#include <random>

namespace audbandit {

using Rng = std::mt19937_64;

// Purpose tags for independent substreams derived from one seed.
enum class Stream : std::uint64_t {
  kArrivals = 1,     // user contexts, policy decisions, clicks (per batch)
  kDraws = 2,        // H posterior draws for stopping/allocation (per batch)
  kEnvironment = 3,  // true-CTR sampling (per replication)
  kReplication = 4,  // replication seeds (per replication)
  kGridPoint = 5,    // sweep grid-point master seeds
};

std::uint64_t splitmix64(std::uint64_t& state);

// Hash (seed, stream, index) to a new 64-bit seed. Streams with different
// arguments are statistically independent, so results never depend on the
// order in which replications or batches are executed.
std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index);

Rng make_stream(std::uint64_t seed, Stream stream, std::uint64_t index);

// Beta(a, b) via the ratio of two unit-scale gamma variates.
double sample_beta(double a, double b, Rng& rng);

bool sample_bernoulli(double p, Rng& rng);

// Reusable sampler for many draws from one Beta distribution.
class BetaSampler {
 public:
  BetaSampler(double a, double b);

  double operator()(Rng& rng);

 private:
  double mean_;
  std::gamma_distribution<double> x_;
  std::gamma_distribution<double> y_;
};

}  // namespace audbandit
