#include "audbandit/random.hpp"

namespace audbandit {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index) {
  std::uint64_t state = seed;
  std::uint64_t out = splitmix64(state);
  state = out ^ (static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL);
  out = splitmix64(state);
  state = out ^ index;
  return splitmix64(state);
}

Rng make_stream(std::uint64_t seed, Stream stream, std::uint64_t index) {
  return Rng(derive_seed(seed, stream, index));
}

BetaSampler::BetaSampler(double a, double b)
    : mean_(a / (a + b)), x_(a, 1.0), y_(b, 1.0) {}

double BetaSampler::operator()(Rng& rng) {
  const double x = x_(rng);
  const double y = y_(rng);
  const double total = x + y;
  // Both gamma variates can underflow for tiny shapes.
  if (!(total > 0.0)) return mean_;
  return x / total;
}

double sample_beta(double a, double b, Rng& rng) {
  BetaSampler sampler(a, b);
  return sampler(rng);
}

bool sample_bernoulli(double p, Rng& rng) {
  return std::generate_canonical<double, 53>(rng) < p;
}

}  // namespace audbandit
