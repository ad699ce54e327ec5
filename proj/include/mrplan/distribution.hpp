#ifndef MRPLAN_DISTRIBUTION_HPP
#define MRPLAN_DISTRIBUTION_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mrplan {

// Counter-free splittable stream: each stochastic element of a simulation
// owns one, derived deterministically from the master seed, so changing one
// distribution kind never perturbs the draws of another.
class RngStream {
 public:
  RngStream() : state_(0x9e3779b97f4a7c15ull) {}
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  static RngStream substream(std::uint64_t master, std::uint64_t element) {
    // splitmix64 over a mixed key
    return RngStream(mix(master ^ (0x9e3779b97f4a7c15ull * (element + 1))));
  }

  std::uint64_t next_u64() {
    // splitmix64
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform in (0, 1]
  double next_open01() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

enum class DistKind { Deterministic, Exponential, Empirical };

struct ServiceDistribution {
  DistKind kind = DistKind::Exponential;
  double mean = 0.0;             // ms; deterministic value or exponential mean
  std::vector<double> samples;   // empirical replay, uniform with replacement

  static ServiceDistribution deterministic(double v) {
    return {DistKind::Deterministic, v, {}};
  }
  static ServiceDistribution exponential(double mean) {
    return {DistKind::Exponential, mean, {}};
  }
  static ServiceDistribution empirical(std::vector<double> s) {
    return {DistKind::Empirical, 0.0, std::move(s)};
  }
};

inline double sample(const ServiceDistribution& dist, RngStream& rng) {
  switch (dist.kind) {
    case DistKind::Deterministic:
      return dist.mean;
    case DistKind::Exponential:
      if (dist.mean <= 0.0) return 0.0;
      return -dist.mean * std::log(rng.next_open01());
    case DistKind::Empirical:
      if (dist.samples.empty())
        throw std::logic_error("empirical distribution without samples");
      return dist.samples[rng.next_below(dist.samples.size())];
  }
  return 0.0;
}

}  // namespace mrplan

#endif
