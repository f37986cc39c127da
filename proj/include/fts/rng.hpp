#pragma once

#include <cmath>
#include <cstdint>

// Reproducible random streams. Every consumer derives its own stream from
// (master, stream_id) through a fixed 64-bit mix, so replications can run
// in any order (or concurrently) and still draw identical sequences on any
// platform with IEEE doubles.

namespace fts {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream derivation: state0 = mix(master ^ mix(stream_id)). Draws advance a
// splitmix64 counter; no draw depends on how earlier draws were consumed.
class Rng {
 public:
  Rng(std::uint64_t master, std::uint64_t stream_id)
      : state_(splitmix64(master ^ splitmix64(stream_id))) {}

  std::uint64_t next_u64() {
    state_ = splitmix64(state_);
    return state_;
  }

  // Uniform in (0, 1], 53-bit resolution. The open lower end keeps log()
  // finite in the Gaussian transform.
  double next_uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1p-53;
  }

  // Standard normal via Box-Muller; the paired draw is cached.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Stream-id domains, so distinct consumers of one master seed never overlap.
namespace stream_domain {
constexpr std::uint64_t kScores = 0x51;
constexpr std::uint64_t kArh1 = 0x52;
constexpr std::uint64_t kMult = 0x53;
constexpr std::uint64_t kCoupling = 0x54;
constexpr std::uint64_t kGaussMax = 0x61;
constexpr std::uint64_t kBlockRefresh = 0x62;
}  // namespace stream_domain

struct SeedSpec {
  std::uint64_t master = 0;

  Rng stream(std::uint64_t stream_id) const { return Rng(master, stream_id); }

  // Two-level ids (cell, rep) for Monte Carlo drivers.
  Rng stream(std::uint64_t cell, std::uint64_t rep) const {
    return Rng(master, splitmix64(cell) ^ (rep * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL));
  }

  // Derived master for a nested consumer (e.g. one replication of an
  // experiment that itself draws several streams).
  SeedSpec sub(std::uint64_t id) const {
    return SeedSpec{splitmix64(master ^ splitmix64(id + 0x6c62272e07bb0142ULL))};
  }
};

}  // namespace fts
