// Seeded Gaussian noise streams. Each (master_seed, stream_index) pair names
// an independent, reproducible stream regardless of scheduling order.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qbm {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class GaussianRng {
 public:
  GaussianRng(std::uint64_t master_seed, std::uint64_t stream_index) {
    std::uint64_t s = master_seed ^ (0xd1b54a32d192ed03ULL * (stream_index + 1));
    std::seed_seq seq{splitmix64(s), splitmix64(s), splitmix64(s), splitmix64(s),
                      splitmix64(s), splitmix64(s), splitmix64(s), splitmix64(s)};
    engine_.seed(seq);
  }

  std::uint64_t raw() { return engine_(); }

  // Standard normal via Box-Muller; consumes exactly two raw draws per pair.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qbm
