#pragma once

#include <boost/random/normal_distribution.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace pickands {

constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++. Streams are derived from (master seed, replication index, salt)
// only, so a replication draws the same numbers under any worker schedule.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64(sm);
  }

  static Rng stream(std::uint64_t master_seed, std::uint64_t index, std::uint64_t salt = 0) {
    std::uint64_t h = master_seed;
    std::uint64_t a = splitmix64(h);
    std::uint64_t k = index ^ (salt * 0xd1342543de82ef95ULL);
    std::uint64_t b = splitmix64(k);
    return Rng(a ^ std::rotl(b, 17) ^ (b * 0x2545f4914f6cdd1dULL));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = std::rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

  // Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() { return normal_(*this); }

  // Unit exponential.
  double exponential() { return -std::log(uniform()); }

 private:
  std::uint64_t s_[4];
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace pickands
