#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace kicktop {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Subseed for work item `counter` under a master seed. Distinct counters give
// well-separated streams; identical (master, counter) always give the same
// subseed, which is what makes disorder-averaged runs reproducible.
inline std::uint64_t subseed(std::uint64_t master, std::uint64_t counter) {
  std::uint64_t s = master ^ (0xd1342543de82ef95ull * (counter + 1));
  return splitmix64(s);
}

// Deterministic N(0,1) stream: mt19937_64 (bit-exact per the standard) plus a
// fixed Box-Muller transform. std::normal_distribution is implementation
// defined, so it must not appear anywhere results are seeded.
class GaussianStream {
public:
  explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53; // (0,1]
    const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t raw() { return gen_(); }

private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

} // namespace kicktop
