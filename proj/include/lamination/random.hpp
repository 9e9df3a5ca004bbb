#pragma once

// Counter-based random streams.  A draw is a pure function of
// (seed, stream, index), so sampling loops give identical results in any
// execution order or thread partition.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace lam {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

  // Sub-stream for sample `index`; each yields an independent sequence.
  CounterRng at(std::uint64_t index) const {
    CounterRng r = *this;
    r.key_ = splitmix64(key_ ^ splitmix64(index));
    r.counter_ = 0;
    return r;
  }

  std::uint64_t next_u64() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform in the closed disc of the given radius and center.
  std::complex<double> in_disc(double radius, std::complex<double> center = {}) {
    const double r = radius * std::sqrt(uniform());
    const double th = 2.0 * std::numbers::pi * uniform();
    return center + std::polar(r, th);
  }

  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace lam
