#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace qsv {

// All randomness in the library flows through RngStream so that results are
// reproducible bit-for-bit across platforms: mt19937_64 has a standardized
// output sequence and the variate transforms below are hand-rolled (libstdc++
// distributions are implementation-defined).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  /// Seed of the independent substream for (master, id). Counter-based:
  /// substreams can be derived in any order.
  static std::uint64_t derive(std::uint64_t master, std::uint64_t id) {
    return splitmix64(master) ^ splitmix64(0x9E3779B97F4A7C15ULL * (id + 1));
  }

  static RngStream substream(std::uint64_t master, std::uint64_t id) {
    return RngStream(derive(master, id));
  }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0,1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (pairs cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Uniform integer in [0, n), unbiased (rejection).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = gen_();
    while (x >= limit) x = gen_();
    return x % n;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qsv
