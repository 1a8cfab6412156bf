#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace kdebench {

// pcg32 (XSH-RR 64/32, single stream) from pcg-random.org. The output
// sequence is fully specified by (seed, stream), so draws are identical
// across platforms and compilers. Normal variates use Marsaglia's polar
// method; uniform doubles take the top 53 bits of a 64-bit draw.
class Pcg32 {
 public:
  explicit Pcg32(std::uint64_t seed, std::uint64_t stream = kDefaultStream)
      : state_(0), inc_((stream << 1u) | 1u) {
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const auto xorshifted =
        static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal (polar method; caches the second variate).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Unbiased integer in [0, n), n >= 1.
  std::uint32_t below(std::uint32_t n) {
    const std::uint32_t threshold = (-n) % n;
    for (;;) {
      const std::uint32_t r = next_u32();
      if (r >= threshold) return r % n;
    }
  }

  static constexpr std::uint64_t kDefaultStream = 0xda3e39cb94b95bdbULL;

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

namespace detail {
inline std::uint64_t fnv1a_bytes(std::uint64_t h, const void* data,
                                 std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t hash_part(std::uint64_t h, std::uint64_t v) {
  return fnv1a_bytes(h, &v, sizeof(v));
}

inline std::uint64_t hash_part(std::uint64_t h, std::string_view s) {
  h = fnv1a_bytes(h, s.data(), s.size());
  return hash_part(h, static_cast<std::uint64_t>(s.size()));
}
}  // namespace detail

// FNV-1a over (master, parts...). Experiment cells derive their seeds
// through this so each cell is independently reproducible.
template <typename... Parts>
std::uint64_t derive_seed(std::uint64_t master, Parts... parts) {
  std::uint64_t h = detail::hash_part(14695981039346656037ULL, master);
  ((h = detail::hash_part(h, parts)), ...);
  return h;
}

}  // namespace kdebench
