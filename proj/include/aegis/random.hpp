#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Core>

namespace aegis {

using Rng = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_part(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ splitmix64(v)); }

inline std::uint64_t mix_part(std::uint64_t h, std::string_view s) {
  // FNV-1a over the bytes, then folded into the running hash.
  std::uint64_t f = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    f ^= c;
    f *= 0x100000001b3ULL;
  }
  return mix_part(h, f);
}

inline std::uint64_t mix_part(std::uint64_t h, const char* s) { return mix_part(h, std::string_view(s)); }

template <typename T>
  requires std::is_integral_v<T>
inline std::uint64_t mix_part(std::uint64_t h, T v) {
  return mix_part(h, static_cast<std::uint64_t>(v));
}

}  // namespace detail

/// Deterministically derives a stream seed from a base seed and a list of
/// labels (strings or integers). Used to split one run seed into independent
/// per-purpose streams.
template <typename... Parts>
std::uint64_t derive_seed(std::uint64_t base, const Parts&... parts) {
  std::uint64_t h = detail::splitmix64(base);
  ((h = detail::mix_part(h, parts)), ...);
  return h;
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline Eigen::VectorXd uniform_point(int dim, Rng& rng) {
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x[i] = uniform01(rng);
  return x;
}

}  // namespace aegis
