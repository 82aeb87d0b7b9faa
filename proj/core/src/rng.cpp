#include "irs/rng.hpp"

#include <cmath>

namespace irs {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::initializer_list<std::uint64_t> indices) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ fnv1a(tag));
  for (std::uint64_t i : indices) h = splitmix64(h ^ splitmix64(i + 0x632be59bd9b4e019ULL));
  return h;
}

Rng make_stream(std::uint64_t master, std::string_view tag,
                std::initializer_list<std::uint64_t> indices) {
  return Rng(derive_seed(master, tag, indices));
}

Complex cscg(Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

CVector cscg_vector(Rng& rng, Eigen::Index n) {
  CVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = cscg(rng);
  return out;
}

CMatrix cscg_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  CMatrix out(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) out(r, c) = cscg(rng);
  return out;
}

double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace irs
