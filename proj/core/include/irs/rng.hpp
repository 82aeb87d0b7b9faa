#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

#include "irs/types.hpp"

namespace irs {

using Rng = std::mt19937_64;

// Named substreams. A stream is identified by the master seed, a tag and a
// list of indices (trial, slot, iteration...). Streams never depend on
// scheduling order, which keeps parallel runs bit-identical to serial ones.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::initializer_list<std::uint64_t> indices = {});

Rng make_stream(std::uint64_t master, std::string_view tag,
                std::initializer_list<std::uint64_t> indices = {});

/// Circularly-symmetric complex Gaussian with unit variance.
Complex cscg(Rng& rng);
CVector cscg_vector(Rng& rng, Eigen::Index n);
CMatrix cscg_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);

/// Uniform on [0, 1).
double uniform01(Rng& rng);

}  // namespace irs
