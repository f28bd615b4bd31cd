#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "nomabf/types.hpp"

namespace nomabf {

using Rng = std::mt19937_64;

// Generator seeded from a tuple of indices, so each work item draws the same
// stream regardless of scheduling.
Rng make_rng(std::initializer_list<std::uint64_t> key);

// Rayleigh estimate: i.i.d. CN(0, 1/n_t) entries, so E||h||^2 = 1.
CVec sample_channel(Rng& rng, int n_t);

// Uniform on the complex ball of radius epsilon (a 2 n_t real-dimensional ball).
CVec sample_error_ball(Rng& rng, int n_t, double epsilon);

}  // namespace nomabf
