#pragma once

#include <cstdint>
#include <random>

#include "torus_wave/torus_field.hpp"

namespace tw {

/// Name of the generator recorded in scenario echoes and constants files.
inline constexpr const char* kGeneratorName = "mt19937_64";

struct RandomFieldOptions {
  int max_wavenumber = 3;     // retained |n_k| <= max_wavenumber
  double decay = 1.0;         // coefficient envelope (1 + |n|^2)^-decay
  bool zero_mean = false;
  double target_sup = 0.0;    // when > 0, rescale so the grid maximum of |u| equals this
};

/// Real band-limited field with Gaussian Fourier coefficients.
Field random_band_limited_field(const GridSpec& grid, std::mt19937_64& rng,
                                const RandomFieldOptions& options = {});

}  // namespace tw
