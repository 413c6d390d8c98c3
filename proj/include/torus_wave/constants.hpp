#pragma once

// Empirically calibrated embedding, product and composition constants on one grid.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "torus_wave/torus_field.hpp"

namespace tw {

inline constexpr const char* kConstantsEnvVar = "TORUS_WAVE_CONSTANTS";
inline constexpr int kConstantsFormatVersion = 1;
inline constexpr std::uint64_t kDefaultCalibrationSeed = 20240917;
inline constexpr int kDefaultCalibrationSamples = 60;

struct CalibratedConstants {
  int grid_n = 0;
  int m = 3;
  std::uint64_t seed = 0;
  int samples = 0;
  double margin = 1.5;
  std::string generator;
  double sobolev = 0.0;         // sup|u| <= sobolev * |u|_{H^m}
  double algebra = 0.0;         // |uv|_{H^m} <= algebra * |u|_{H^m} |v|_{H^m}
  std::vector<double> moser;    // per-order constants C_1..C_m

  /// Throws ConfigError when the constants were calibrated for a different grid or order.
  void require_match(const GridSpec& grid, int order) const;
};

/// Runs the calibration over `samples` seeded random band-limited fields per family.
CalibratedConstants calibrate(const GridSpec& grid, int m, std::uint64_t seed, int samples, double margin = 1.5);

/// (2 pi)^{-3/2} sqrt(sum_n 1/W_m(n)) over the grid: a rigorous sup-norm bound for fields on the grid.
double sobolev_bound(const GridSpec& grid, int m);

/// Sample ratio |D^alpha (1+u)^mu|_{L^2} / (max_{l<=k} |F^(l)(u)|_inf |u|_inf^{l-1} * max_{|beta|=k} |D^beta u|_{L^2}),
/// maximized over |alpha| = k, for k = 1..m. Derivatives of the composition are taken on a 2x grid.
std::vector<double> moser_ratios(const Field& u, double mu, int m);

std::string to_text(const CalibratedConstants& c);
CalibratedConstants parse_constants(const std::string& text);
void save_constants(const CalibratedConstants& c, const std::filesystem::path& path);
CalibratedConstants load_constants(const std::filesystem::path& path);

/// The environment override when set, else `explicit_path`.
std::optional<std::filesystem::path> constants_path(const std::optional<std::filesystem::path>& explicit_path);

}  // namespace tw
