#pragma once

// Run configuration for the flow and wtilde subcommands.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rgflow/errors.hpp"
#include "rgflow/polynomial.hpp"
#include "rgflow/renorm.hpp"
#include "rgflow/tensor.hpp"

namespace rgflow::cli {

inline constexpr int kSchemaVersion = 1;

/// Anything wrong with the configuration document. Maps to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::size_t dimension = 0;
  Sym2Tensor base = Sym2Tensor::zero(1);
  Matrix dilation_generator;
  double fiducial_scale = 1.0;
  Polynomial interaction{1};
  std::vector<double> scale_ladder;
  /// 0 selects the per-dimension default.
  int quadrature_order = 0;
  int projection_degree = 4;
  std::vector<Vec> samples;
  /// Sources J for the W column of wtilde; defaults to the sample points.
  std::vector<DualVec> sources;
  bool semigroup_check = true;
  std::optional<std::filesystem::path> output;

  PropagatorFamily family() const;
  ConvolutionOptions convolution_options() const;
};

/// Parses and validates. `seed` drives the sample points when the document
/// lists none. Every module precondition is checked here, so flow and
/// wtilde only fail on numerical grounds afterwards.
RunConfig parse_config(const nlohmann::json& doc, std::uint64_t seed);
RunConfig load_config(const std::filesystem::path& path, std::uint64_t seed);

/// Monomials of total degree <= d in n variables.
std::size_t monomial_count(std::size_t n, int d);

}  // namespace rgflow::cli
