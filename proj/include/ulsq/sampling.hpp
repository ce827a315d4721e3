#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ulsq/errors.hpp"

namespace ulsq {

/// splitmix64 output function; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z);

/// Minimal splittable generator (splitmix64). One instance per stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit();

 private:
  std::uint64_t state_;
};

/// Deterministic, collision-resistant per-trial stream seed. Trials get
/// independent streams regardless of execution order.
std::uint64_t derive_trial_seed(std::uint64_t base_seed, std::uint64_t trial_index);

/// Identifier of the generator and the transforms, recorded in output
/// metadata so results can be reproduced bit-exactly.
std::string_view rng_algorithm_id();

/// Mapping from a bounded interval onto the unbounded domain.
///   r=0: (-1,1) -> R,    y = (L/2) log((1+xi)/(1-xi))   (logarithmic)
///   r=1: [0,1)  -> R+,   y = L xi / sqrt(1-xi^2)        (algebraic)
struct MappingSpec {
  int r = 0;
  double L = 1.0;
};

double map_point(double xi, const MappingSpec& spec);
double map_inverse(double y, const MappingSpec& spec);

enum class Distribution {
  Gaussian,       // normal with variance 1/2, matching the weight e^{-y^2}
  Exponential,    // density e^{-y} on (0, inf)
  UniformSym,     // open interval (-1, 1)
  UniformPos,     // open interval (0, 1)
  MappedUniform,  // map_point applied to UniformSym (r=0) or UniformPos (r=1)
};

struct DistributionSpec {
  Distribution kind = Distribution::Gaussian;
  MappingSpec mapping{};  // meaningful only for MappedUniform

  static DistributionSpec gaussian() { return {Distribution::Gaussian, {}}; }
  static DistributionSpec exponential() { return {Distribution::Exponential, {}}; }
  static DistributionSpec uniform_sym() { return {Distribution::UniformSym, {}}; }
  static DistributionSpec uniform_pos() { return {Distribution::UniformPos, {}}; }
  static DistributionSpec mapped(MappingSpec m) { return {Distribution::MappedUniform, m}; }
};

const char* distribution_name(Distribution kind);

/// Draws one i.i.d. row at a time; rows are d-dimensional points.
class PointStream {
 public:
  PointStream(const DistributionSpec& spec, std::size_t dim, std::uint64_t seed);
  void next_row(std::span<double> out);
  double next_value();

 private:
  double next_gaussian();

  DistributionSpec spec_;
  std::size_t dim_;
  SplitMix64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// m x d matrix of evaluation points with provenance. Regenerating with the
/// same (spec, m, d, seed) reproduces the matrix bit-exactly.
struct SampleSet {
  std::vector<double> points;  // row-major, m rows of dimension d
  std::size_t m = 0;
  std::size_t d = 0;
  DistributionSpec spec;
  std::uint64_t seed = 0;

  double at(std::size_t i, std::size_t j) const { return points[i * d + j]; }
  std::span<const double> row(std::size_t i) const { return {points.data() + i * d, d}; }
};

SampleSet sample(const DistributionSpec& spec, std::size_t m, std::size_t d, std::uint64_t seed);

}  // namespace ulsq
