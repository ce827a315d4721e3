#include "ulsq/sampling.hpp"

#include <cmath>
#include <string>

namespace ulsq {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
const double kInvSqrt2 = std::sqrt(0.5);
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() {
  state_ += kGolden;
  return mix64(state_);
}

double SplitMix64::next_unit() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_trial_seed(std::uint64_t base_seed, std::uint64_t trial_index) {
  // kGolden is odd, so base ^ kGolden*(i+1) is distinct across trial indices
  // for a fixed base; mix64 is bijective and keeps it that way.
  return mix64(base_seed ^ (kGolden * (trial_index + 1)));
}

std::string_view rng_algorithm_id() {
  return "splitmix64+polar-gaussian+invcdf-exponential";
}

double map_point(double xi, const MappingSpec& spec) {
  if (spec.r == 0) {
    if (!(std::abs(xi) < 1.0))
      throw DomainError("map_point: r=0 requires |xi| < 1, got xi=" + std::to_string(xi));
    return 0.5 * spec.L * (std::log1p(xi) - std::log1p(-xi));
  }
  if (spec.r == 1) {
    if (!(xi >= 0.0 && xi < 1.0))
      throw DomainError("map_point: r=1 requires 0 <= xi < 1, got xi=" + std::to_string(xi));
    return spec.L * xi / std::sqrt((1.0 - xi) * (1.0 + xi));
  }
  throw ContractError("map_point: r must be 0 or 1");
}

double map_inverse(double y, const MappingSpec& spec) {
  if (spec.r == 0) return std::tanh(y / spec.L);
  if (spec.r == 1) {
    if (!(y >= 0.0)) throw DomainError("map_inverse: r=1 requires y >= 0");
    return y / std::hypot(y, spec.L);
  }
  throw ContractError("map_inverse: r must be 0 or 1");
}

const char* distribution_name(Distribution kind) {
  switch (kind) {
    case Distribution::Gaussian: return "gaussian";
    case Distribution::Exponential: return "exponential";
    case Distribution::UniformSym: return "uniform-sym";
    case Distribution::UniformPos: return "uniform-pos";
    case Distribution::MappedUniform: return "mapped";
  }
  return "unknown";
}

PointStream::PointStream(const DistributionSpec& spec, std::size_t dim, std::uint64_t seed)
    : spec_(spec), dim_(dim), rng_(seed) {
  if (dim_ == 0) throw ContractError("PointStream: dimension must be >= 1");
  if (spec_.kind == Distribution::MappedUniform) {
    if (spec_.mapping.r != 0 && spec_.mapping.r != 1)
      throw ContractError("PointStream: mapping r must be 0 or 1");
    if (!(spec_.mapping.L > 0.0)) throw ContractError("PointStream: mapping L must be positive");
  }
}

double PointStream::next_gaussian() {
  // Marsaglia polar method; the second variate is kept for the next call.
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * rng_.next_unit() - 1.0;
    v = 2.0 * rng_.next_unit() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double PointStream::next_value() {
  switch (spec_.kind) {
    case Distribution::Gaussian:
      return kInvSqrt2 * next_gaussian();
    case Distribution::Exponential: {
      double y;
      do {
        y = -std::log1p(-rng_.next_unit());
      } while (!(y > 0.0));
      return y;
    }
    case Distribution::UniformSym: {
      double u;
      do {
        u = 2.0 * rng_.next_unit() - 1.0;
      } while (!(u > -1.0 && u < 1.0));
      return u;
    }
    case Distribution::UniformPos: {
      double u;
      do {
        u = rng_.next_unit();
      } while (!(u > 0.0));
      return u;
    }
    case Distribution::MappedUniform: {
      if (spec_.mapping.r == 0) {
        double u;
        do {
          u = 2.0 * rng_.next_unit() - 1.0;
        } while (!(u > -1.0 && u < 1.0));
        return map_point(u, spec_.mapping);
      }
      double u;
      do {
        u = rng_.next_unit();
      } while (!(u > 0.0));
      return map_point(u, spec_.mapping);
    }
  }
  throw ContractError("PointStream: unknown distribution");
}

void PointStream::next_row(std::span<double> out) {
  if (out.size() != dim_) throw ContractError("PointStream: row span size mismatch");
  for (std::size_t j = 0; j < dim_; ++j) out[j] = next_value();
}

SampleSet sample(const DistributionSpec& spec, std::size_t m, std::size_t d, std::uint64_t seed) {
  if (m < 1) throw ContractError("sample: m must be >= 1");
  if (d < 1) throw ContractError("sample: d must be >= 1");
  SampleSet set;
  set.m = m;
  set.d = d;
  set.spec = spec;
  set.seed = seed;
  set.points.resize(m * d);
  PointStream stream(spec, d, seed);
  for (std::size_t i = 0; i < m; ++i)
    stream.next_row(std::span<double>(set.points.data() + i * d, d));
  return set;
}

}  // namespace ulsq
