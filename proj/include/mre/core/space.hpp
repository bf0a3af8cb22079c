#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace mre {

/// Observation and action values. Discrete components hold integral values.
using Vec = std::vector<double>;

struct ContinuousDim {
  double min = 0.0;
  double max = 1.0;
  double range() const { return max - min; }
  bool operator==(const ContinuousDim&) const = default;
};

struct DiscreteDim {
  std::int64_t cardinality = 1;
  bool operator==(const DiscreteDim&) const = default;
};

using DimSpec = std::variant<ContinuousDim, DiscreteDim>;

/// An ordered list of dimensions describing an observation or action space.
/// Construction validates every dimension; the spec is immutable afterwards.
class SpaceSpec {
 public:
  SpaceSpec() = default;
  explicit SpaceSpec(std::vector<DimSpec> dims);

  std::size_t size() const { return dims_.size(); }
  const DimSpec& operator[](std::size_t i) const { return dims_[i]; }
  const std::vector<DimSpec>& dims() const { return dims_; }

  bool is_continuous(std::size_t i) const {
    return std::holds_alternative<ContinuousDim>(dims_[i]);
  }
  std::size_t continuous_count() const;

  /// Ingestion: clamps continuous values into [min, max]. Throws
  /// std::invalid_argument on size mismatch, non-finite values, or
  /// discrete values that are non-integral or out of range.
  Vec ingest(std::span<const double> v) const;

  /// Query-time sanitation: clamps every component into range (discrete
  /// values are rounded then clamped). Returns true if anything changed.
  /// Throws std::invalid_argument on size mismatch or NaN.
  bool clamp_in_place(std::span<double> v) const;

  bool contains(std::span<const double> v) const;

  bool operator==(const SpaceSpec&) const = default;

 private:
  std::vector<DimSpec> dims_;
};

}  // namespace mre
