#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mre/core/space.hpp"

namespace mre {

struct Quantized {
  std::int64_t bin = 0;
  double value = 0.0;
  bool operator==(const Quantized&) const = default;
};

/// Uniform quantizer Q(x) = step * floor(x / step).
/// Throws std::invalid_argument for non-finite x or step <= 0.
Quantized uniform_quantize(double x, double step);

/// Per-dimension ladders of nested uniform quantizers over the joint
/// observation/action space. Level 0 is the coarsest, level K the finest.
///
/// Continuous values are shifted so the dimension minimum sits at the origin
/// and clamped into [min, max]. Bins are computed once at the finest level and
/// coarser bins are obtained by exact integer division, so a key match at
/// level j+1 always implies a match at level j. The top edge (x == max) is
/// folded into the last bin so level 0 holds the whole range in one bin.
/// Discrete dimensions pass through unchanged at every level.
class QuantizationSchema {
 public:
  /// `obs_steps[d]` is the ladder sigma_0 > ... > sigma_K for observation
  /// dimension d (empty for discrete dims); likewise `action_steps`.
  QuantizationSchema(SpaceSpec observation, SpaceSpec action,
                     std::vector<std::vector<double>> obs_steps,
                     std::vector<std::vector<double>> action_steps);

  /// sigma_0 = range, sigma_j = sigma_0 / 2^j, j = 0..max_level.
  static QuantizationSchema halving(SpaceSpec observation, SpaceSpec action, int max_level = 4);

  const SpaceSpec& observation() const { return obs_space_; }
  const SpaceSpec& action() const { return action_space_; }
  int levels() const { return levels_; }
  int max_level() const { return levels_ - 1; }

  /// The step ladder of a continuous dimension (empty for discrete).
  std::span<const double> obs_steps(std::size_t dim) const { return obs_[dim].steps; }
  std::span<const double> action_steps(std::size_t dim) const { return action_[dim].steps; }

  /// Finest-level bins; `out` must have one slot per dimension. Returns true
  /// if any component had to be clamped into range.
  bool obs_finest(std::span<const double> obs, std::span<std::int64_t> out) const;
  bool action_finest(std::span<const double> action, std::span<std::int64_t> out) const;

  /// Converts finest-level bins of a space to `level` in place.
  void obs_coarsen(std::span<const std::int64_t> finest, int level,
                   std::span<std::int64_t> out) const;
  void action_coarsen(std::span<const std::int64_t> finest, int level,
                      std::span<std::int64_t> out) const;

  /// Convenience: bins at `level` directly.
  std::vector<std::int64_t> obs_bins(std::span<const double> obs, int level) const;
  std::vector<std::int64_t> action_bins(std::span<const double> action, int level) const;

  bool operator==(const QuantizationSchema& o) const {
    return obs_space_ == o.obs_space_ && action_space_ == o.action_space_ &&
           levels_ == o.levels_ && obs_ == o.obs_ && action_ == o.action_;
  }

 private:
  struct Ladder {
    bool continuous = false;
    double min = 0.0;
    double max = 0.0;
    std::int64_t cardinality = 0;
    std::vector<double> steps;
    std::vector<std::int64_t> divisor;  // sigma_j / sigma_K per level
    std::int64_t last_finest_bin = 0;
    bool operator==(const Ladder&) const = default;
  };

  static std::vector<Ladder> make_ladders(const SpaceSpec& space,
                                          std::vector<std::vector<double>> steps,
                                          int& levels, const char* what);
  static bool finest(const std::vector<Ladder>& ladders, std::span<const double> v,
                     std::span<std::int64_t> out);
  static void coarsen(const std::vector<Ladder>& ladders, std::span<const std::int64_t> finest,
                      int level, std::span<std::int64_t> out);

  SpaceSpec obs_space_;
  SpaceSpec action_space_;
  int levels_ = 0;
  std::vector<Ladder> obs_;
  std::vector<Ladder> action_;
};

}  // namespace mre
