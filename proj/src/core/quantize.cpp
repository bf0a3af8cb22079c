#include "mre/core/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mre {

Quantized uniform_quantize(double x, double step) {
  if (!std::isfinite(x)) throw std::invalid_argument("uniform_quantize: non-finite input");
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("uniform_quantize: step must be positive and finite");
  }
  const double b = std::floor(x / step);
  return {static_cast<std::int64_t>(b), step * b};
}

namespace {

// Tolerance for accepting sigma_j / sigma_{j+1} as an integer.
constexpr double kRatioTolerance = 1e-9;

std::int64_t exact_ratio(double coarse, double fine, const std::string& where) {
  const double r = coarse / fine;
  const double rounded = std::round(r);
  if (rounded < 2.0 || std::abs(r - rounded) > kRatioTolerance * rounded) {
    throw std::invalid_argument(where + ": step ratio " + std::to_string(r) +
                                " is not an integer >= 2");
  }
  return static_cast<std::int64_t>(rounded);
}

}  // namespace

std::vector<QuantizationSchema::Ladder> QuantizationSchema::make_ladders(
    const SpaceSpec& space, std::vector<std::vector<double>> steps, int& levels,
    const char* what) {
  if (steps.size() != space.size()) {
    throw std::invalid_argument(std::string(what) + ": one step ladder per dimension required");
  }
  std::vector<Ladder> out(space.size());
  for (std::size_t d = 0; d < space.size(); ++d) {
    const std::string where = std::string(what) + " dim " + std::to_string(d);
    Ladder& l = out[d];
    if (const auto* c = std::get_if<ContinuousDim>(&space[d])) {
      l.continuous = true;
      l.min = c->min;
      l.max = c->max;
      l.steps = std::move(steps[d]);
      if (l.steps.empty()) throw std::invalid_argument(where + ": empty ladder");
      const int n = static_cast<int>(l.steps.size());
      if (levels == 0) levels = n;
      if (n != levels) {
        throw std::invalid_argument(where + ": ladder length differs across dimensions");
      }
      for (double s : l.steps) {
        if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument(where + ": bad step");
      }
      if (l.steps.front() < c->range()) {
        throw std::invalid_argument(where + ": coarsest step must cover the range");
      }
      l.divisor.assign(l.steps.size(), 1);
      for (int j = n - 2; j >= 0; --j) {
        l.divisor[j] = l.divisor[j + 1] * exact_ratio(l.steps[j], l.steps[j + 1], where);
      }
      const double span = c->range() / l.steps.back();
      double bins = std::ceil(span);
      if (std::abs(span - std::round(span)) <= kRatioTolerance * std::max(1.0, span)) {
        bins = std::round(span);
      }
      l.last_finest_bin = std::max<std::int64_t>(0, static_cast<std::int64_t>(bins) - 1);
    } else {
      l.cardinality = std::get<DiscreteDim>(space[d]).cardinality;
      if (!steps[d].empty()) {
        throw std::invalid_argument(where + ": discrete dimensions take no ladder");
      }
    }
  }
  return out;
}

QuantizationSchema::QuantizationSchema(SpaceSpec observation, SpaceSpec action,
                                       std::vector<std::vector<double>> obs_steps,
                                       std::vector<std::vector<double>> action_steps)
    : obs_space_(std::move(observation)), action_space_(std::move(action)) {
  int levels = 0;
  obs_ = make_ladders(obs_space_, std::move(obs_steps), levels, "observation");
  action_ = make_ladders(action_space_, std::move(action_steps), levels, "action");
  levels_ = levels == 0 ? 1 : levels;
}

QuantizationSchema QuantizationSchema::halving(SpaceSpec observation, SpaceSpec action,
                                               int max_level) {
  if (max_level < 0 || max_level > 40) throw std::invalid_argument("max_level out of range");
  auto ladder = [max_level](const SpaceSpec& s) {
    std::vector<std::vector<double>> out(s.size());
    for (std::size_t d = 0; d < s.size(); ++d) {
      if (const auto* c = std::get_if<ContinuousDim>(&s[d])) {
        for (int j = 0; j <= max_level; ++j) out[d].push_back(std::ldexp(c->range(), -j));
      }
    }
    return out;
  };
  auto obs_steps = ladder(observation);
  auto action_steps = ladder(action);
  QuantizationSchema q(std::move(observation), std::move(action), std::move(obs_steps),
                       std::move(action_steps));
  q.levels_ = max_level + 1;  // also when every dimension is discrete
  return q;
}

bool QuantizationSchema::finest(const std::vector<Ladder>& ladders, std::span<const double> v,
                                std::span<std::int64_t> out) {
  if (v.size() != ladders.size() || out.size() < ladders.size()) {
    throw std::invalid_argument("quantize: dimension mismatch");
  }
  bool clamped = false;
  for (std::size_t d = 0; d < ladders.size(); ++d) {
    const Ladder& l = ladders[d];
    double x = v[d];
    if (std::isnan(x)) throw std::invalid_argument("quantize: NaN component");
    if (l.continuous) {
      if (x < l.min || x > l.max) {
        x = std::clamp(x, l.min, l.max);
        clamped = true;
      }
      auto b = static_cast<std::int64_t>(std::floor((x - l.min) / l.steps.back()));
      out[d] = std::clamp<std::int64_t>(b, 0, l.last_finest_bin);
    } else {
      const double r = std::round(x);
      const double c = std::clamp(r, 0.0, static_cast<double>(l.cardinality - 1));
      clamped |= (c != x);
      out[d] = static_cast<std::int64_t>(c);
    }
  }
  return clamped;
}

void QuantizationSchema::coarsen(const std::vector<Ladder>& ladders,
                                 std::span<const std::int64_t> finest, int level,
                                 std::span<std::int64_t> out) {
  for (std::size_t d = 0; d < ladders.size(); ++d) {
    const Ladder& l = ladders[d];
    out[d] = l.continuous ? finest[d] / l.divisor[static_cast<std::size_t>(level)] : finest[d];
  }
}

bool QuantizationSchema::obs_finest(std::span<const double> obs,
                                    std::span<std::int64_t> out) const {
  return finest(obs_, obs, out);
}

bool QuantizationSchema::action_finest(std::span<const double> action,
                                       std::span<std::int64_t> out) const {
  return finest(action_, action, out);
}

void QuantizationSchema::obs_coarsen(std::span<const std::int64_t> f, int level,
                                     std::span<std::int64_t> out) const {
  coarsen(obs_, f, level, out);
}

void QuantizationSchema::action_coarsen(std::span<const std::int64_t> f, int level,
                                        std::span<std::int64_t> out) const {
  coarsen(action_, f, level, out);
}

std::vector<std::int64_t> QuantizationSchema::obs_bins(std::span<const double> obs,
                                                       int level) const {
  if (level < 0 || level >= levels_) throw std::invalid_argument("level out of range");
  std::vector<std::int64_t> out(obs_.size());
  finest(obs_, obs, out);
  coarsen(obs_, out, level, out);
  return out;
}

std::vector<std::int64_t> QuantizationSchema::action_bins(std::span<const double> action,
                                                          int level) const {
  if (level < 0 || level >= levels_) throw std::invalid_argument("level out of range");
  std::vector<std::int64_t> out(action_.size());
  finest(action_, action, out);
  coarsen(action_, out, level, out);
  return out;
}

}  // namespace mre
