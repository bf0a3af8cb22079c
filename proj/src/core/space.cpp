#include "mre/core/space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mre {

SpaceSpec::SpaceSpec(std::vector<DimSpec> dims) : dims_(std::move(dims)) {
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (const auto* c = std::get_if<ContinuousDim>(&dims_[i])) {
      if (!std::isfinite(c->min) || !std::isfinite(c->max) || !(c->min < c->max)) {
        throw std::invalid_argument("continuous dim " + std::to_string(i) +
                                    " needs finite min < max");
      }
    } else if (std::get<DiscreteDim>(dims_[i]).cardinality < 1) {
      throw std::invalid_argument("discrete dim " + std::to_string(i) +
                                  " needs cardinality >= 1");
    }
  }
}

std::size_t SpaceSpec::continuous_count() const {
  return static_cast<std::size_t>(
      std::count_if(dims_.begin(), dims_.end(), [](const DimSpec& d) {
        return std::holds_alternative<ContinuousDim>(d);
      }));
}

Vec SpaceSpec::ingest(std::span<const double> v) const {
  if (v.size() != dims_.size()) {
    throw std::invalid_argument("expected " + std::to_string(dims_.size()) +
                                " components, got " + std::to_string(v.size()));
  }
  Vec out(v.begin(), v.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!std::isfinite(out[i])) {
      throw std::invalid_argument("non-finite component " + std::to_string(i));
    }
    if (const auto* c = std::get_if<ContinuousDim>(&dims_[i])) {
      out[i] = std::clamp(out[i], c->min, c->max);
    } else {
      const auto card = std::get<DiscreteDim>(dims_[i]).cardinality;
      if (out[i] != std::floor(out[i]) || out[i] < 0.0 ||
          out[i] >= static_cast<double>(card)) {
        throw std::invalid_argument("discrete component " + std::to_string(i) +
                                    " outside [0, " + std::to_string(card) + ")");
      }
    }
  }
  return out;
}

bool SpaceSpec::clamp_in_place(std::span<double> v) const {
  if (v.size() != dims_.size()) {
    throw std::invalid_argument("expected " + std::to_string(dims_.size()) +
                                " components, got " + std::to_string(v.size()));
  }
  bool changed = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::isnan(v[i])) throw std::invalid_argument("NaN component " + std::to_string(i));
    double x = v[i];
    if (const auto* c = std::get_if<ContinuousDim>(&dims_[i])) {
      x = std::clamp(x, c->min, c->max);
    } else {
      const auto card = std::get<DiscreteDim>(dims_[i]).cardinality;
      x = std::clamp(std::round(x), 0.0, static_cast<double>(card - 1));
    }
    if (x != v[i]) {
      v[i] = x;
      changed = true;
    }
  }
  return changed;
}

bool SpaceSpec::contains(std::span<const double> v) const {
  if (v.size() != dims_.size()) return false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) return false;
    if (const auto* c = std::get_if<ContinuousDim>(&dims_[i])) {
      if (v[i] < c->min || v[i] > c->max) return false;
    } else {
      const auto card = std::get<DiscreteDim>(dims_[i]).cardinality;
      if (v[i] != std::floor(v[i]) || v[i] < 0 || v[i] >= static_cast<double>(card)) return false;
    }
  }
  return true;
}

}  // namespace mre
