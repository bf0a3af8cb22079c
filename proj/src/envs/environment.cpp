#include "mre/envs/environment.hpp"

#include <stdexcept>
#include <string>

#include "mre/envs/lander.hpp"
#include "mre/envs/mountain_car.hpp"

namespace mre::envs {

const char* to_string(Shape::Kind k) {
  switch (k) {
    case Shape::Kind::Line: return "line";
    case Shape::Kind::Circle: return "circle";
    case Shape::Kind::Polygon: return "polygon";
    case Shape::Kind::Text: return "text";
  }
  return "?";
}

Vec Environment::action_from_id(std::int64_t id) const {
  const SpaceSpec& a = spec().action;
  if (a.size() != 1 || a.is_continuous(0)) {
    throw std::invalid_argument("action ids need a single discrete action dimension");
  }
  const auto card = std::get<DiscreteDim>(a[0]).cardinality;
  if (id < 0 || id >= card) {
    throw std::invalid_argument("action id " + std::to_string(id) + " out of range");
  }
  return {static_cast<double>(id)};
}

std::unique_ptr<Environment> make_env(std::string_view id) {
  if (id == "mountain_car") return std::make_unique<mountain_car::Env>();
  if (id == "lander") return std::make_unique<lander::Env>();
  throw std::invalid_argument("unknown environment '" + std::string(id) + "'");
}

std::vector<std::string> env_ids() { return {"mountain_car", "lander"}; }

}  // namespace mre::envs
