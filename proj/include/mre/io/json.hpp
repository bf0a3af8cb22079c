#pragma once

#include <json.hpp>

#include "mre/core/policy.hpp"
#include "mre/core/space.hpp"
#include "mre/envs/environment.hpp"
#include "mre/session/session.hpp"

namespace mre::io {

using nlohmann::json;

json to_json(const SpaceSpec& s);
/// Throws std::invalid_argument on a malformed document.
SpaceSpec space_from_json(const json& j);

json to_json(const Provenance& p);
Provenance provenance_from_json(const json& j);

json to_json(const envs::RenderFrame& f);
envs::RenderFrame render_from_json(const json& j);

json to_json(const envs::EnvSpec& s);

json to_json(const session::EpisodeMetrics& m);
session::EpisodeMetrics metrics_from_json(const json& j);

}  // namespace mre::io
