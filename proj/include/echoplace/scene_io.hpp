#pragma once

#include <string>

#include "echoplace/scene.hpp"

namespace echoplace {

// Loads and validates a scene config (JSON). Mesh may be a Wavefront OBJ path
// with a name->material map, or inline vertices/triangles. Throws
// ConfigNotFoundError / ParseError / ValidationError.
Scene load_scene(const std::string& config_path);

// Same, from config text; relative paths resolve against base_dir.
Scene load_scene_from_text(const std::string& config_text, const std::string& base_dir);

// Serializes a scene to config text (inline mesh form). load_scene_from_text
// of the result reproduces every field.
std::string serialize_scene(const Scene& scene);

// FNV-1a of the canonical serialized form, for run reports.
std::string scene_digest(const Scene& scene);

}  // namespace echoplace
