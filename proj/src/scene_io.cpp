#include "echoplace/scene_io.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "echoplace/errors.hpp"
#include "json.hpp"

namespace echoplace {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

BandSpectrum parse_bands(const json& j, BandUnit unit, const std::string& path) {
  BandSpectrum s;
  s.unit = unit;
  if (j.is_number()) {
    s.values.fill(j.get<double>());
    return s;
  }
  if (!j.is_array() || j.size() != static_cast<size_t>(kNumBands))
    throw ParseError(path + ": expected a scalar or an array of " + std::to_string(kNumBands) +
                     " per-band values");
  for (int b = 0; b < kNumBands; ++b) s[b] = j[b].get<double>();
  return s;
}

Vec3 parse_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ParseError(path + ": expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Aabb parse_box(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("min") || !j.contains("max"))
    throw ParseError(path + ": expected {\"min\": [...], \"max\": [...]}");
  return {parse_vec3(j["min"], path + ".min"), parse_vec3(j["max"], path + ".max")};
}

int material_index(const std::string& name, const std::vector<Material>& mats,
                   const std::string& path) {
  for (size_t i = 0; i < mats.size(); ++i)
    if (mats[i].name == name) return static_cast<int>(i);
  throw ParseError(path + ": unknown material '" + name + "'");
}

std::vector<Triangle> load_obj(const std::string& obj_path,
                               const std::map<std::string, std::string>& material_map,
                               const std::vector<Material>& mats) {
  std::ifstream f(obj_path);
  if (!f) throw ConfigNotFoundError("mesh file not found: " + obj_path);

  std::vector<Vec3> verts;
  std::vector<Triangle> tris;
  std::string current_group;
  int current_material = -1;

  auto resolve = [&](const std::string& group) {
    auto it = material_map.find(group);
    if (it == material_map.end()) {
      it = material_map.find("*");
      if (it == material_map.end())
        throw ParseError("mesh group '" + group + "' in " + obj_path +
                         " has no entry in the mesh material map");
    }
    return material_index(it->second, mats, "mesh.materials['" + group + "']");
  };

  std::string line;
  size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    std::istringstream is(line);
    std::string tag;
    is >> tag;
    if (tag == "v") {
      Vec3 v;
      is >> v.x >> v.y >> v.z;
      verts.push_back(v);
    } else if (tag == "usemtl" || tag == "g" || tag == "o") {
      std::string name;
      is >> name;
      current_group = name;
      current_material = -1;  // resolved lazily on first face
    } else if (tag == "f") {
      std::vector<int> indices;
      std::string tok;
      while (is >> tok) {
        const size_t slash = tok.find('/');
        int idx = 0;
        try {
          idx = std::stoi(slash == std::string::npos ? tok : tok.substr(0, slash));
        } catch (const std::exception&) {
          throw ParseError(obj_path + ":" + std::to_string(lineno) + ": bad face index '" +
                           tok + "'");
        }
        if (idx < 0) idx = static_cast<int>(verts.size()) + idx + 1;
        if (idx < 1 || idx > static_cast<int>(verts.size()))
          throw ParseError(obj_path + ":" + std::to_string(lineno) + ": vertex index out of range");
        indices.push_back(idx - 1);
      }
      if (indices.size() < 3)
        throw ParseError(obj_path + ":" + std::to_string(lineno) + ": face with <3 vertices");
      if (current_material < 0) current_material = resolve(current_group);
      for (size_t i = 1; i + 1 < indices.size(); ++i)
        tris.push_back({verts[indices[0]], verts[indices[i]], verts[indices[i + 1]],
                        current_material});
    }
  }
  return tris;
}

}  // namespace

Scene load_scene_from_text(const std::string& config_text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(config_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config parse failure: ") + e.what());
  }

  Scene scene;
  try {
    if (doc.contains("physics")) {
      const auto& p = doc["physics"];
      if (p.contains("c")) scene.c = p["c"].get<double>();
      if (p.contains("sample_rate")) scene.sample_rate = p["sample_rate"].get<double>();
      if (p.contains("rir_seconds")) scene.rir_seconds = p["rir_seconds"].get<double>();
    }

    if (doc.contains("materials")) {
      auto parse_material = [](const std::string& name, const json& body) {
        Material m;
        m.name = name;
        if (!body.contains("absorption"))
          throw ParseError("materials['" + name + "']: missing absorption");
        m.absorption = parse_bands(body["absorption"], BandUnit::coefficient,
                                   "materials['" + name + "'].absorption");
        m.scattering = body.contains("scattering")
                           ? parse_bands(body["scattering"], BandUnit::coefficient,
                                         "materials['" + name + "'].scattering")
                           : BandSpectrum::flat(0.1, BandUnit::coefficient);
        return m;
      };
      const auto& mats = doc["materials"];
      if (mats.is_array()) {
        // Ordered form; material ids follow array order.
        for (const auto& body : mats)
          scene.materials.push_back(parse_material(body.at("name").get<std::string>(), body));
      } else {
        for (auto it = mats.begin(); it != mats.end(); ++it)
          scene.materials.push_back(parse_material(it.key(), it.value()));
      }
    }

    if (doc.contains("air")) {
      size_t i = 0;
      for (const auto& b : doc["air"]) scene.air.push_back(parse_box(b, "air[" + std::to_string(i++) + "]"));
    }

    if (doc.contains("mesh")) {
      const auto& mesh = doc["mesh"];
      if (mesh.is_string() || (mesh.is_object() && mesh.contains("path"))) {
        std::map<std::string, std::string> mat_map;
        std::string rel = mesh.is_string() ? mesh.get<std::string>()
                                           : mesh["path"].get<std::string>();
        if (mesh.is_object() && mesh.contains("materials"))
          for (auto it = mesh["materials"].begin(); it != mesh["materials"].end(); ++it)
            mat_map[it.key()] = it.value().get<std::string>();
        if (mat_map.empty() && !scene.materials.empty()) mat_map["*"] = scene.materials[0].name;
        fs::path p(rel);
        if (p.is_relative()) p = fs::path(base_dir) / p;
        scene.mesh = load_obj(p.string(), mat_map, scene.materials);
      } else if (mesh.is_object() && mesh.contains("vertices")) {
        std::vector<Vec3> verts;
        size_t i = 0;
        for (const auto& v : mesh["vertices"])
          verts.push_back(parse_vec3(v, "mesh.vertices[" + std::to_string(i++) + "]"));
        i = 0;
        for (const auto& t : mesh["triangles"]) {
          const std::string path = "mesh.triangles[" + std::to_string(i++) + "]";
          if (!t.is_array() || t.size() != 4) throw ParseError(path + ": expected [i, j, k, material]");
          Triangle tri;
          const int a = t[0].get<int>(), b = t[1].get<int>(), c = t[2].get<int>();
          if (a < 0 || b < 0 || c < 0 || a >= static_cast<int>(verts.size()) ||
              b >= static_cast<int>(verts.size()) || c >= static_cast<int>(verts.size()))
            throw ParseError(path + ": vertex index out of range");
          tri.a = verts[a];
          tri.b = verts[b];
          tri.c = verts[c];
          tri.material = material_index(t[3].get<std::string>(), scene.materials, path);
          scene.mesh.push_back(tri);
        }
      } else {
        throw ParseError("mesh: expected an OBJ path or inline vertices/triangles");
      }
    }

    if (doc.contains("sources")) {
      size_t i = 0;
      for (const auto& s : doc["sources"]) {
        const std::string path = "sources[" + std::to_string(i++) + "]";
        SourceRegion r;
        r.box = parse_box(s.contains("box") ? s["box"] : s, path);
        if (s.contains("weight")) r.weight = s["weight"].get<double>();
        if (s.contains("clip")) {
          fs::path p(s["clip"].get<std::string>());
          if (p.is_relative()) p = fs::path(base_dir) / p;
          r.clip_path = p.string();
        }
        if (s.contains("spectrum"))
          r.spectrum = parse_bands(s["spectrum"], BandUnit::decibel, path + ".spectrum");
        scene.primary_regions.push_back(std::move(r));
      }
    }

    if (doc.contains("noise")) {
      size_t i = 0;
      for (const auto& n : doc["noise"]) {
        const std::string path = "noise[" + std::to_string(i++) + "]";
        NoiseSource ns;
        ns.position = parse_vec3(n["position"], path + ".position");
        ns.spectrum = n.contains("spectrum")
                          ? parse_bands(n["spectrum"], BandUnit::decibel, path + ".spectrum")
                          : BandSpectrum::flat(50.0, BandUnit::decibel);
        scene.noise_sources.push_back(ns);
      }
    }

    if (doc.contains("listener_boxes")) {
      size_t i = 0;
      for (const auto& b : doc["listener_boxes"])
        scene.listener_boxes.push_back(parse_box(b, "listener_boxes[" + std::to_string(i++) + "]"));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("config structure error: ") + e.what());
  }

  const auto violations = validate_scene(scene);
  if (!violations.empty()) {
    std::ostringstream os;
    os << "scene validation failed:";
    for (const auto& v : violations)
      os << "\n  [" << violation_code_name(v.code) << "] " << v.path << ": " << v.message;
    throw ValidationError(os.str());
  }
  return scene;
}

Scene load_scene(const std::string& config_path) {
  std::ifstream f(config_path);
  if (!f) throw ConfigNotFoundError("config not found: " + config_path);
  std::stringstream ss;
  ss << f.rdbuf();
  return load_scene_from_text(ss.str(), fs::path(config_path).parent_path().string());
}

namespace {

json bands_to_json(const BandSpectrum& s) {
  json a = json::array();
  for (int b = 0; b < kNumBands; ++b) a.push_back(s[b]);
  return a;
}

json vec_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
json box_to_json(const Aabb& b) { return json{{"min", vec_to_json(b.min)}, {"max", vec_to_json(b.max)}}; }

}  // namespace

std::string serialize_scene(const Scene& scene) {
  json doc;
  doc["physics"] = {{"c", scene.c},
                    {"sample_rate", scene.sample_rate},
                    {"rir_seconds", scene.rir_seconds}};

  // Array form keeps material ids stable through a round trip.
  json mats = json::array();
  for (const auto& m : scene.materials)
    mats.push_back({{"name", m.name},
                    {"absorption", bands_to_json(m.absorption)},
                    {"scattering", bands_to_json(m.scattering)}});
  doc["materials"] = mats;

  json air = json::array();
  for (const auto& b : scene.air) air.push_back(box_to_json(b));
  doc["air"] = air;

  // Inline mesh: every vertex listed per triangle keeps this simple and lossless.
  json verts = json::array();
  json tris = json::array();
  for (const auto& t : scene.mesh) {
    const int base = static_cast<int>(verts.size());
    verts.push_back(vec_to_json(t.a));
    verts.push_back(vec_to_json(t.b));
    verts.push_back(vec_to_json(t.c));
    tris.push_back(json::array({base, base + 1, base + 2, scene.materials[t.material].name}));
  }
  doc["mesh"] = {{"vertices", verts}, {"triangles", tris}};

  json sources = json::array();
  for (const auto& r : scene.primary_regions) {
    json s = {{"box", box_to_json(r.box)}, {"weight", r.weight}};
    if (r.clip_path) s["clip"] = *r.clip_path;
    if (r.spectrum) s["spectrum"] = bands_to_json(*r.spectrum);
    sources.push_back(s);
  }
  doc["sources"] = sources;

  json noise = json::array();
  for (const auto& n : scene.noise_sources)
    noise.push_back({{"position", vec_to_json(n.position)}, {"spectrum", bands_to_json(n.spectrum)}});
  doc["noise"] = noise;

  json boxes = json::array();
  for (const auto& b : scene.listener_boxes) boxes.push_back(box_to_json(b));
  doc["listener_boxes"] = boxes;

  return doc.dump(2);
}

std::string scene_digest(const Scene& scene) {
  const std::string text = serialize_scene(scene);
  uint64_t h = 1469598103934665603ULL;
  for (char c : text) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace echoplace
