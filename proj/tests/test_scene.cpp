#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "echoplace/errors.hpp"
#include "echoplace/scene.hpp"
#include "echoplace/scene_io.hpp"
#include "test_support.hpp"

using namespace echoplace;
namespace fs = std::filesystem;

namespace {

const char* kMinimalConfig = R"({
  "materials": {"plaster": {"absorption": 0.1, "scattering": 0.2}},
  "air": [{"min": [0, 0, 0], "max": [4, 3, 2.5]}],
  "mesh": {
    "vertices": [[0,0,0],[4,0,0],[4,3,0],[0,3,0],[0,0,2.5],[4,0,2.5],[4,3,2.5],[0,3,2.5]],
    "triangles": [[0,1,2,"plaster"],[0,2,3,"plaster"],[4,6,5,"plaster"],[4,7,6,"plaster"]]
  },
  "sources": [{"box": {"min": [0.5, 0.5, 1.0], "max": [1.5, 1.5, 1.6]}, "weight": 1.0}],
  "listener_boxes": [{"min": [2.0, 1.0, 0.8], "max": [3.5, 2.5, 0.8]}]
})";

std::string write_temp(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream f(p);
  f << content;
  return p.string();
}

}  // namespace

TEST_CASE("load_scene: minimal config fills defaults") {
  const Scene s = load_scene_from_text(kMinimalConfig, ".");
  CHECK(s.materials.size() == 1);
  CHECK(s.primary_regions.size() == 1);
  CHECK(s.listener_boxes.size() == 1);
  CHECK(s.c == doctest::Approx(343.0));
  CHECK(s.sample_rate == doctest::Approx(32000.0));
  CHECK(!s.primary_regions[0].clip_path.has_value());
  CHECK(!s.primary_regions[0].spectrum.has_value());
}

TEST_CASE("load_scene: dangling material is reported by name") {
  std::string cfg = kMinimalConfig;
  const auto pos = cfg.find("[0,2,3,\"plaster\"]");
  REQUIRE(pos != std::string::npos);
  cfg.replace(pos, 17, "[0,2,3,\"glass\"]");
  try {
    load_scene_from_text(cfg, ".");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("glass") != std::string::npos);
  }
}

TEST_CASE("load_scene: berlin-style two-room config") {
  const char* cfg = R"({
    "materials": {"walls": {"absorption": [0.1,0.1,0.15,0.2,0.25,0.3,0.3]}},
    "air": [{"min": [0,0,0], "max": [4,5,2.6]}, {"min": [4,0,0], "max": [8,5,2.6]}],
    "sources": [
      {"box": {"min": [0.5,0.5,1.2], "max": [3,4,1.6]}, "weight": 1.0},
      {"box": {"min": [4.5,0.5,1.2], "max": [7.5,4,1.6]}, "weight": 0.5}
    ],
    "noise": [{"position": [1.0, 4.5, 1.5], "spectrum": [60,60,60,55,50,45,40]}],
    "listener_boxes": [
      {"min": [1,1,0.8], "max": [3,4,0.8]},
      {"min": [5,1,0.8], "max": [7,4,0.8]}
    ]
  })";
  const Scene s = load_scene_from_text(cfg, ".");
  CHECK(s.listener_boxes.size() == 2);
  CHECK(s.noise_sources.size() == 1);
  CHECK(s.air.size() == 2);
}

TEST_CASE("load_scene: OBJ mesh with material map") {
  const std::string obj = write_temp("echoplace_test_room.obj",
                                     "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
                                     "usemtl Floor\nf 1 2 3 4\n");
  const std::string cfg = std::string(R"({
    "materials": {"carpet": {"absorption": 0.4}},
    "air": [{"min": [0,0,0], "max": [1,1,1]}],
    "mesh": {"path": ")") + obj + R"(", "materials": {"Floor": "carpet"}}
  })";
  const Scene s = load_scene_from_text(cfg, ".");
  CHECK(s.mesh.size() == 2);  // quad fan-triangulated
  CHECK(s.mesh[0].material == 0);
  fs::remove(obj);
}

TEST_CASE("validate_scene: clean scene has no violations") {
  const Scene s = testsupport::box_scene({4, 3, 2.5}, 0.2);
  CHECK(validate_scene(s).empty());
}

TEST_CASE("validate_scene: absorption 1.3 flags CoefficientOutOfRange") {
  Scene s = testsupport::box_scene({4, 3, 2.5}, 0.2);
  s.materials[0].absorption[3] = 1.3;
  const auto v = validate_scene(s);
  REQUIRE(v.size() == 1);
  CHECK(v[0].code == ViolationCode::CoefficientOutOfRange);
  CHECK(v[0].path.find("absorption[3]") != std::string::npos);
}

TEST_CASE("validate_scene: listener box outside air flags BoxOutsideAir") {
  Scene s = testsupport::box_scene({4, 3, 2.5}, 0.2);
  s.listener_boxes.push_back({{3.0, 1.0, 0.8}, {5.0, 2.0, 0.8}});  // pokes past x=4
  const auto v = validate_scene(s);
  REQUIRE(v.size() == 1);
  CHECK(v[0].code == ViolationCode::BoxOutsideAir);
}

TEST_CASE("validate_scene: listener box spanning two air boxes is inside") {
  Scene s;
  s.materials.push_back(testsupport::flat_material("m", 0.2));
  s.air.push_back({{0, 0, 0}, {2, 2, 2}});
  s.air.push_back({{2, 0, 0}, {4, 2, 2}});
  s.listener_boxes.push_back({{1, 0.5, 1}, {3, 1.5, 1}});
  CHECK(validate_scene(s).empty());
}

TEST_CASE("validate_scene: sample rate below 2x top band edge") {
  Scene s = testsupport::box_scene({4, 3, 2.5}, 0.2);
  s.sample_rate = 16000.0;
  const auto v = validate_scene(s);
  REQUIRE(v.size() == 1);
  CHECK(v[0].code == ViolationCode::SampleRateTooLow);
}

TEST_CASE("validate_scene: noise source outside air") {
  Scene s = testsupport::box_scene({4, 3, 2.5}, 0.2);
  s.noise_sources.push_back({{10, 10, 10}, BandSpectrum::flat(50, BandUnit::decibel)});
  const auto v = validate_scene(s);
  REQUIRE(v.size() == 1);
  CHECK(v[0].code == ViolationCode::NoiseOutsideAir);
}

TEST_CASE("scene round-trip: serialize then load is identity") {
  Scene s = testsupport::box_scene({4.2, 3.1, 2.6}, 0.17, 0.33);
  s.c = 340.0;
  s.sample_rate = 44100.0;
  s.rir_seconds = 0.8;
  s.materials.push_back(testsupport::flat_material("soft", 0.55, 0.6));
  s.mesh[3].material = 1;
  SourceRegion r;
  r.box = {{0.5, 0.5, 1.0}, {1.5, 1.2, 1.5}};
  r.weight = 2.5;
  r.spectrum = BandSpectrum::flat(58.0, BandUnit::decibel);
  s.primary_regions.push_back(r);
  s.noise_sources.push_back({{2.0, 1.0, 1.3}, BandSpectrum::flat(62.0, BandUnit::decibel)});
  s.listener_boxes.push_back({{1.0, 1.0, 0.8}, {3.0, 2.0, 0.8}});

  const Scene t = load_scene_from_text(serialize_scene(s), ".");

  CHECK(t.c == s.c);
  CHECK(t.sample_rate == s.sample_rate);
  CHECK(t.rir_seconds == s.rir_seconds);
  REQUIRE(t.materials.size() == s.materials.size());
  for (size_t i = 0; i < s.materials.size(); ++i) {
    CHECK(t.materials[i].name == s.materials[i].name);
    for (int b = 0; b < kNumBands; ++b) {
      CHECK(t.materials[i].absorption[b] == s.materials[i].absorption[b]);
      CHECK(t.materials[i].scattering[b] == s.materials[i].scattering[b]);
    }
  }
  REQUIRE(t.mesh.size() == s.mesh.size());
  for (size_t i = 0; i < s.mesh.size(); ++i) {
    CHECK(t.mesh[i].material == s.mesh[i].material);
    CHECK(echoplace::norm(t.mesh[i].a - s.mesh[i].a) == 0.0);
    CHECK(echoplace::norm(t.mesh[i].b - s.mesh[i].b) == 0.0);
    CHECK(echoplace::norm(t.mesh[i].c - s.mesh[i].c) == 0.0);
  }
  REQUIRE(t.primary_regions.size() == s.primary_regions.size());
  CHECK(t.primary_regions[0].weight == 2.5);
  CHECK(t.primary_regions[0].spectrum.has_value());
  REQUIRE(t.noise_sources.size() == 1);
  CHECK(t.noise_sources[0].spectrum[0] == 62.0);
  REQUIRE(t.listener_boxes.size() == 1);
  CHECK(t.listener_boxes[0].min.z == 0.8);

  // And a loaded scene always validates clean.
  CHECK(validate_scene(t).empty());
}

TEST_CASE("scene digest is stable and content-sensitive") {
  const Scene a = testsupport::box_scene({4, 3, 2.5}, 0.2);
  Scene b = a;
  CHECK(scene_digest(a) == scene_digest(b));
  b.c = 340.0;
  CHECK(scene_digest(a) != scene_digest(b));
}
