#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "echoplace/errors.hpp"
#include "echoplace/placement.hpp"
#include "test_support.hpp"

using namespace echoplace;

TEST_CASE("sample_listeners: 1x1 surface box at 0.1 m spacing gives 10x10 strata") {
  Scene s = testsupport::box_scene({4, 3, 2.5}, 0.2);
  s.listener_boxes.push_back({{1.0, 1.0, 0.8}, {2.0, 2.0, 0.8}});
  const CandidateSet set = sample_listeners(s, 0.1, 42);
  CHECK(set.points.size() == 100);
  for (const auto& c : set.points) {
    CHECK(c.position.z == 0.8);
    CHECK(c.position.x >= 1.0);
    CHECK(c.position.x <= 2.0);
    CHECK(point_in_union(c.position, s.air));
  }
}

TEST_CASE("sample_listeners: stratified points keep half-spacing separation") {
  Scene s = testsupport::box_scene({4, 3, 2.5}, 0.2);
  s.listener_boxes.push_back({{0.5, 0.5, 0.9}, {2.5, 2.0, 0.9}});
  const CandidateSet set = sample_listeners(s, 0.1, 7);
  for (size_t i = 0; i < set.points.size(); ++i)
    for (size_t j = i + 1; j < set.points.size(); ++j) {
      const double d = norm(set.points[i].position - set.points[j].position);
      CHECK(d >= 0.5 * set.spacing_m - 1e-12);
    }
}

TEST_CASE("sample_listeners: volumetric box count is the product of strata") {
  Scene s = testsupport::box_scene({4, 3, 2.5}, 0.0);
  s.listener_boxes.push_back({{0.5, 0.5, 0.5}, {1.5, 1.3, 1.1}});
  // ceil(1/0.2)=5, ceil(0.8/0.2)=4, ceil(0.6/0.2)=3
  const CandidateSet set = sample_listeners(s, 0.2, 3);
  CHECK(set.points.size() == 5u * 4u * 3u);
}

TEST_CASE("sample_listeners: box outside air yields EmptyCandidates") {
  Scene s = testsupport::box_scene({4, 3, 2.5}, 0.2);
  s.listener_boxes.push_back({{10, 10, 10}, {11, 11, 10}});
  try {
    sample_listeners(s, 0.1, 1);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("EmptyCandidates") != std::string::npos);
  }
}

TEST_CASE("sample_listeners: same seed, same candidates") {
  Scene s = testsupport::box_scene({4, 3, 2.5}, 0.2);
  s.listener_boxes.push_back({{1, 1, 0.8}, {3, 2, 0.8}});
  const CandidateSet a = sample_listeners(s, 0.07, 99);
  const CandidateSet b = sample_listeners(s, 0.07, 99);
  REQUIRE(a.points.size() == b.points.size());
  for (size_t i = 0; i < a.points.size(); ++i)
    CHECK(norm(a.points[i].position - b.points[i].position) == 0.0);
  const CandidateSet c = sample_listeners(s, 0.07, 100);
  bool any_differ = false;
  for (size_t i = 0; i < std::min(a.points.size(), c.points.size()); ++i)
    if (norm(a.points[i].position - c.points[i].position) > 0.0) any_differ = true;
  CHECK(any_differ);
}

TEST_CASE("sample_sources: count and weights per region") {
  Scene s = testsupport::box_scene({4, 3, 2.5}, 0.2);
  SourceRegion r;
  r.box = {{0.5, 0.5, 1.0}, {1.5, 1.5, 1.5}};
  r.weight = 2.0;
  s.primary_regions.push_back(r);
  const SourceSamples out = sample_sources(s, 5, 11);
  REQUIRE(out.samples.size() == 5);
  for (const auto& sample : out.samples) {
    CHECK(sample.weight == 2.0);
    CHECK(r.box.contains(sample.position));
    // No clip, no spectrum: the documented default speech spectrum applies.
    CHECK(sample.spectrum[0] == 60.0);
  }
}

TEST_CASE("sample_sources: zero-weight region keeps its samples") {
  Scene s = testsupport::box_scene({6, 3, 2.5}, 0.2);
  SourceRegion a;
  a.box = {{0.5, 0.5, 1.0}, {1.5, 1.5, 1.5}};
  a.weight = 1.0;
  SourceRegion garage;
  garage.box = {{4.0, 0.5, 1.0}, {5.5, 1.5, 1.5}};
  garage.weight = 0.0;
  s.primary_regions = {a, garage};
  const SourceSamples out = sample_sources(s, 3, 5);
  REQUIRE(out.samples.size() == 6);
  int zero_weight = 0;
  for (const auto& sample : out.samples)
    if (sample.weight == 0.0) ++zero_weight;
  CHECK(zero_weight == 3);
}

TEST_CASE("candidate and source CSV dumps") {
  Scene s = testsupport::box_scene({4, 3, 2.5}, 0.2);
  s.listener_boxes.push_back({{1, 1, 0.8}, {1.4, 1.4, 0.8}});
  SourceRegion r;
  r.box = {{0.5, 0.5, 1.0}, {1.5, 1.5, 1.5}};
  r.weight = 2.0;
  s.primary_regions.push_back(r);

  const CandidateSet set = sample_listeners(s, 0.2, 1);
  write_candidates_csv("/tmp/echoplace_cand_test.csv", set);
  std::string text = testsupport::read_file("/tmp/echoplace_cand_test.csv");
  CHECK(text.find("x,y,z,box_id") == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(set.points.size()) + 1);

  const SourceSamples samples = sample_sources(s, 3, 2);
  write_sources_csv("/tmp/echoplace_src_test.csv", samples);
  text = testsupport::read_file("/tmp/echoplace_src_test.csv");
  CHECK(text.find("x,y,z,region_id,weight") == 0);
  CHECK(text.find(",0,2\n") != std::string::npos);
  remove("/tmp/echoplace_cand_test.csv");
  remove("/tmp/echoplace_src_test.csv");
}

TEST_CASE("sample_sources: seed determinism") {
  Scene s = testsupport::box_scene({4, 3, 2.5}, 0.2);
  SourceRegion r;
  r.box = {{0.5, 0.5, 1.0}, {1.5, 1.5, 1.5}};
  s.primary_regions.push_back(r);
  const SourceSamples a = sample_sources(s, 4, 3);
  const SourceSamples b = sample_sources(s, 4, 3);
  for (size_t i = 0; i < a.samples.size(); ++i)
    CHECK(norm(a.samples[i].position - b.samples[i].position) == 0.0);
}
