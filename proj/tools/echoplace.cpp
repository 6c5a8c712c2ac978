// echoplace: room-acoustics receiver placement toolkit.
//
// Subcommands: optimize, field-map, sti, baseline, validate. All randomness
// flows from --seed; artifacts land in --out with fixed names so downstream
// plotting can script against them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "echoplace/annealer.hpp"
#include "echoplace/errors.hpp"
#include "echoplace/geo_solver.hpp"
#include "echoplace/hybrid.hpp"
#include "echoplace/objective.hpp"
#include "echoplace/placement.hpp"
#include "echoplace/scene_io.hpp"
#include "echoplace/sti.hpp"
#include "echoplace/wav.hpp"
#include "echoplace/wave_solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace echoplace;

namespace {

struct CommonOpts {
  std::string config;
  std::string out_dir = ".";
  uint64_t seed = 0;
  double spacing = 0.075;
  int rays = 50000;
  int per_region = 4;
  double t0 = AnnealParams{}.t0;
  double alpha = 0.95;
  int k_reject = 10;
  double crossover_hz = 500.0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_config) {
  auto* cfg = cmd->add_option("--config", o.config, "Scene config (JSON)");
  if (needs_config) cfg->required();
  cmd->add_option("--seed", o.seed, "Master random seed");
  cmd->add_option("--out", o.out_dir, "Output directory");
  cmd->add_option("--spacing", o.spacing, "Listener sampling spacing (m)");
  cmd->add_option("--rays", o.rays, "Rays per geometric trace");
  cmd->add_option("--per-region", o.per_region, "Source samples per region");
  cmd->add_option("--t0", o.t0, "Initial annealing temperature");
  cmd->add_option("--alpha", o.alpha, "Cooling rate in (0,1)");
  cmd->add_option("--k-reject", o.k_reject, "Consecutive-rejection stop");
  cmd->add_option("--crossover-hz", o.crossover_hz, "Wave/geometric crossover frequency");
}

ObjectiveParams objective_params(const CommonOpts& o) {
  ObjectiveParams p;
  p.geo.ray_count = o.rays;
  p.crossover_hz = o.crossover_hz;
  p.seed = o.seed;
  return p;
}

std::string fmt_pos(const Vec3& v) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f", v.x, v.y, v.z);
  return buf;
}

json sti_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) {
    if (std::isnan(x))
      a.push_back(nullptr);
    else
      a.push_back(x);
  }
  return a;
}

int cmd_optimize(const CommonOpts& o) {
  const auto t_start = std::chrono::steady_clock::now();
  const Scene scene = load_scene(o.config);
  fs::create_directories(o.out_dir);

  const CandidateSet candidates =
      sample_listeners(scene, o.spacing, derive_seed(o.seed, "listeners"));
  const SourceSamples sources =
      sample_sources(scene, o.per_region, derive_seed(o.seed, "sources"));

  ObjectiveEvaluator evaluator(scene, sources, objective_params(o));
  AnnealParams params;
  params.t0 = o.t0;
  params.alpha = o.alpha;
  params.k_reject = o.k_reject;
  params.seed = o.seed;

  const AnnealResult result = anneal(
      candidates,
      [&](int id) { return evaluator.objective(id, candidates.points[id].position); }, params);

  const auto& before = evaluator.evaluate(result.initial_candidate,
                                          candidates.points[result.initial_candidate].position);
  const auto& after =
      evaluator.evaluate(result.best_candidate, candidates.points[result.best_candidate].position);

  write_trace_csv((fs::path(o.out_dir) / "trace.csv").string(), result.trace);
  write_candidates_csv((fs::path(o.out_dir) / "candidates.csv").string(), candidates);
  {
    std::ofstream marker(fs::path(o.out_dir) / "best_position.txt");
    marker << fmt_pos(candidates.points[result.best_candidate].position) << "\n";
  }

  const double wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  json report;
  report["scene_digest"] = scene_digest(scene);
  report["seed"] = o.seed;
  const auto& best_pos = candidates.points[result.best_candidate].position;
  report["best_position"] = {best_pos.x, best_pos.y, best_pos.z};
  report["best_candidate"] = result.best_candidate;
  report["initial_candidate"] = result.initial_candidate;
  report["best_objective"] = result.best_objective;
  report["initial_objective"] = result.initial_objective;
  report["avg_sti_before"] = before.weighted_avg;
  report["avg_sti_after"] = after.weighted_avg;
  report["rating_before"] = sti_rating(std::clamp(before.weighted_avg, 0.0, 1.0));
  report["rating_after"] = sti_rating(std::clamp(after.weighted_avg, 0.0, 1.0));
  report["per_source_sti_before"] = sti_array(before.per_source_sti);
  report["per_source_sti_after"] = sti_array(after.per_source_sti);
  report["iterations"] = static_cast<int>(result.trace.rows.size());
  report["candidates"] = static_cast<int>(candidates.points.size());
  report["source_samples"] = static_cast<int>(sources.samples.size());
  report["wall_time_s"] = wall_s;  // the one field that varies run to run
  report["params"] = {{"spacing", o.spacing},   {"rays", o.rays},
                      {"per_region", o.per_region}, {"t0", params.t0},
                      {"alpha", params.alpha},  {"t_end", params.t_end},
                      {"k_reject", params.k_reject}, {"crossover_hz", o.crossover_hz}};

  std::ofstream rf(fs::path(o.out_dir) / "report.json");
  rf << report.dump(2) << "\n";

  std::cout << "best position: " << fmt_pos(best_pos) << "\n"
            << "objective: " << result.initial_objective << " -> " << result.best_objective
            << "\navg STI: " << before.weighted_avg << " -> " << after.weighted_avg << " ("
            << report["rating_before"].get<std::string>() << " -> "
            << report["rating_after"].get<std::string>() << ")\n"
            << "iterations: " << result.trace.rows.size() << ", wall time: " << wall_s << " s\n";
  return 0;
}

int cmd_field_map(const CommonOpts& o) {
  const Scene scene = load_scene(o.config);
  fs::create_directories(o.out_dir);
  const SourceSamples sources =
      sample_sources(scene, o.per_region, derive_seed(o.seed, "sources"));
  ObjectiveEvaluator evaluator(scene, sources, objective_params(o));

  // Regular grid (cell centers) over the listener boxes.
  std::vector<Candidate> grid;
  for (size_t b = 0; b < scene.listener_boxes.size(); ++b) {
    const Aabb& box = scene.listener_boxes[b];
    int cells[3];
    for (int a = 0; a < 3; ++a) {
      const double ext = box.max[a] - box.min[a];
      cells[a] = ext <= 1e-12 ? 1 : static_cast<int>(std::ceil(ext / o.spacing - 1e-9));
    }
    for (int ci = 0; ci < cells[0]; ++ci)
      for (int cj = 0; cj < cells[1]; ++cj)
        for (int ck = 0; ck < cells[2]; ++ck) {
          Vec3 p;
          const int cc[3] = {ci, cj, ck};
          for (int a = 0; a < 3; ++a) {
            const double ext = box.max[a] - box.min[a];
            p[a] = ext <= 1e-12 ? box.min[a]
                                : box.min[a] + ext / cells[a] * (cc[a] + 0.5);
          }
          if (point_in_union(p, scene.air, 1e-9)) grid.push_back({p, static_cast<int>(b)});
        }
  }
  if (grid.empty()) throw ValidationError("field-map: no grid points inside the air volume");

  const fs::path csv_path = fs::path(o.out_dir) / "field.csv";
  std::ofstream f(csv_path);
  if (!f) throw IoError("cannot write " + csv_path.string());
  f << "x,y,z,sti_objective\n";
  char buf[160];
  for (size_t i = 0; i < grid.size(); ++i) {
    const double q = evaluator.evaluate(static_cast<int>(i), grid[i].position).weighted_avg;
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f\n", grid[i].position.x,
                  grid[i].position.y, grid[i].position.z, q);
    f << buf;
    std::cout << "[" << (i + 1) << "/" << grid.size() << "] " << fmt_pos(grid[i].position)
              << " -> " << q << "\n";
  }
  return 0;
}

BandSpectrum read_noise_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigNotFoundError("noise CSV not found: " + path);
  BandSpectrum levels = BandSpectrum::flat(-300.0, BandUnit::decibel);
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || !std::isdigit(static_cast<unsigned char>(line[0]))) continue;
    double hz = 0.0, db = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf", &hz, &db) != 2)
      throw ParseError("noise CSV row not 'band_hz,level_db': " + line);
    bool matched = false;
    for (int k = 0; k < kNumBands; ++k)
      if (std::fabs(hz - kBandCenters[k]) < 1.0) {
        levels[k] = db;
        matched = true;
      }
    if (!matched) throw ParseError("noise CSV band " + std::to_string(hz) + " Hz is not an octave band center");
  }
  return levels;
}

int cmd_sti(const std::string& rir_path, const std::string& noise_csv, double speech_db) {
  const ImpulseResponse h = read_rir(rir_path);
  std::optional<NoiseContext> ctx;
  if (!noise_csv.empty()) {
    NoiseContext c;
    const BandSpectrum noise_db = read_noise_csv(noise_csv);
    for (int k = 0; k < kNumBands; ++k) c.noise_intensity[k] = db_to_intensity(noise_db[k]);
    c.speech_level_db = BandSpectrum::flat(speech_db, BandUnit::decibel);
    ctx = c;
  }
  const StiResult r = sti_from_rir(h, ctx);
  std::printf("STI: %.4f\nrating: %s\n", r.sti, r.rating.c_str());
  std::printf("band_hz,mti\n");
  for (int k = 0; k < kNumBands; ++k) std::printf("%g,%.4f\n", kBandCenters[k], r.mti[k]);
  return 0;
}

struct Pair {
  Vec3 source, listener;
};

std::vector<Pair> read_pairs_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigNotFoundError("pairs CSV not found: " + path);
  std::vector<Pair> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("sx", 0) == 0) continue;
    Pair p;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &p.source.x, &p.source.y,
                    &p.source.z, &p.listener.x, &p.listener.y, &p.listener.z) != 6)
      throw ParseError("pairs CSV row not 'sx,sy,sz,lx,ly,lz': " + line);
    out.push_back(p);
  }
  return out;
}

int cmd_baseline(const CommonOpts& o, double volume, double t60_override,
                 const std::string& pairs_csv) {
  double t60 = t60_override;
  if (t60 <= 0.0) {
    double v = volume;
    if (v <= 0.0 && !o.config.empty()) v = load_scene(o.config).air_volume();
    if (v <= 0.0)
      throw ValidationError("baseline: give --volume, --t60, or --config");
    t60 = empirical_t60(v);
    std::printf("T60 = %.3f s\n", t60);
  }
  bool clipped = false;
  const double sti = empirical_sti(t60, &clipped);
  std::printf("STI = %.3f\n", sti);
  if (clipped) std::fprintf(stderr, "warning: empirical STI outside [0,1], clipped\n");

  if (!pairs_csv.empty()) {
    if (o.config.empty()) throw ValidationError("baseline: --pairs needs --config");
    const Scene scene = load_scene(o.config);
    const auto pairs = read_pairs_csv(pairs_csv);

    std::printf("pair,hybrid_sti,geometric_sti,empirical_sti\n");
    for (size_t i = 0; i < pairs.size(); ++i) {
      SourceSamples one;
      SourceSample s;
      s.position = pairs[i].source;
      s.weight = 1.0;
      s.spectrum = default_speech_spectrum();
      one.samples.push_back(s);

      ObjectiveParams params = objective_params(o);
      ObjectiveEvaluator hybrid_eval(scene, one, params);
      params.propagation = Propagation::geometric_only;
      ObjectiveEvaluator geo_eval(scene, one, params);

      const double sti_h = hybrid_eval.evaluate(static_cast<int>(i), pairs[i].listener).weighted_avg;
      const double sti_g = geo_eval.evaluate(static_cast<int>(i), pairs[i].listener).weighted_avg;
      std::printf("%c,%.4f,%.4f,%.4f\n", static_cast<char>('a' + i), sti_h, sti_g, sti);
    }
  }
  return 0;
}

int cmd_validate(const CommonOpts& o) {
  try {
    load_scene(o.config);
  } catch (const ValidationError& e) {
    std::cout << e.what() << "\n";
    return static_cast<int>(Errc::validation);
  }
  std::cout << "scene OK\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"echoplace: receiver placement by acoustic simulation"};
  app.require_subcommand(1);

  CommonOpts opt_o, opt_f, opt_b, opt_v;
  auto* optimize = app.add_subcommand("optimize", "Optimize receiver placement");
  add_common(optimize, opt_o, true);

  auto* field = app.add_subcommand("field-map", "Evaluate the objective on a grid");
  add_common(field, opt_f, true);

  auto* sti_cmd = app.add_subcommand("sti", "STI of an RIR WAV");
  std::string rir_path, noise_csv;
  double speech_db = 60.0;
  sti_cmd->add_option("--rir", rir_path, "Input RIR (mono WAV)")->required();
  sti_cmd->add_option("--noise", noise_csv, "Noise spectrum CSV: band_hz,level_db");
  sti_cmd->add_option("--speech-db", speech_db, "Speech level per band, dB SPL at 1 m");

  auto* baseline = app.add_subcommand("baseline", "Empirical T60/STI baselines");
  double volume = 0.0, t60 = 0.0;
  std::string pairs_csv;
  add_common(baseline, opt_b, false);
  baseline->add_option("--volume", volume, "Room volume (m^3)");
  baseline->add_option("--t60", t60, "Reverberation time override (s)");
  baseline->add_option("--pairs", pairs_csv, "Source-listener pairs CSV: sx,sy,sz,lx,ly,lz");

  auto* validate = app.add_subcommand("validate", "Validate a scene config");
  add_common(validate, opt_v, true);

  try {
    app.parse(argc, argv);
    if (optimize->parsed()) return cmd_optimize(opt_o);
    if (field->parsed()) return cmd_field_map(opt_f);
    if (sti_cmd->parsed()) return cmd_sti(rir_path, noise_csv, speech_db);
    if (baseline->parsed()) return cmd_baseline(opt_b, volume, t60, pairs_csv);
    if (validate->parsed()) return cmd_validate(opt_v);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(Errc::usage);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
