#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "echoplace/placement.hpp"
#include "echoplace/rng.hpp"

namespace echoplace {

// Cooling schedule defaults: the end temperature makes a 0.03 (one STI JND)
// worsening acceptable with probability 1%, and T0 makes the same worsening
// acceptable with probability 50% at the start. With alpha = 0.95 that cools
// in 37 iterations.
struct AnnealParams {
  double t0 = 0.03 / 0.6931471805599453;        // 0.03 / ln 2
  double alpha = 0.95;
  double t_end = 0.03 / 4.605170185988091;      // -0.03 / ln 0.01
  int k_reject = 10;
  uint64_t seed = 0;

  void validate() const;
};

struct TraceRow {
  int iteration = 0;
  int candidate = 0;
  double objective = 0.0;
  double temperature = 0.0;
  bool accepted = false;
  double best_objective = 0.0;
};

struct AnnealingTrace {
  std::vector<TraceRow> rows;
};

struct AnnealResult {
  int best_candidate = -1;
  double best_objective = 0.0;
  int initial_candidate = -1;
  double initial_objective = 0.0;
  AnnealingTrace trace;
};

// Metropolis move test: better states always pass; a worse state passes with
// probability exp((q_new - q) / T).
bool test_state(double q, double q_new, double temperature, Rng& rng);

// Uniform random distinct candidate (identity when only one exists).
int permute_state(int current, const CandidateSet& candidates, Rng& rng);

// Simulated annealing over candidate ids. The objective is maximized; geometric
// cooling runs until T <= T_end or k_reject consecutive rejections. Returns the
// best state ever visited (never a worse final state).
AnnealResult anneal(const CandidateSet& candidates,
                    const std::function<double(int)>& objective, const AnnealParams& params);

void write_trace_csv(const std::string& path, const AnnealingTrace& trace);

}  // namespace echoplace
