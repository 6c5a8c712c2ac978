#include "echoplace/annealer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "echoplace/errors.hpp"

namespace echoplace {

void AnnealParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("anneal: cooling rate alpha must be in (0,1)");
  if (!(t_end > 0.0 && t_end < t0))
    throw ValidationError("anneal: need 0 < T_end < T0");
  if (k_reject < 1) throw ValidationError("anneal: k_reject must be >= 1");
}

bool test_state(double q, double q_new, double temperature, Rng& rng) {
  if (q_new > q) return true;
  const double p = std::exp((q_new - q) / temperature);
  return rng.uniform() < p;
}

int permute_state(int current, const CandidateSet& candidates, Rng& rng) {
  const int n = static_cast<int>(candidates.points.size());
  if (n < 1) throw ValidationError("permute_state: empty candidate set");
  if (n == 1) return current;
  int next = static_cast<int>(rng.below(static_cast<uint64_t>(n - 1)));
  if (next >= current) ++next;
  return next;
}

AnnealResult anneal(const CandidateSet& candidates,
                    const std::function<double(int)>& objective, const AnnealParams& params) {
  params.validate();
  const int n = static_cast<int>(candidates.points.size());
  if (n < 1) throw ValidationError("anneal: empty candidate set");

  Rng rng(derive_seed(params.seed, "anneal"));

  AnnealResult result;
  int current = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
  double q = objective(current);
  result.initial_candidate = current;
  result.initial_objective = q;
  result.best_candidate = current;
  result.best_objective = q;
  if (n == 1) return result;

  double temperature = params.t0;
  int consecutive_rejects = 0;
  int iteration = 0;
  while (temperature > params.t_end) {
    const int proposal = permute_state(current, candidates, rng);
    const double q_new = objective(proposal);
    const bool accepted = test_state(q, q_new, temperature, rng);
    if (accepted) {
      current = proposal;
      q = q_new;
      consecutive_rejects = 0;
      if (q > result.best_objective) {
        result.best_objective = q;
        result.best_candidate = current;
      }
    } else {
      ++consecutive_rejects;
    }
    temperature *= params.alpha;
    ++iteration;
    result.trace.rows.push_back(
        {iteration, proposal, q_new, temperature, accepted, result.best_objective});
    if (consecutive_rejects >= params.k_reject) break;
  }
  return result;
}

void write_trace_csv(const std::string& path, const AnnealingTrace& trace) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write trace CSV: " + path);
  f << "iter,candidate_id,q,T,accepted,best_q\n";
  char buf[200];
  for (const auto& r : trace.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.9g,%.9g,%d,%.9g\n", r.iteration, r.candidate,
                  r.objective, r.temperature, r.accepted ? 1 : 0, r.best_objective);
    f << buf;
  }
}

}  // namespace echoplace
