#pragma once

#include "affinelab/limit_laws.hpp"
#include "affinelab/model_params.hpp"
#include "affinelab/rng.hpp"
#include "affinelab/sde_engine.hpp"

#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace affinelab {

enum class Execution { Serial, Parallel };

/// threads <= 0 means the OpenMP default.
struct ExecutionPolicy {
  Execution mode = Execution::Parallel;
  int threads = 0;
};

int resolved_thread_count(const ExecutionPolicy& policy);

/// out[r] = fn(r) for r in [0, count). Each replicate owns its result slot,
/// so the output does not depend on the schedule or the thread count.
template <class T, class Fn>
std::vector<T> map_replicates(std::size_t count, const ExecutionPolicy& policy, Fn&& fn) {
  std::vector<T> out(count);
  if (policy.mode == Execution::Serial) {
    for (std::size_t r = 0; r < count; ++r) out[r] = fn(r);
    return out;
  }
  const auto n = static_cast<std::int64_t>(count);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16) num_threads(resolved_thread_count(policy))
  for (std::int64_t r = 0; r < n; ++r) {
    try {
      out[static_cast<std::size_t>(r)] = fn(static_cast<std::size_t>(r));
    } catch (...) {
#pragma omp critical(affinelab_map_replicates)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

/// Estimator statistics of one simulated observation series. Undefined
/// values (degenerate denominators, nonpositive gamma) are NaN.
struct EstimatorSample {
  double n_theta_known_m = 0.0;
  double n_theta_lse = 0.0;
  double m_lse = 0.0;
  double n_theta_clse = 0.0;
  double m_clse = 0.0;
};

EstimatorSample estimator_sample(const ObservationSeries& obs, double known_m);

struct SeriesBatchSpec {
  ModelParams params;
  InitialLaw init;
  std::size_t n_obs = 1000;
  std::size_t steps_per_unit = 8;
  JointPathOptions options;
};

/// Replicate r simulates its series from stream (master_seed, arm_stream_id(arm, r)).
std::vector<EstimatorSample> estimator_batch(const SeriesBatchSpec& spec, std::uint64_t master_seed,
                                             std::uint64_t arm, std::size_t count, const ExecutionPolicy& policy);

std::vector<LimitFunctionals> limit_functional_batch(double a, double m, std::size_t steps,
                                                     std::uint64_t master_seed, std::uint64_t arm,
                                                     std::size_t count, const ExecutionPolicy& policy);

struct TerminalState {
  double y = 0.0;
  double x = 0.0;
};

/// Terminal (Y, X) of joint paths on `grid`.
std::vector<TerminalState> terminal_state_batch(const ModelParams& params, const InitialLaw& init,
                                                const TimeGrid& grid, const JointPathOptions& options,
                                                std::uint64_t master_seed, std::uint64_t arm, std::size_t count,
                                                const ExecutionPolicy& policy);

}  // namespace affinelab
