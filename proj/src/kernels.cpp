#include "affinelab/kernels.hpp"

#include "affinelab/estimators.hpp"

#include <cmath>
#include <limits>

namespace affinelab {

int resolved_thread_count(const ExecutionPolicy& policy) {
  if (policy.threads > 0) return policy.threads;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

EstimatorSample estimator_sample(const ObservationSeries& obs, double known_m) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(obs.n());
  EstimatorSample s{nan, nan, nan, nan, nan};

  const EstimatorOutput known = lse_theta_known_m(obs, known_m);
  if (known.theta) s.n_theta_known_m = n * *known.theta;

  const EstimatorOutput joint = lse_theta_m(obs);
  if (joint.theta) {
    s.n_theta_lse = n * *joint.theta;
    s.m_lse = *joint.m;
  }

  const EstimatorOutput clse = clse_theta_m(obs);
  if (clse.theta) {
    s.n_theta_clse = n * *clse.theta;
    s.m_clse = *clse.m;
  }
  return s;
}

std::vector<EstimatorSample> estimator_batch(const SeriesBatchSpec& spec, std::uint64_t master_seed,
                                             std::uint64_t arm, std::size_t count, const ExecutionPolicy& policy) {
  return map_replicates<EstimatorSample>(count, policy, [&](std::size_t r) {
    RngStream rng(master_seed, arm_stream_id(arm, r));
    const ObservationSeries obs =
        simulate_observations(spec.params, spec.init, spec.n_obs, spec.steps_per_unit, rng, spec.options);
    return estimator_sample(obs, spec.params.m);
  });
}

std::vector<LimitFunctionals> limit_functional_batch(double a, double m, std::size_t steps,
                                                     std::uint64_t master_seed, std::uint64_t arm,
                                                     std::size_t count, const ExecutionPolicy& policy) {
  return map_replicates<LimitFunctionals>(count, policy, [&](std::size_t r) {
    RngStream rng(master_seed, arm_stream_id(arm, r));
    return sample_limit_functionals(a, m, steps, rng);
  });
}

std::vector<TerminalState> terminal_state_batch(const ModelParams& params, const InitialLaw& init,
                                                const TimeGrid& grid, const JointPathOptions& options,
                                                std::uint64_t master_seed, std::uint64_t arm, std::size_t count,
                                                const ExecutionPolicy& policy) {
  return map_replicates<TerminalState>(count, policy, [&](std::size_t r) {
    RngStream rng(master_seed, arm_stream_id(arm, r));
    const SamplePath path = simulate_joint_path(params, init, grid, rng, options);
    return TerminalState{path.y.back(), path.x.back()};
  });
}

}  // namespace affinelab
