#pragma once

// Piecewise-deterministic jump process: momentum drifts as k + chi t,
// position integrates grad eps, jumps land on grid points with kernel
// w r(k, .) / R(k). Event times come from thinning a constant rate R_max.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "kinlab/generator.hpp"
#include "kinlab/trig.hpp"

namespace kinlab {

using Rng = std::mt19937_64;

/// Independent stream for trajectory `index` under `master` seed.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index);

/// Uniform in [0, 1) from the top 53 bits.
double uniform01(Rng& rng);

/// Ingredients of the jump process. The escape rate is an arbitrary
/// callable so that toy processes (e.g. frozen rates) share the simulator.
struct JumpProcess {
  MomentumGrid grid;
  DispersionLaw law;
  Vec chi;
  std::function<double(const Vec&)> escape;          // R(k) for off-grid k
  double r_max = 0.0;                                // dominating rate
  std::function<Index(const Vec&, Rng&)> destination;  // jump target given the pre-jump momentum
  std::function<Index(Rng&)> initial;                  // starting grid point
};

/// Process matching the discretized generator of `model` at field chi.
JumpProcess make_jump_process(const KineticModel& model, const Vec& chi);

/// Constant escape rate, uniform destinations, grid-Gibbs start; for tests
/// of the thinning step.
JumpProcess make_frozen_process(const KineticModel& model, const Vec& chi, double rate);

struct Trajectory {
  std::uint64_t seed = 0;
  double horizon = 0.0;
  Vec k0;
  std::vector<double> jump_times;
  std::vector<Vec> momenta;  // after each jump
  Vec x_final;
  Vec k_final;
  long candidates = 0;
  long accepted = 0;
};

struct TrajectoryOptions {
  bool record = true;         // keep jump times and momenta
  double histogram_from = -1.0;  // accumulate cell occupancy after this time (< 0: off)
  std::vector<double>* histogram = nullptr;
};

Trajectory simulate_trajectory(const JumpProcess& process, double horizon, std::uint64_t seed,
                               const TrajectoryOptions& options = {});

struct McSettings {
  int n_traj = 20000;
  double horizon = 200.0;
  std::uint64_t seed = 1;
  double burn_in = 0.2;  // fraction of the horizon skipped by the histogram
  int batches = 16;
  int threads = 0;  // 0: from KINLAB_THREADS, else 1
};

struct BatchEstimate {
  int n = 0;
  Vec v;
  Mat D;
};

struct McEstimate {
  int n_traj = 0;
  Vec v_hat, v_stderr;
  Mat D_hat, D_stderr;
  Vec histogram;  // probability per grid cell, sums to 1
  double acceptance = 0.0;
  double mean_jumps = 0.0;
  std::vector<BatchEstimate> batches;
  std::string fingerprint;
};

McEstimate ensemble_run(const JumpProcess& process, const McSettings& settings);

/// Time-weighted occupancy of the ensemble, normalized (as stored in the estimate).
Vec momentum_histogram(const McEstimate& estimate);

/// sum_i |p_i - q_i| / 2 between two probability vectors.
double total_variation(const Vec& p, const Vec& q);

/// Kolmogorov-Smirnov test of samples against Exp(rate): statistic and p-value.
struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};
KsResult ks_test_exponential(std::vector<double> samples, double rate);

/// Worker count from the KINLAB_THREADS environment variable (default 1).
int thread_count_from_env();

}  // namespace kinlab
