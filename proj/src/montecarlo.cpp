#include "kinlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <thread>

#include <fmt/format.h>

#include "kinlab/errors.hpp"

namespace kinlab {

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 applied twice: once to the master seed, once to the mixed index
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master) ^ (index * 0xd1b54a32d192ed03ULL));
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

namespace {

Index sample_cdf(const std::vector<double>& cdf, double u) {
  const double target = u * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  return std::min<Index>(it - cdf.begin(), static_cast<Index>(cdf.size()) - 1);
}

Index nearest_grid_index(const MomentumGrid& grid, const Vec& k) {
  Index idx = 0;
  for (int a = 0; a < grid.dim(); ++a) {
    const int m = static_cast<int>(std::lround((wrap_to_torus(k[a]) + kPi) / grid.spacing())) % grid.n_per_axis();
    idx += m * grid.stride(a);
  }
  return idx;
}

std::function<Index(Rng&)> gibbs_initial(const KineticModel& model) {
  auto cdf = std::make_shared<std::vector<double>>();
  double acc = 0.0;
  for (double g : model.gibbs()) cdf->push_back(acc += g);
  return [cdf](Rng& rng) { return sample_cdf(*cdf, uniform01(rng)); };
}

// Grid points grouped by energy: jump weights depend on the target only
// through eps(k_j), so sampling runs over distinct levels.
struct EnergyLevels {
  std::vector<double> energy;
  std::vector<std::vector<Index>> members;
};

EnergyLevels group_levels(const Vec& energies) {
  std::vector<Index> order(energies.size());
  for (Index i = 0; i < energies.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return energies[a] < energies[b]; });
  EnergyLevels lv;
  for (Index i : order) {
    if (lv.energy.empty() || std::abs(energies[i] - lv.energy.back()) > 1e-12 * (1.0 + std::abs(energies[i]))) {
      lv.energy.push_back(energies[i]);
      lv.members.emplace_back();
    }
    lv.members.back().push_back(i);
  }
  return lv;
}

}  // namespace

JumpProcess make_jump_process(const KineticModel& model, const Vec& chi) {
  const MomentumGrid& grid = model.grid();
  if (chi.size() != grid.dim()) throw InvalidInput("chi has wrong dimension");
  const bool drifting = chi.cwiseAbs().maxCoeff() > 0.0;
  if (drifting && model.law().kind() != DispersionKind::cosine)
    throw UnsupportedConfiguration("drifting trajectories need a dispersion law defined off the grid");

  auto interp = std::make_shared<TrigInterpolant>(grid, model.table().escape);
  const double r_max = std::max(interp->refined_max(grid.dim() == 1 ? 16 : 4), model.table().escape.maxCoeff()) *
                       (1.0 + 1e-3);
  if (!std::isfinite(r_max)) throw InvalidInput("dominating rate is not finite");

  JumpProcess p{grid, model.law(), chi, {}, r_max, {}, gibbs_initial(model)};
  if (drifting) {
    p.escape = [interp](const Vec& k) { return interp->operator()(k); };
  } else {
    auto escape = std::make_shared<Vec>(model.table().escape);
    p.escape = [escape, grid](const Vec& k) { return (*escape)[nearest_grid_index(grid, k)]; };
  }

  if (!drifting) {
    // momenta stay on the grid: one cumulative row per starting point
    auto rows = std::make_shared<std::vector<std::vector<double>>>(grid.size());
    const Mat& r = model.table().rates;
    for (Index i = 0; i < grid.size(); ++i) {
      double acc = 0.0;
      for (Index j = 0; j < grid.size(); ++j) (*rows)[i].push_back(acc += r(i, j));
    }
    p.destination = [rows, grid](const Vec& k, Rng& rng) {
      return sample_cdf((*rows)[nearest_grid_index(grid, k)], uniform01(rng));
    };
  } else {
    auto levels = std::make_shared<EnergyLevels>(group_levels(model.energies()));
    const SpectralDensity sd = model.density();
    const DispersionLaw law = model.law();
    p.destination = [levels, sd, law](const Vec& k, Rng& rng) {
      const double e = law.energy(k);
      thread_local std::vector<double> cdf;
      cdf.resize(levels->energy.size());
      double acc = 0.0;
      for (std::size_t l = 0; l < cdf.size(); ++l)
        cdf[l] = acc += static_cast<double>(levels->members[l].size()) * sd(levels->energy[l] - e);
      const Index l = sample_cdf(cdf, uniform01(rng));
      const auto& m = levels->members[l];
      const std::size_t pick = std::min(m.size() - 1, static_cast<std::size_t>(uniform01(rng) * m.size()));
      return m[pick];
    };
  }
  return p;
}

JumpProcess make_frozen_process(const KineticModel& model, const Vec& chi, double rate) {
  const Index n = model.size();
  JumpProcess p{model.grid(), model.law(), chi, [rate](const Vec&) { return rate; }, rate, {}, gibbs_initial(model)};
  p.destination = [n](const Vec&, Rng& rng) {
    return std::min<Index>(n - 1, static_cast<Index>(uniform01(rng) * n));
  };
  return p;
}

namespace {

// Adds the time spent in each grid cell while k moves from k_start with velocity chi.
void add_occupancy(const MomentumGrid& grid, const Vec& k_start, const Vec& chi, double duration,
                   std::vector<double>& hist) {
  const int d = grid.dim();
  const int n = grid.n_per_axis();
  const double h = grid.spacing();
  std::vector<int> cell(d);
  std::vector<double> pos(d), rate(d);
  for (int a = 0; a < d; ++a) {
    const double u = (wrap_to_torus(k_start[a]) + kPi) / h + 0.5;
    const double fl = std::floor(u);
    cell[a] = static_cast<int>(fl) % n;
    pos[a] = u - fl;
    rate[a] = std::abs(chi[a]) / h;
  }
  double left = duration;
  while (left > 0.0) {
    double step = left;
    int hit = -1;
    for (int a = 0; a < d; ++a) {
      if (rate[a] == 0.0) continue;
      const double exit = (chi[a] > 0.0 ? 1.0 - pos[a] : pos[a]) / rate[a];
      if (exit < step) {
        step = exit;
        hit = a;
      }
    }
    Index idx = 0;
    for (int a = 0; a < d; ++a) idx += cell[a] * grid.stride(a);
    hist[idx] += step;
    left -= step;
    for (int a = 0; a < d; ++a) {
      if (rate[a] == 0.0) continue;
      pos[a] += (chi[a] > 0.0 ? 1.0 : -1.0) * rate[a] * step;
    }
    if (hit >= 0) {
      if (chi[hit] > 0.0) {
        cell[hit] = (cell[hit] + 1) % n;
        pos[hit] = 0.0;
      } else {
        cell[hit] = (cell[hit] + n - 1) % n;
        pos[hit] = 1.0;
      }
    }
  }
}

}  // namespace

Trajectory simulate_trajectory(const JumpProcess& process, double horizon, std::uint64_t seed,
                               const TrajectoryOptions& options) {
  if (!(horizon > 0.0)) throw InvalidInput("horizon must be positive");
  const MomentumGrid& grid = process.grid;
  const int d = grid.dim();
  const Vec& chi = process.chi;
  const bool cosine = process.law.kind() == DispersionKind::cosine;
  const std::vector<double> amp = cosine ? process.law.amplitudes() : std::vector<double>(d, 0.0);

  Trajectory tr;
  tr.seed = seed;
  tr.horizon = horizon;
  Rng rng(seed);
  Vec k = grid.point(process.initial(rng));
  tr.k0 = k;
  Vec x = Vec::Zero(d);
  Vec k_window(d);
  double t = 0.0;

  // Free flight over [t, t + dt]: closed-form position for the cosine law.
  auto flight = [&](double dt) {
    if (options.histogram && options.histogram_from >= 0.0) {
      const double a = std::max(t, options.histogram_from), b = t + dt;
      if (b > a) {
        for (int c = 0; c < d; ++c) k_window[c] = k[c] + chi[c] * (a - t);
        add_occupancy(grid, k_window, chi, b - a, *options.histogram);
      }
    }
    if (!cosine) {
      x += process.law.group_velocity(k) * dt;
      return;
    }
    for (int c = 0; c < d; ++c) {
      if (chi[c] != 0.0) {
        const double k1 = k[c] + chi[c] * dt;
        x[c] += 2.0 * amp[c] / chi[c] * (std::cos(k[c]) - std::cos(k1));
        k[c] = wrap_to_torus(k1);
      } else {
        x[c] += 2.0 * amp[c] * std::sin(k[c]) * dt;
      }
    }
  };

  const double r_max = process.r_max;
  while (true) {
    const double dt = r_max > 0.0 ? -std::log1p(-uniform01(rng)) / r_max : std::numeric_limits<double>::infinity();
    if (t + dt >= horizon) {
      flight(horizon - t);
      break;
    }
    flight(dt);
    t += dt;
    ++tr.candidates;
    if (uniform01(rng) * r_max < process.escape(k)) {
      ++tr.accepted;
      k = grid.point(process.destination(k, rng));
      if (options.record) {
        tr.jump_times.push_back(t);
        tr.momenta.push_back(k);
      }
    }
  }
  tr.x_final = x;
  tr.k_final = k;
  return tr;
}

int thread_count_from_env() {
  const char* env = std::getenv("KINLAB_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

McEstimate ensemble_run(const JumpProcess& process, const McSettings& s) {
  if (s.n_traj < 100) throw InvalidInput(fmt::format("need at least 100 trajectories, got {}", s.n_traj));
  if (s.batches < 2) throw InvalidInput("need at least 2 batches");
  if (s.burn_in < 0.0 || s.burn_in >= 1.0) throw InvalidInput("burn-in fraction must lie in [0, 1)");
  const int d = process.grid.dim();
  const Index cells = process.grid.size();
  const int nb = s.batches;

  struct Acc {
    int n = 0;
    Vec sx;
    Mat sxx;
    std::vector<double> hist;
    long candidates = 0, accepted = 0;
  };
  std::vector<Acc> acc(nb);
  auto run_batch = [&](int b) {
    Acc& a = acc[b];
    a.sx = Vec::Zero(d);
    a.sxx = Mat::Zero(d, d);
    a.hist.assign(cells, 0.0);
    const long lo = static_cast<long>(s.n_traj) * b / nb, hi = static_cast<long>(s.n_traj) * (b + 1) / nb;
    TrajectoryOptions opt;
    opt.record = false;
    opt.histogram_from = s.burn_in * s.horizon;
    opt.histogram = &a.hist;
    for (long i = lo; i < hi; ++i) {
      const Trajectory tr = simulate_trajectory(process, s.horizon, stream_seed(s.seed, i), opt);
      a.sx += tr.x_final;
      a.sxx += tr.x_final * tr.x_final.transpose();
      a.candidates += tr.candidates;
      a.accepted += tr.accepted;
      ++a.n;
    }
  };
  const int threads = std::max(1, std::min(nb, s.threads > 0 ? s.threads : thread_count_from_env()));
  if (threads == 1) {
    for (int b = 0; b < nb; ++b) run_batch(b);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (int b = w; b < nb; b += threads) run_batch(b);
      });
    for (auto& th : pool) th.join();
  }

  const double tau = s.horizon;
  McEstimate est;
  est.n_traj = s.n_traj;
  Vec sx = Vec::Zero(d);
  Mat sxx = Mat::Zero(d, d);
  Vec hist = Vec::Zero(cells);
  long cand = 0, accd = 0;
  for (const Acc& a : acc) {
    sx += a.sx;
    sxx += a.sxx;
    for (Index c = 0; c < cells; ++c) hist[c] += a.hist[c];
    cand += a.candidates;
    accd += a.accepted;
    BatchEstimate be;
    be.n = a.n;
    const Vec mean = a.sx / a.n;
    be.v = mean / tau;
    be.D = (a.sxx - a.n * mean * mean.transpose()) / ((a.n - 1) * 2.0 * tau);
    est.batches.push_back(be);
  }
  const double n = s.n_traj;
  const Vec mean = sx / n;
  est.v_hat = mean / tau;
  est.D_hat = (sxx - n * mean * mean.transpose()) / ((n - 1) * 2.0 * tau);

  Vec v_var = Vec::Zero(d);
  Mat d_var = Mat::Zero(d, d);
  Vec v_mean = Vec::Zero(d);
  Mat d_mean = Mat::Zero(d, d);
  for (const auto& be : est.batches) {
    v_mean += be.v / nb;
    d_mean += be.D / nb;
  }
  for (const auto& be : est.batches) {
    v_var += (be.v - v_mean).cwiseAbs2();
    d_var += (be.D - d_mean).cwiseAbs2();
  }
  est.v_stderr = (v_var / (nb - 1.0) / nb).cwiseSqrt();
  est.D_stderr = (d_var / (nb - 1.0) / nb).cwiseSqrt();
  est.histogram = hist / hist.sum();
  est.acceptance = cand > 0 ? static_cast<double>(accd) / cand : 0.0;
  est.mean_jumps = static_cast<double>(accd) / n;
  return est;
}

Vec momentum_histogram(const McEstimate& estimate) { return estimate.histogram; }

double total_variation(const Vec& p, const Vec& q) {
  if (p.size() != q.size()) throw InvalidInput("distributions differ in length");
  return 0.5 * (p - q).cwiseAbs().sum();
}

KsResult ks_test_exponential(std::vector<double> samples, double rate) {
  if (samples.empty()) throw InvalidInput("no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = -std::expm1(-rate * samples[i]);
    dmax = std::max({dmax, (i + 1) / n - f, f - i / n});
  }
  // asymptotic Kolmogorov distribution with the usual small-sample correction
  const double sn = std::sqrt(n);
  const double lam = (sn + 0.12 + 0.11 / sn) * dmax;
  double q = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lam * lam);
    q += term;
    if (std::abs(term) < 1e-12) break;
  }
  return {dmax, std::clamp(q, 0.0, 1.0)};
}

}  // namespace kinlab
