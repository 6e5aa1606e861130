#include "kinlab/fiberlimit.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "kinlab/errors.hpp"
#include "kinlab/quadrature.hpp"
#include "kinlab/trig.hpp"

namespace kinlab {

namespace {

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

bool is_zero(const Vec& v) { return v.size() == 0 || v.cwiseAbs().maxCoeff() == 0.0; }

// Phi at every grid point shifted by `offset`
Vec grid_phases(const DispersionLaw& law, const MomentumGrid& grid, const Vec& offset, const Vec& chi, double lambda,
                double t) {
  Vec out(grid.size());
  Vec k(grid.dim());
  for (Index i = 0; i < grid.size(); ++i) {
    k = grid.point(i) + offset;
    out[i] = phase_integral(law, k, chi, lambda, t);
  }
  return out;
}

}  // namespace

double phase_integral(const DispersionLaw& law, const Vec& k, const Vec& chi, double lambda, double t) {
  if (t < 0.0) throw DomainError("phase integral needs t >= 0");
  if (k.size() != chi.size()) throw InvalidInput("momentum and field differ in dimension");
  const double l2 = lambda * lambda;
  if (law.kind() == DispersionKind::cosine) {
    const auto& amp = law.amplitudes();
    double phi = 0.0;
    for (int a = 0; a < k.size(); ++a) {
      // int_0^t 2(1 - cos(k - c s)) ds with x = c t
      const double x = l2 * chi[a] * t;
      phi += 2.0 * amp[a] * t * (1.0 - std::cos(k[a] - 0.5 * x) * sinc(0.5 * x));
    }
    return phi;
  }
  if (l2 == 0.0 || is_zero(chi)) return t * law.energy(k);
  if (t == 0.0) return 0.0;
  const QuadratureRule rule = composite_gauss_legendre(16, 0.0, t, 0.5);
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) acc += rule.weights[q] * law.energy(k - l2 * chi * rule.nodes[q]);
  return acc;
}

FiberOperator build_fiber_ladder(const DispersionLaw& law, const MomentumGrid& grid, const CorrelationTable& table,
                                 double lambda, const Vec& kappa, const Vec& chi, cplx z) {
  if (kappa.size() != grid.dim() || chi.size() != grid.dim()) throw InvalidInput("kappa or chi has wrong dimension");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be finite and >= 0");
  if (z.real() < 0.0) throw DomainError("fiber operators need Re z >= 0");
  if (!(table.decay().tail_bound < 1e-8))
    throw TruncationError(fmt::format("time-integral tail bound {:.3e} exceeds 1e-8", table.decay().tail_bound));

  const double l2 = lambda * lambda;
  const Vec half_p = 0.5 * l2 * kappa;
  const Vec c = l2 * chi;
  const bool drifting = !is_zero(c);
  const Index n = grid.size();
  const double w = grid.weight();

  FiberOperator op;
  op.lambda = lambda;
  op.kappa = kappa;
  op.chi = chi;
  op.z = z;
  op.tail_bound = table.decay().tail_bound;
  op.t_cut = table.decay().t_cut;
  op.limit = is_zero(half_p) && !drifting;
  op.ll = op.rr = op.lr = op.rl = CMat::Zero(n, n);

  const Mat identity = Mat::Identity(n, n);
  Mat sh_store;
  CVec em(n), ep(n), row_lr(n), row_rl(n);
  for (std::size_t q = 0; q < table.nodes().size(); ++q) {
    const double t = table.nodes()[q];
    const cplx pre = table.weights()[q] * std::exp(-z * t) / kTwoPi;
    const cplx ph = table.values()[q];
    const Vec phm = grid_phases(law, grid, -half_p, chi, lambda, t);
    const Vec php = drifting || !is_zero(half_p) ? grid_phases(law, grid, half_p, chi, lambda, t) : phm;
    for (Index i = 0; i < n; ++i) {
      em[i] = std::exp(cplx(0.0, phm[i]));   // e^{+i Phi_{k - p/2}}
      ep[i] = std::exp(cplx(0.0, -php[i]));  // e^{-i Phi_{k + p/2}}
    }
    const cplx a_ll = w * ep.sum();
    const cplx a_rr = w * em.sum();
    if (drifting) sh_store = shift_matrix(grid, c * t);
    const Mat& sh = drifting ? sh_store : identity;
    // row vectors v^T Sh of the rank-one mixed blocks
    row_lr = (w * ep.transpose() * sh).transpose();
    row_rl = (w * em.transpose() * sh).transpose();
    const cplx c_ll = -pre * std::conj(ph) * a_ll;
    const cplx c_rr = -pre * ph * a_rr;
    const cplx c_lr = pre * ph;
    const cplx c_rl = pre * std::conj(ph);
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) {
        const double s = sh(i, j);
        op.ll(i, j) += c_ll * em[i] * s;
        op.rr(i, j) += c_rr * ep[i] * s;
        op.lr(i, j) += c_lr * em[i] * row_lr[j];
        op.rl(i, j) += c_rl * ep[i] * row_rl[j];
      }
    }
  }
  const bool finite = op.ll.allFinite() && op.rr.allFinite() && op.lr.allFinite() && op.rl.allFinite();
  if (!finite) throw TruncationError("fiber blocks are not finite");
  return op;
}

FiberOperator build_fiber_ladder(const DispersionLaw& law, const MomentumGrid& grid, const SpectralDensity& sd,
                                 double lambda, const Vec& kappa, const Vec& chi, cplx z) {
  const CorrelationTable table(sd.spec());
  return build_fiber_ladder(law, grid, table, lambda, kappa, chi, z);
}

CMat free_liouvillian_fiber(const DispersionLaw& law, const MomentumGrid& grid, double lambda, const Vec& kappa,
                            const Vec& chi) {
  if (kappa.size() != grid.dim() || chi.size() != grid.dim()) throw InvalidInput("kappa or chi has wrong dimension");
  const Index n = grid.size();
  const double l2 = lambda * lambda;
  CVec diag = CVec::Zero(n);
  if (!is_zero(kappa)) {
    for (Index i = 0; i < n; ++i) {
      const Vec k = grid.point(i);
      double diff = 0.0;
      if (law.kind() == DispersionKind::cosine) {
        // eps(k + p/2) - eps(k - p/2) = sum 4a sin k sin(p/2), divided by lambda^2
        const auto& amp = law.amplitudes();
        for (int a = 0; a < grid.dim(); ++a)
          diff += 2.0 * amp[a] * std::sin(k[a]) * kappa[a] * sinc(0.5 * l2 * kappa[a]);
      } else {
        if (l2 == 0.0) throw InvalidInput("tabulated dispersion needs lambda > 0 for kappa != 0");
        diff = (law.energy(k + 0.5 * l2 * kappa) - law.energy(k - 0.5 * l2 * kappa)) / l2;
      }
      diag[i] = cplx(0.0, diff);
    }
  }
  CMat out = build_drift(grid, chi, DriftScheme::spectral).cast<cplx>();
  out.diagonal() += diag;
  return out;
}

CMat delta_m(const DispersionLaw& law, const MomentumGrid& grid, const CorrelationTable& table, double lambda,
             const Vec& chi) {
  const Vec zero = Vec::Zero(grid.dim());
  if (is_zero(chi)) return CMat::Zero(grid.size(), grid.size());
  return build_fiber_ladder(law, grid, table, lambda, zero, chi).total() -
         build_fiber_ladder(law, grid, table, lambda, zero, zero).total();
}

CMat delta_m(const DispersionLaw& law, const MomentumGrid& grid, const SpectralDensity& sd, double lambda,
             const Vec& chi) {
  const CorrelationTable table(sd.spec());
  return delta_m(law, grid, table, lambda, chi);
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("slope fit needs two or more matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw FitUnreliable("slope fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

KineticLimitTable kinetic_limit_error(const KineticModel& model, const std::vector<double>& lambdas,
                                      const Vec& kappa, const Vec& chi) {
  if (lambdas.empty()) throw InvalidInput("no lambda values");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw InvalidInput("lambda values must be positive");
    if (i > 0 && !(lambdas[i] < lambdas[i - 1])) throw InvalidInput("lambda values must be strictly decreasing");
  }
  const CorrelationTable table(model.density().spec());
  const DispersionLaw& law = model.law();
  const MomentumGrid& grid = model.grid();
  const Vec zero = Vec::Zero(grid.dim());
  const CMat m = model.generator(CVec(kappa.cast<cplx>()), chi);
  const double norm_m = norm_inf(m);

  CMat limit_free = model.drift(chi).cast<cplx>();
  limit_free.diagonal() += build_advection(law, grid, CVec(kappa.cast<cplx>()));

  KineticLimitTable out;
  std::vector<double> res, free_err;
  for (double lambda : lambdas) {
    const CMat k_chi = build_fiber_ladder(law, grid, table, lambda, kappa, chi).total();
    const CMat k_zero = is_zero(chi) ? k_chi : build_fiber_ladder(law, grid, table, lambda, kappa, zero).total();
    const CMat dm = k_chi - k_zero;
    const CMat free = free_liouvillian_fiber(law, grid, lambda, kappa, chi);
    KineticLimitRow row;
    row.lambda = lambda;
    row.residual = norm_inf(CMat(free + k_chi - (m + dm)));
    row.residual_rel = row.residual / norm_m;
    row.dist_to_m = norm_inf(dm);
    row.free_error = norm_inf(CMat(free - limit_free));
    if (!out.rows.empty() && !(row.residual < out.rows.back().residual)) out.monotone = false;
    out.rows.push_back(row);
    res.push_back(row.residual);
    free_err.push_back(row.free_error);
  }
  auto safe_slope = [&](const std::vector<double>& y) {
    for (double v : y)
      if (!(v > 0.0)) return 0.0;
    return lambdas.size() >= 2 ? log_log_slope(lambdas, y) : 0.0;
  };
  out.order = safe_slope(res);
  out.free_order = safe_slope(free_err);
  return out;
}

std::vector<Vec> smooth_probes(const MomentumGrid& grid, int count, std::uint64_t seed, int max_mode) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  const int d = grid.dim();
  int modes = 1;
  for (int a = 0; a < d; ++a) modes *= max_mode + 1;
  std::vector<Vec> out;
  for (int p = 0; p < count; ++p) {
    Vec f = Vec::Zero(grid.size());
    for (int mi = 0; mi < modes; ++mi) {
      std::vector<int> m(d);
      int rest = mi;
      for (int a = d - 1; a >= 0; --a) {
        m[a] = rest % (max_mode + 1);
        rest /= max_mode + 1;
      }
      const double g = gauss(rng), phi = phase(rng);
      for (Index i = 0; i < grid.size(); ++i) {
        const Vec k = grid.point(i);
        double arg = phi;
        for (int a = 0; a < d; ++a) arg += m[a] * k[a];
        f[i] += g * std::cos(arg);
      }
    }
    out.push_back(f);
  }
  return out;
}

DeltaMScaling delta_m_scaling(const KineticModel& model, const std::vector<double>& lambdas, const Vec& chi,
                              int probes, std::uint64_t seed) {
  if (lambdas.size() < 2) throw InvalidInput("scaling fit needs two or more lambda values");
  if (is_zero(chi)) throw InvalidInput("delta M vanishes at chi = 0");
  const CorrelationTable table(model.density().spec());
  const MomentumGrid& grid = model.grid();
  const std::vector<Vec> fs = smooth_probes(grid, probes, seed);
  std::vector<double> f_norm;
  for (const Vec& f : fs) {
    Vec drift = Vec::Zero(grid.size());
    for (int a = 0; a < grid.dim(); ++a) drift += chi[a] * spectral_derivative(grid, f, a);
    f_norm.push_back(f.cwiseAbs().maxCoeff() + drift.cwiseAbs().maxCoeff());
  }

  DeltaMScaling out;
  out.lambdas = lambdas;
  for (double lambda : lambdas) {
    const CMat dm = delta_m(model.law(), grid, table, lambda, chi);
    double worst = 0.0, mean = 0.0;
    for (std::size_t p = 0; p < fs.size(); ++p) {
      const double v = (dm * fs[p].cast<cplx>()).cwiseAbs().maxCoeff();
      worst = std::max(worst, v / (lambda * lambda * f_norm[p]));
      mean += v / fs.size();
    }
    out.bound_constant.push_back(worst);
    out.mean_norm.push_back(mean);
  }
  for (std::size_t i = 0; i + 1 < lambdas.size(); ++i) out.halving_ratio.push_back(out.mean_norm[i] / out.mean_norm[i + 1]);
  out.exponent = log_log_slope(lambdas, out.mean_norm);
  return out;
}

}  // namespace kinlab
