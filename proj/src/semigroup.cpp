#include "kinlab/semigroup.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "kinlab/errors.hpp"
#include "kinlab/quadrature.hpp"

namespace kinlab {

FreeLossSemigroup::FreeLossSemigroup(const KineticModel& model, const Vec& chi)
    : grid_(model.grid()),
      chi_(chi),
      loss_(model.loss()),
      loss_interp_(model.grid(), model.loss()),
      drifting_(chi.size() > 0 && chi.cwiseAbs().maxCoeff() > 0.0) {
  if (chi.size() != grid_.dim()) throw InvalidInput("chi has wrong dimension");
}

Vec FreeLossSemigroup::decay_factor(double t) const {
  if (t < 0.0) throw DomainError(fmt::format("negative time {}", t));
  if (!drifting_) return (loss_ * t).array().exp().matrix();
  return loss_interp_.line_integral(chi_, t).array().exp().matrix();
}

FreeLossSemigroup::Frozen FreeLossSemigroup::freeze(double t) const {
  Frozen s{decay_factor(t), {}};
  if (drifting_) {
    for (int a = 0; a < grid_.dim(); ++a)
      s.shifts.push_back(chi_[a] == 0.0 ? Mat() : shift_matrix_1d(grid_.n_per_axis(), chi_[a] * t));
  }
  return s;
}

Vec FreeLossSemigroup::apply(const Frozen& s, const Vec& f) const {
  Vec out = f;
  for (int a = 0; a < static_cast<int>(s.shifts.size()); ++a)
    if (s.shifts[a].size() > 0) out = apply_along_axis(grid_, out, a, s.shifts[a]);
  return out.cwiseProduct(s.decay);
}

Vec FreeLossSemigroup::apply(double t, const Vec& f) const {
  if (f.size() != grid_.size()) throw InvalidInput("grid function has wrong length");
  return apply(freeze(t), f);
}

Vec free_loss_apply(const KineticModel& model, const Vec& chi, double t, const Vec& f) {
  return FreeLossSemigroup(model, chi).apply(t, f);
}

namespace {

// Lagrange basis on `nodes` evaluated at x.
std::vector<double> lagrange_row(const std::vector<double>& nodes, double x) {
  std::vector<double> row(nodes.size(), 1.0);
  for (std::size_t l = 0; l < nodes.size(); ++l)
    for (std::size_t m = 0; m < nodes.size(); ++m)
      if (m != l) row[l] *= (x - nodes[m]) / (nodes[l] - nodes[m]);
  return row;
}

}  // namespace

DysonResult dyson_evolve(const KineticModel& model, const Vec& chi, double t, const Vec& f,
                         const DysonOptions& options) {
  if (t < 0.0) throw DomainError(fmt::format("negative time {}", t));
  if (f.size() != model.size()) throw InvalidInput("grid function has wrong length");
  const FreeLossSemigroup s(model, chi);
  DysonResult result;
  result.state = s.apply(t, f);
  if (t == 0.0 || options.order_cap == 0) {
    result.converged = options.order_cap == 0 ? false : true;
    return result;
  }

  // Panel layout: P panels of length len, q Gauss nodes each at offsets o_j.
  const int q = options.nodes_per_panel;
  const int P = std::max(1, static_cast<int>(std::ceil(t / options.max_panel)));
  const double len = t / P;
  const QuadratureRule local = gauss_legendre(q, 0.0, len);
  const QuadratureRule unit = gauss_legendre(q, 0.0, 1.0);
  const std::vector<double>& o = local.nodes;
  const std::vector<double>& om = local.weights;
  const int K = P * q;
  auto node_time = [&](int p, int j) { return p * len + o[j]; };

  // Frozen propagators, keyed structurally so equal lags share one entry.
  std::vector<FreeLossSemigroup::Frozen> full((P) * q * q);       // lag dp*len + o_j - o_m, dp >= 1
  std::vector<bool> full_ready(full.size(), false);
  std::vector<FreeLossSemigroup::Frozen> partial(q * q);          // lag o_j (1 - eta_m)
  std::vector<FreeLossSemigroup::Frozen> to_end(P * q);           // lag t - s_{p,m}
  for (int j = 0; j < q; ++j)
    for (int m = 0; m < q; ++m) partial[j * q + m] = s.freeze(o[j] * (1.0 - unit.nodes[m]));
  for (int p = 0; p < P; ++p)
    for (int m = 0; m < q; ++m) to_end[p * q + m] = s.freeze((P - 1 - p) * len + (len - o[m]));
  auto full_at = [&](int dp, int j, int m) -> const FreeLossSemigroup::Frozen& {
    const std::size_t key = (static_cast<std::size_t>(dp) * q + j) * q + m;
    if (!full_ready[key]) {
      full[key] = s.freeze(dp * len + o[j] - o[m]);
      full_ready[key] = true;
    }
    return full[key];
  };

  // Interpolation from panel nodes to the partial-panel rule of node j.
  std::vector<Mat> interp(q, Mat(q, q));
  for (int j = 0; j < q; ++j)
    for (int m = 0; m < q; ++m) {
      const auto row = lagrange_row(o, o[j] * unit.nodes[m]);
      for (int l = 0; l < q; ++l) interp[j](m, l) = row[l];
    }

  std::vector<Vec> h(K);
  for (int p = 0; p < P; ++p)
    for (int j = 0; j < q; ++j) h[p * q + j] = s.apply(node_time(p, j), f);

  const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
  const Mat& gain = model.gain();
  for (int order = 1; order <= options.order_cap; ++order) {
    std::vector<Vec> g(K);
    for (int i = 0; i < K; ++i) g[i] = gain * h[i];

    std::vector<Vec> next(K, Vec::Zero(model.size()));
    double node_max = 0.0;
    for (int p = 0; p < P; ++p) {
      for (int j = 0; j < q; ++j) {
        Vec acc = Vec::Zero(model.size());
        for (int pp = 0; pp < p; ++pp)
          for (int m = 0; m < q; ++m) acc += om[m] * s.apply(full_at(p - pp, j, m), g[pp * q + m]);
        for (int m = 0; m < q; ++m) {
          Vec gu = Vec::Zero(model.size());
          for (int l = 0; l < q; ++l) gu += interp[j](m, l) * g[p * q + l];
          acc += o[j] * unit.weights[m] * s.apply(partial[j * q + m], gu);
        }
        node_max = std::max(node_max, acc.cwiseAbs().maxCoeff());
        next[p * q + j] = std::move(acc);
      }
    }
    Vec term = Vec::Zero(model.size());
    for (int p = 0; p < P; ++p)
      for (int m = 0; m < q; ++m) term += om[m] * s.apply(to_end[p * q + m], g[p * q + m]);

    result.state += term;
    result.orders = order;
    result.last_term = term.cwiseAbs().maxCoeff();
    h = std::move(next);
    if (std::max(node_max, result.last_term) < options.term_tol * scale) {
      result.converged = true;
      return result;
    }
  }
  throw TruncationError(fmt::format("Dyson series not converged at order {}: last term {:.3e}", options.order_cap,
                                    result.last_term));
}

namespace {

template <class M, class V>
V rk4_impl(const M& m, double t, const V& f, double h) {
  if (t < 0.0) throw DomainError(fmt::format("negative time {}", t));
  if (t == 0.0) return f;
  if (h <= 0.0) h = 0.05 / std::max(norm_inf(m), 1e-300);
  const long steps = std::max(1L, static_cast<long>(std::ceil(t / h)));
  const double dt = t / steps;
  V y = f;
  for (long s = 0; s < steps; ++s) {
    const V k1 = m * y;
    const V k2 = m * (y + 0.5 * dt * k1);
    const V k3 = m * (y + 0.5 * dt * k2);
    const V k4 = m * (y + dt * k3);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

}  // namespace

CVec rk4_evolve(const CMat& m, double t, const CVec& f, double h) { return rk4_impl(m, t, f, h); }
Vec rk4_evolve(const Mat& m, double t, const Vec& f, double h) { return rk4_impl(m, t, f, h); }

EigenEvolver::EigenEvolver(const CMat& m) : m_(m) {
  Eigen::ComplexEigenSolver<CMat> es(m);
  if (es.info() != Eigen::Success) throw SolverError("eigendecomposition failed");
  lambda_ = es.eigenvalues();
  v_ = es.eigenvectors();
  const Vec sv = Eigen::JacobiSVD<CMat>(v_).singularValues();
  cond_ = sv[0] / sv[sv.size() - 1];
  fallback_ = !(cond_ <= 1e12);
  if (!fallback_) vinv_ = v_.partialPivLu().inverse();
}

CVec EigenEvolver::apply(double t, const CVec& f) const {
  if (t < 0.0) throw DomainError(fmt::format("negative time {}", t));
  if (fallback_) return rk4_evolve(m_, t, f);
  const CVec c = vinv_ * f;
  return v_ * (c.array() * (t * lambda_.array()).exp()).matrix();
}

Vec EigenEvolver::apply_real(double t, const Vec& f) const { return apply(t, f.cast<cplx>()).real(); }

EvolveOutcome eig_evolve(const GeneratorMatrix& m, double t, const CVec& f) {
  const EigenEvolver ev(m.matrix);
  return {ev.apply(t, f), ev.fallback()};
}

EvolutionResult evolve(const KineticModel& model, const Vec& chi, const Vec& f, const std::vector<double>& times,
                       const std::string& method, const Vec* reference) {
  EvolutionResult r;
  r.method = method;
  const Mat m = model.generator(chi);
  std::unique_ptr<EigenEvolver> ev;
  if (method == "eig") {
    ev = std::make_unique<EigenEvolver>(m);
    r.fallback = ev->fallback();
  } else if (method != "rk4" && method != "dyson") {
    throw InvalidInput(fmt::format("unknown evolution method '{}'", method));
  }
  for (double t : times) {
    Vec ft;
    if (method == "eig") ft = ev->apply_real(t, f);
    else if (method == "rk4") ft = rk4_evolve(m, t, f);
    else ft = dyson_evolve(model, chi, t, f).state;
    r.times.push_back(t);
    r.mass.push_back(model.weight() * ft.sum());
    if (reference) r.distance.push_back((ft - *reference).cwiseAbs().maxCoeff());
    r.states.push_back(std::move(ft));
  }
  return r;
}

RelaxationFit relaxation_rate(const Mat& m, const Vec& zeta, const Vec& f) {
  const EigenEvolver ev(m);
  const CVec& lam = ev.eigenvalues();
  Index null_idx = 0;
  lam.cwiseAbs().minCoeff(&null_idx);
  double gap = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < lam.size(); ++i)
    if (i != null_idx) gap = std::min(gap, -lam[i].real());
  if (!(gap > 0.0)) throw FitUnreliable("generator has no spectral gap");

  const double scale = f.cwiseAbs().maxCoeff();
  if ((f - zeta).cwiseAbs().maxCoeff() < 1e-9 * std::max(scale, 1e-300))
    throw FitUnreliable("probe already equals the stationary state; fit declined");

  RelaxationFit fit;
  fit.gap = gap;
  fit.t1 = 2.0 / gap;
  fit.t2 = fit.t1 + 6.0 / gap;
  const int samples = 25;
  std::vector<double> ts, ys;
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double t = fit.t1 + (fit.t2 - fit.t1) * i / (samples - 1);
    const double d = (ev.apply_real(t, f) - zeta).cwiseAbs().maxCoeff();
    if (d < 1e-12 * scale) break;  // rounding floor reached
    if (d > prev * 1.1) throw FitUnreliable(fmt::format("distance to the stationary state grows at t = {}", t));
    prev = d;
    ts.push_back(t);
    ys.push_back(std::log(d));
  }
  if (ts.size() < 3) throw FitUnreliable("too few points above the rounding floor");
  const double n = static_cast<double>(ts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sx += ts[i];
    sy += ys[i];
    sxx += ts[i] * ts[i];
    sxy += ts[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) ss += std::pow(ys[i] - icpt - slope * ts[i], 2);
  fit.rate = -slope;
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace kinlab
