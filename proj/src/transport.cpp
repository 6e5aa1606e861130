#include "kinlab/transport.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "kinlab/errors.hpp"
#include "kinlab/semigroup.hpp"

namespace kinlab {

Index nearest_to_zero(const CVec& eigenvalues) {
  Index idx = 0;
  eigenvalues.cwiseAbs().minCoeff(&idx);
  return idx;
}

namespace {

CVec real_eigenvalues(const Mat& m) {
  Eigen::EigenSolver<Mat> es(m, false);
  if (es.info() != Eigen::Success) throw SolverError("eigenvalue computation failed");
  return es.eigenvalues();
}

double gap_of(const CVec& lam, double scale) {
  const Index z = nearest_to_zero(lam);
  double gap = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < lam.size(); ++i) {
    if (i == z) continue;
    gap = std::min(gap, -lam[i].real());
    second = std::min(second, std::abs(lam[i]));
  }
  if (second < 1e-10 * std::max(scale, 1.0))
    throw DegenerateSteadyState(fmt::format("second eigenvalue {:.3e} is indistinguishable from 0", second));
  return gap;
}

}  // namespace

StationaryState stationary_state(const KineticModel& model, const Vec& chi, const StationaryOptions& options) {
  const Mat m = model.generator(chi);
  const double w = model.weight();
  const Index n = model.size();
  const Vec seed = model.gibbs();

  // Bordered system (M + e <1, .>) zeta = e, e the Gibbs seed; its solution
  // satisfies M zeta = 0 and <1, zeta> = 1 whenever 0 is simple.
  const Mat a = m + seed * Vec::Constant(n, w).transpose();
  const Eigen::PartialPivLU<Mat> lu(a);
  Vec zeta = lu.solve(seed);
  zeta += lu.solve(seed - a * zeta);
  zeta /= w * zeta.sum();

  StationaryState s;
  s.chi = chi;
  s.weight = w;
  s.residual = (m * zeta).cwiseAbs().maxCoeff();
  if (!zeta.allFinite()) throw DegenerateSteadyState("stationary solve produced non-finite values");
  if (zeta.minCoeff() < -1e-12) throw PositivityError(fmt::format("stationary state has entry {:.3e}", zeta.minCoeff()));
  s.zeta = std::move(zeta);
  if (options.compute_gap) s.gap = gap_of(real_eigenvalues(m), norm_inf(m));
  return s;
}

namespace {

SpectrumReport spectrum_from(const CVec& lam, double scale) {
  SpectrumReport r;
  r.eigenvalues = lam;
  const Index z = nearest_to_zero(lam);
  r.max_re_nonzero = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < lam.size(); ++i) {
    if (lam[i].real() > 1e-8 * std::max(scale, 1.0))
      throw GeneratorSignError(fmt::format("eigenvalue {} + {}i has positive real part", lam[i].real(), lam[i].imag()));
    if (i != z) r.max_re_nonzero = std::max(r.max_re_nonzero, lam[i].real());
  }
  r.gap = -r.max_re_nonzero;
  for (Index i = 0; i < lam.size(); ++i)
    if (lam[i].real() >= -r.gap / 2.0) ++r.count_right_of_half_gap;
  return r;
}

}  // namespace

SpectrumReport full_spectrum(const CMat& m) {
  Eigen::ComplexEigenSolver<CMat> es(m, false);
  if (es.info() != Eigen::Success) throw SolverError("eigenvalue computation failed");
  return spectrum_from(es.eigenvalues(), norm_inf(m));
}

SpectrumReport full_spectrum(const Mat& m) { return spectrum_from(real_eigenvalues(m), norm_inf(m)); }

SymmetrizedGenerator symmetrize(const KineticModel& model, const Vec& chi) {
  const Vec half = 0.5 * model.beta() * model.energies();
  const Vec e = half.array().exp().matrix();
  const Vec einv = (-half.array()).exp().matrix();
  SymmetrizedGenerator s;
  s.matrix = e.asDiagonal() * model.generator(chi) * einv.asDiagonal();
  s.gain = e.asDiagonal() * model.gain() * einv.asDiagonal();
  s.loss = model.loss();
  s.field = 0.5 * model.beta() * (model.velocities() * chi);
  s.drift = model.drift(chi);
  return s;
}

BranchTracker::BranchTracker(const KineticModel& model, const Vec& chi)
    : model_(model), chi_(chi), m0_(model.generator(chi)), state_(stationary_state(model, chi)) {}

cplx BranchTracker::operator()(const CVec& kappa) const {
  const Index n = model_.size();
  CMat m = m0_.cast<cplx>();
  m.diagonal() += cplx(0.0, 1.0) * (model_.velocities().cast<cplx>() * kappa);

  Eigen::ComplexEigenSolver<CMat> es(m, false);
  if (es.info() != Eigen::Success) throw SolverError("eigenvalue computation failed");
  const double radius = state_.gap / 2.0;
  std::vector<cplx> inside;
  for (Index i = 0; i < n; ++i)
    if (std::abs(es.eigenvalues()[i]) < radius) inside.push_back(es.eigenvalues()[i]);
  if (inside.size() != 1)
    throw BranchAmbiguity(fmt::format("{} eigenvalues within gap/2 of zero", inside.size()), inside);

  // Two-sided inverse iteration, then the Rayleigh quotient l^H M r / l^H r.
  const cplx mu = inside[0];
  const CMat shifted = m - (mu + cplx(1e-12 * std::max(1.0, norm_inf(m)), 0.0)) * CMat::Identity(n, n);
  const Eigen::PartialPivLU<CMat> lu(shifted);
  const Eigen::PartialPivLU<CMat> lu_adj(shifted.adjoint());
  CVec r = state_.zeta.cast<cplx>();
  CVec l = CVec::Ones(n);
  for (int it = 0; it < 3; ++it) {
    r = lu.solve(r);
    r /= r.norm();
    l = lu_adj.solve(l);
    l /= l.norm();
  }
  return l.dot(m * r) / l.dot(r);
}

cplx eigenvalue_branch(const KineticModel& model, const Vec& chi, const CVec& kappa) {
  return BranchTracker(model, chi)(kappa);
}

Vec velocity(const StationaryState& state, const KineticModel& model) {
  return model.weight() * (model.velocities().transpose() * state.zeta);
}

VelocityCheck velocity_crosscheck(const BranchTracker& branch, double h) {
  const int d = branch.model().dim();
  VelocityCheck c;
  c.v_state = velocity(branch.state(), branch.model());
  c.v_branch = Vec(d);
  for (int a = 0; a < d; ++a) {
    auto first = [&](double step) {
      const Vec e = Vec::Unit(d, a) * step;
      return (branch.at(e) - branch.at(-e)) / (2.0 * step);
    };
    const cplx du = (4.0 * first(h / 2.0) - first(h)) / 3.0;
    c.v_branch[a] = (cplx(0.0, -1.0) * du).real();
  }
  c.max_abs_diff = (c.v_state - c.v_branch).cwiseAbs().maxCoeff();
  if (c.max_abs_diff > 1e-4)
    throw InconsistencyError(fmt::format("velocity routes disagree by {:.3e}", c.max_abs_diff));
  return c;
}

Mat diffusion_rs(const StationaryState& state, const KineticModel& model) {
  const int d = model.dim();
  const Index n = model.size();
  const double w = model.weight();
  const Mat m = model.generator(state.chi);
  const Vec v = velocity(state, model);

  // A = M - zeta <1, .> is invertible and forces <1, y> = 0, so A y = b is
  // M y = P(b) on the complement of the null direction.
  const Mat a = m - state.zeta * Vec::Constant(n, w).transpose();
  const Eigen::PartialPivLU<Mat> lu(a);
  Mat y(n, d);
  for (int j = 0; j < d; ++j) {
    const Vec b = (model.velocities().col(j).array() - v[j]).matrix().cwiseProduct(state.zeta);
    Vec yj = lu.solve(b);
    yj += lu.solve(b - a * yj);
    const double res = (a * yj - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
    if (res > 1e-9) throw SolverError(fmt::format("reduced-resolvent solve residual {:.3e}", res));
    y.col(j) = yj;
  }
  Mat dmat(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      dmat(i, j) = -0.5 * w *
                   (model.velocities().col(i).dot(y.col(j)) + model.velocities().col(j).dot(y.col(i)));
  return dmat;
}

FdDiffusion diffusion_fd(const BranchTracker& branch, double h) {
  const int d = branch.model().dim();
  const cplx u0 = branch.at(Vec::Zero(d));
  auto hessian = [&](double s) {
    CMat hm(d, d);
    for (int i = 0; i < d; ++i) {
      const Vec ei = Vec::Unit(d, i) * s;
      hm(i, i) = (branch.at(ei) - 2.0 * u0 + branch.at(-ei)) / (s * s);
      for (int j = 0; j < i; ++j) {
        const Vec ej = Vec::Unit(d, j) * s;
        hm(i, j) = (branch.at(ei + ej) - branch.at(ei - ej) - branch.at(-ei + ej) + branch.at(-ei - ej)) /
                   (4.0 * s * s);
        hm(j, i) = hm(i, j);
      }
    }
    return hm;
  };
  const CMat coarse = hessian(h);
  const CMat fine = hessian(h / 2.0);
  const CMat rich = (4.0 * fine - coarse) / 3.0;
  FdDiffusion r;
  r.D = -0.5 * rich.real();
  r.D = 0.5 * (r.D + r.D.transpose()).eval();
  r.D_coarse = -0.5 * coarse.real();
  r.max_imag = 0.5 * rich.imag().cwiseAbs().maxCoeff();
  return r;
}

GreenKubo green_kubo(const KineticModel& model) {
  const int d = model.dim();
  const Index n = model.size();
  const double w = model.weight();
  const Vec chi0 = Vec::Zero(d);
  const StationaryState st = stationary_state(model, chi0);
  const Vec v = velocity(st, model);
  const Mat& vel = model.velocities();

  GreenKubo gk;
  gk.gap = st.gap;
  Mat b(n, d);
  for (int j = 0; j < d; ++j) b.col(j) = (vel.col(j).array() - v[j]).matrix().cwiseProduct(st.zeta);
  gk.C0 = w * vel.transpose() * b;

  // Closed form: M = E^{-1} Ms E with Ms symmetric, so
  // int_0^inf C(t) dt = w sum_{mu != 0} a_mu b_mu / (-mu).
  const Vec half = 0.5 * model.beta() * model.energies();
  const Vec e = half.array().exp().matrix();
  const Vec einv = (-half.array()).exp().matrix();
  const Mat m = model.generator(chi0);
  Mat ms = e.asDiagonal() * m * einv.asDiagonal();
  ms = (0.5 * (ms + ms.transpose())).eval();
  const Eigen::SelfAdjointEigenSolver<Mat> es(ms);
  if (es.info() != Eigen::Success) throw SolverError("symmetric eigendecomposition failed");
  const Mat& q = es.eigenvectors();
  const Vec& lam = es.eigenvalues();
  const Mat a = q.transpose() * (einv.asDiagonal() * vel);
  const Mat bq = q.transpose() * (e.asDiagonal() * b);
  const double tiny = 1e-9 * norm_inf(m);
  gk.D = Mat::Zero(d, d);
  for (Index k = 0; k < n; ++k) {
    if (std::abs(lam[k]) < tiny) continue;
    gk.D += w * a.row(k).transpose() * bq.row(k) / (-lam[k]);
  }
  gk.D = (0.5 * (gk.D + gk.D.transpose())).eval();

  // Independent route: propagate b with RK4, Simpson in time, exponential tail.
  gk.horizon = 10.0 / st.gap;
  const double h_target = 0.05 / norm_inf(m);
  long steps = static_cast<long>(std::ceil(gk.horizon / h_target));
  if (steps % 2) ++steps;
  const double dt = gk.horizon / steps;
  Mat g = b;
  Mat integral = Mat::Zero(d, d);
  std::vector<double> trace(steps + 1);
  Mat c = w * vel.transpose() * g;
  trace[0] = c.trace();
  integral += c;
  for (long s = 1; s <= steps; ++s) {
    const Mat k1 = m * g;
    const Mat k2 = m * (g + 0.5 * dt * k1);
    const Mat k3 = m * (g + 0.5 * dt * k2);
    const Mat k4 = m * (g + dt * k3);
    g += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    c = w * vel.transpose() * g;
    trace[s] = c.trace();
    integral += (s == steps ? 1.0 : (s % 2 ? 4.0 : 2.0)) * c;
  }
  integral *= dt / 3.0;

  // decay rate of tr C on [1/gap, horizon] while above the rounding floor
  double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
  for (long s = 0; s <= steps; ++s) {
    const double t = s * dt;
    if (t < 1.0 / st.gap) continue;
    if (!(trace[s] > 1e-10 * trace[0])) break;
    const double y = std::log(trace[s]);
    sx += t, sy += y, sxx += t * t, sxy += t * y, cnt += 1;
  }
  gk.decay_rate = cnt > 2 ? -(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : std::numeric_limits<double>::quiet_NaN();
  if (gk.decay_rate > 0.0) integral += c / gk.decay_rate;
  gk.D_quadrature = (0.5 * (integral + integral.transpose())).eval();
  return gk;
}

EinsteinReport einstein_check(const KineticModel& model, double delta_chi) {
  const int d = model.dim();
  EinsteinReport r;
  r.mobility = Mat(d, d);
  const StationaryOptions no_gap{false};
  for (int i = 0; i < d; ++i) {
    const Vec e = Vec::Unit(d, i) * delta_chi;
    const Vec vp = velocity(stationary_state(model, e, no_gap), model);
    const Vec vm = velocity(stationary_state(model, Vec(-e), no_gap), model);
    r.mobility.row(i) = ((vp - vm) / (2.0 * delta_chi)).transpose();
  }
  const StationaryState s0 = stationary_state(model, Vec::Zero(d), no_gap);
  r.beta_D = model.beta() * diffusion_rs(s0, model);
  r.rel_err = (r.mobility - r.beta_D).norm() / r.beta_D.norm();
  r.pass = r.rel_err < 1e-4;
  return r;
}

LargeFieldScan large_field_scan(const KineticModel& model, const std::vector<double>& chis) {
  if (model.dim() != 1) throw UnsupportedConfiguration("large-field scan is implemented for d_lat = 1");
  const Index n = model.size();
  Vec alternating(n);
  for (Index i = 0; i < n; ++i) alternating[i] = (i % 2 == 0) ? 1.0 : -1.0;
  alternating /= std::sqrt(static_cast<double>(n));

  LargeFieldScan scan;
  for (double c : chis) {
    LargeFieldRow row;
    row.chi = c;
    try {
      const Vec chi = Vec::Constant(1, c);
      const StationaryState st = stationary_state(model, chi, {false});
      row.v = velocity(st, model)[0];
      row.D = diffusion_rs(st, model)(0, 0);

      // The Nyquist mode is invisible to the spectral derivative and keeps
      // a real eigenvalue; it is excluded from the band check.
      Eigen::EigenSolver<Mat> es(model.generator(chi), true);
      const CVec& lam = es.eigenvalues();
      const Index z = nearest_to_zero(lam);
      double min_im = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < n; ++i) {
        if (i == z) continue;
        const CVec vec = es.eigenvectors().col(i);
        if (std::abs(alternating.cast<cplx>().dot(vec)) / vec.norm() > 0.5) continue;
        min_im = std::min(min_im, std::abs(lam[i].imag()));
      }
      row.band_ratio = min_im / std::abs(c);
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
    scan.rows.push_back(row);
  }
  const std::size_t k = scan.rows.size();
  if (k >= 2 && scan.rows[k - 1].ok && scan.rows[k - 2].ok) {
    const auto& a = scan.rows[k - 2];
    const auto& b = scan.rows[k - 1];
    scan.last_ratio = b.v / a.v;
    scan.last_variation = std::abs(b.chi * b.v - a.chi * a.v) / std::abs(a.chi * a.v);
  }
  return scan;
}

}  // namespace kinlab
