#include "kinlab/lattice.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "kinlab/errors.hpp"

namespace kinlab {

double wrap_to_torus(double x) {
  double y = std::fmod(x + kPi, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  y -= kPi;
  // fmod can land exactly on +pi after the shift back
  if (y >= kPi) y -= kTwoPi;
  return y;
}

MomentumGrid::MomentumGrid(int dim, int n_per_axis) : dim_(dim), n_(n_per_axis) {
  if (dim < 1) throw InvalidInput(fmt::format("grid dimension must be positive, got {}", dim));
  if (n_per_axis < 2 || n_per_axis % 2 != 0)
    throw InvalidInput(fmt::format("n_per_axis must be even and >= 2, got {}", n_per_axis));
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= n_per_axis;
  weight_ = std::pow(kTwoPi / n_per_axis, dim);
  strides_.assign(dim, 1);
  for (int a = dim - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * n_per_axis;
}

Vec MomentumGrid::point(Index i) const {
  Vec k(dim_);
  for (int a = 0; a < dim_; ++a) k[a] = coordinate(axis_index(i, a));
  return k;
}

Index MomentumGrid::negated(Index i) const {
  Index j = 0;
  for (int a = 0; a < dim_; ++a) {
    // -(-pi + h m) = -pi + h (n - m) mod n
    const int m = axis_index(i, a);
    j += static_cast<Index>((n_ - m) % n_) * strides_[a];
  }
  return j;
}

Index MomentumGrid::index_of(const std::vector<int>& multi) const {
  Index j = 0;
  for (int a = 0; a < dim_; ++a) {
    int m = multi[a] % n_;
    if (m < 0) m += n_;
    j += static_cast<Index>(m) * strides_[a];
  }
  return j;
}

DispersionLaw DispersionLaw::cosine(int dim, std::vector<double> amplitudes) {
  if (dim < 1) throw InvalidInput("dispersion dimension must be positive");
  if (amplitudes.empty()) amplitudes.assign(dim, 1.0);
  if (static_cast<int>(amplitudes.size()) != dim)
    throw InvalidInput(fmt::format("expected {} amplitudes, got {}", dim, amplitudes.size()));
  for (double a : amplitudes)
    if (!std::isfinite(a) || a < 0.0) throw InvalidInput("amplitudes must be finite and nonnegative");
  DispersionLaw law;
  law.kind_ = DispersionKind::cosine;
  law.dim_ = dim;
  law.amplitudes_ = std::move(amplitudes);
  return law;
}

DispersionLaw DispersionLaw::tabulated(const MomentumGrid& grid, Vec values, Differencing scheme) {
  if (values.size() != grid.size()) throw InvalidInput("tabulated dispersion has wrong length");
  if (!values.allFinite()) throw InvalidInput("tabulated dispersion has non-finite entries");
  for (Index i = 0; i < grid.size(); ++i) {
    if (std::abs(values[i] - values[grid.negated(i)]) > 1e-12 * (1.0 + std::abs(values[i])))
      throw InvalidInput("tabulated dispersion violates eps(k) = eps(-k)");
  }
  DispersionLaw law;
  law.kind_ = DispersionKind::tabulated;
  law.dim_ = grid.dim();
  law.table_n_ = grid.n_per_axis();
  law.table_gradient_.resize(grid.size(), grid.dim());
  for (int a = 0; a < grid.dim(); ++a)
    law.table_gradient_.col(a) = derivative_matrix(grid, a, scheme) * values;
  law.table_values_ = std::move(values);
  return law;
}

std::optional<Index> DispersionLaw::table_index(const Vec& k) const {
  const MomentumGrid grid(dim_, table_n_);
  std::vector<int> multi(dim_);
  for (int a = 0; a < dim_; ++a) {
    const double s = (wrap_to_torus(k[a]) + kPi) / grid.spacing();
    const double r = std::round(s);
    if (std::abs(s - r) > 1e-9) return std::nullopt;
    multi[a] = static_cast<int>(r);
  }
  return grid.index_of(multi);
}

double DispersionLaw::energy(const Vec& k) const {
  if (k.size() != dim_) throw InvalidInput("momentum has wrong dimension");
  if (kind_ == DispersionKind::cosine) {
    double e = 0.0;
    for (int j = 0; j < dim_; ++j) e += amplitudes_[j] * 2.0 * (1.0 - std::cos(k[j]));
    return e;
  }
  const auto idx = table_index(k);
  if (!idx) throw InterpolationNotSupported("tabulated dispersion queried off its grid");
  return table_values_[*idx];
}

Vec DispersionLaw::group_velocity(const Vec& k) const {
  if (k.size() != dim_) throw InvalidInput("momentum has wrong dimension");
  if (kind_ == DispersionKind::cosine) {
    Vec v(dim_);
    for (int j = 0; j < dim_; ++j) v[j] = amplitudes_[j] * 2.0 * std::sin(k[j]);
    return v;
  }
  const auto idx = table_index(k);
  if (!idx) throw InterpolationNotSupported("tabulated dispersion queried off its grid");
  return table_gradient_.row(*idx).transpose();
}

Vec DispersionLaw::energies(const MomentumGrid& grid) const {
  Vec e(grid.size());
  for (Index i = 0; i < grid.size(); ++i) e[i] = energy(grid.point(i));
  return e;
}

Mat DispersionLaw::velocities(const MomentumGrid& grid) const {
  Mat v(grid.size(), grid.dim());
  for (Index i = 0; i < grid.size(); ++i) v.row(i) = group_velocity(grid.point(i)).transpose();
  return v;
}

double eval_dispersion(const DispersionLaw& law, const Vec& k) { return law.energy(k); }

Vec eval_group_velocity(const DispersionLaw& law, const Vec& k) { return law.group_velocity(k); }

Mat spectral_diff_matrix_1d(int n) {
  Mat d = Mat::Zero(n, n);
  const double h = kTwoPi / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int s = i - j;
      const double sign = (s % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = 0.5 * sign / std::tan(0.5 * s * h);
    }
  }
  return d;
}

Mat centered_diff_matrix_1d(int n) {
  Mat d = Mat::Zero(n, n);
  const double h = kTwoPi / n;
  for (int i = 0; i < n; ++i) {
    d(i, (i + 1) % n) += 0.5 / h;
    d(i, (i + n - 1) % n) -= 0.5 / h;
  }
  return d;
}

Mat derivative_matrix(const MomentumGrid& grid, int axis, Differencing scheme) {
  if (axis < 0 || axis >= grid.dim()) throw InvalidInput("axis out of range");
  const int n = grid.n_per_axis();
  const Mat d1 = scheme == Differencing::spectral ? spectral_diff_matrix_1d(n) : centered_diff_matrix_1d(n);
  const Index stride = grid.stride(axis);
  Mat d = Mat::Zero(grid.size(), grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const int mi = grid.axis_index(i, axis);
    const Index base = i - mi * stride;
    for (int m = 0; m < n; ++m) d(i, base + m * stride) = d1(mi, m);
  }
  return d;
}

Vec spectral_derivative(const MomentumGrid& grid, const Vec& f, int axis) {
  if (f.size() != grid.size()) throw InvalidInput("grid function has wrong length");
  if (!f.allFinite()) throw InvalidInput("grid function has non-finite entries");
  if (axis < 0 || axis >= grid.dim()) throw InvalidInput("axis out of range");
  const int n = grid.n_per_axis();
  const Mat d1 = spectral_diff_matrix_1d(n);
  const Index stride = grid.stride(axis);
  Vec out(grid.size());
  Vec line(n);
  for (Index i = 0; i < grid.size(); ++i) {
    if (grid.axis_index(i, axis) != 0) continue;
    for (int m = 0; m < n; ++m) line[m] = f[i + m * stride];
    const Vec dl = d1 * line;
    for (int m = 0; m < n; ++m) out[i + m * stride] = dl[m];
  }
  return out;
}

AssumptionAReport check_assumption_A(const DispersionLaw& law, const MomentumGrid& grid) {
  const int d = grid.dim();
  const Mat vel = law.velocities(grid);
  std::vector<Vec> directions;
  for (int a = 0; a < d; ++a) directions.push_back(Vec::Unit(d, a));
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> normal;
  for (int r = 0; r < 2 * d + 10; ++r) {
    Vec v(d);
    for (int a = 0; a < d; ++a) v[a] = normal(rng);
    directions.push_back(v.normalized());
  }

  AssumptionAReport report;
  report.worst_max = std::numeric_limits<double>::infinity();
  for (const Vec& v : directions) {
    const double m = (vel * v).cwiseAbs().maxCoeff();
    if (m < report.worst_max) {
      report.worst_max = m;
      report.worst_direction = v;
    }
  }
  report.holds = report.worst_max > 1e-10;
  return report;
}

}  // namespace kinlab
