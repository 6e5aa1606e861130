#include "kinlab/trig.hpp"

#include <cmath>

#include "kinlab/errors.hpp"

namespace kinlab {

Mat shift_matrix_1d(int n, double s) {
  // circulant: entries depend on (j - l) mod n only
  const double h = kTwoPi / n;
  std::vector<double> row(n);
  for (int d = 0; d < n; ++d) {
    const double x = d * h - s;
    double acc = 1.0 + ((d % 2 == 0) ? 1.0 : -1.0);
    for (int m = 1; m < n / 2; ++m) acc += 2.0 * std::cos(m * x);
    row[d] = acc / n;
  }
  Mat t(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) t(j, l) = row[((j - l) % n + n) % n];
  return t;
}

namespace {

template <class V>
V along_axis_impl(const MomentumGrid& grid, const V& f, int axis, const Mat& map) {
  const int n = grid.n_per_axis();
  const Index stride = grid.stride(axis);
  V out(f.size());
  V line(n);
  for (Index i = 0; i < grid.size(); ++i) {
    if (grid.axis_index(i, axis) != 0) continue;
    for (int m = 0; m < n; ++m) line[m] = f[i + m * stride];
    const V moved = map * line;
    for (int m = 0; m < n; ++m) out[i + m * stride] = moved[m];
  }
  return out;
}

template <class V>
V shift_impl(const MomentumGrid& grid, const V& f, const Vec& s) {
  if (f.size() != grid.size()) throw InvalidInput("grid function has wrong length");
  if (s.size() != grid.dim()) throw InvalidInput("shift has wrong dimension");
  V out = f;
  for (int a = 0; a < grid.dim(); ++a) {
    if (s[a] == 0.0) continue;
    out = along_axis_impl(grid, out, a, shift_matrix_1d(grid.n_per_axis(), s[a]));
  }
  return out;
}

// Applies a (rows x n) map along `axis` of a tensor whose axis extents are `shape`.
std::vector<cplx> tensor_along_axis(const std::vector<cplx>& in, std::vector<int>& shape, int axis,
                                   const CMat& map) {
  Index outer = 1, inner = 1;
  for (int a = 0; a < axis; ++a) outer *= shape[a];
  for (std::size_t a = axis + 1; a < shape.size(); ++a) inner *= shape[a];
  const int n_in = shape[axis];
  const int n_out = static_cast<int>(map.rows());
  std::vector<cplx> out(outer * n_out * inner, cplx(0.0));
  for (Index o = 0; o < outer; ++o)
    for (int r = 0; r < n_out; ++r)
      for (int c = 0; c < n_in; ++c) {
        const cplx m = map(r, c);
        const cplx* src = &in[(o * n_in + c) * inner];
        cplx* dst = &out[(o * n_out + r) * inner];
        for (Index q = 0; q < inner; ++q) dst[q] += m * src[q];
      }
  shape[axis] = n_out;
  return out;
}

// Exact value of int_0^t exp(i w (s - t)) ds.
cplx line_kernel(double w, double t) {
  const double x = w * t;
  if (std::abs(x) < 1e-5) return t * cplx(1.0 - x * x / 6.0, -x / 2.0);
  return (1.0 - std::exp(cplx(0.0, -x))) / cplx(0.0, w);
}

}  // namespace

Vec apply_along_axis(const MomentumGrid& grid, const Vec& f, int axis, const Mat& map) {
  return along_axis_impl(grid, f, axis, map);
}

CVec apply_along_axis(const MomentumGrid& grid, const CVec& f, int axis, const Mat& map) {
  return along_axis_impl(grid, f, axis, map);
}

Vec shift_grid_function(const MomentumGrid& grid, const Vec& f, const Vec& s) { return shift_impl(grid, f, s); }

CVec shift_grid_function(const MomentumGrid& grid, const CVec& f, const Vec& s) { return shift_impl(grid, f, s); }

Mat shift_matrix(const MomentumGrid& grid, const Vec& s) {
  if (s.size() != grid.dim()) throw InvalidInput("shift has wrong dimension");
  std::vector<Mat> axes;
  for (int a = 0; a < grid.dim(); ++a) axes.push_back(shift_matrix_1d(grid.n_per_axis(), s[a]));
  if (grid.dim() == 1) return axes[0];
  Mat out(grid.size(), grid.size());
  for (Index i = 0; i < grid.size(); ++i)
    for (Index j = 0; j < grid.size(); ++j) {
      double v = 1.0;
      for (int a = 0; a < grid.dim(); ++a) v *= axes[a](grid.axis_index(i, a), grid.axis_index(j, a));
      out(i, j) = v;
    }
  return out;
}

TrigInterpolant::TrigInterpolant(const MomentumGrid& grid, const Vec& values) : grid_(grid) {
  if (values.size() != grid.size()) throw InvalidInput("grid function has wrong length");
  if (!values.allFinite()) throw InvalidInput("grid function has non-finite entries");
  const int n = grid.n_per_axis();
  nf_ = n + 1;
  CMat dft(nf_, n);
  for (int f = 0; f < nf_; ++f) {
    const int m = f - n / 2;
    const double scale = (std::abs(m) == n / 2) ? 0.5 / n : 1.0 / n;
    for (int l = 0; l < n; ++l) dft(f, l) = scale * std::exp(cplx(0.0, -m * grid.coordinate(l)));
  }
  std::vector<cplx> data(values.data(), values.data() + values.size());
  std::vector<int> shape(grid.dim(), n);
  for (int a = 0; a < grid.dim(); ++a) data = tensor_along_axis(data, shape, a, dft);
  coeffs_ = std::move(data);
  if (grid.dim() == 1) half_.assign(coeffs_.begin() + n / 2, coeffs_.end());
}

cplx TrigInterpolant::contract(const std::vector<cplx>& coeffs, const std::vector<CVec>& basis) const {
  std::vector<cplx> tmp = coeffs;
  for (int a = grid_.dim() - 1; a >= 0; --a) {
    const std::size_t rows = tmp.size() / nf_;
    for (std::size_t r = 0; r < rows; ++r) {
      cplx acc(0.0);
      for (int f = 0; f < nf_; ++f) acc += tmp[r * nf_ + f] * basis[a][f];
      tmp[r] = acc;
    }
    tmp.resize(rows);
  }
  return tmp[0];
}

namespace {

CVec fourier_basis(double x, int n) {
  CVec e(n + 1);
  const cplx step = std::exp(cplx(0.0, x));
  e[n / 2] = 1.0;
  for (int m = 1; m <= n / 2; ++m) {
    e[n / 2 + m] = e[n / 2 + m - 1] * step;
    e[n / 2 - m] = std::conj(e[n / 2 + m]);
  }
  return e;
}

}  // namespace

double TrigInterpolant::operator()(const Vec& k) const {
  if (k.size() != grid_.dim()) throw InvalidInput("momentum has wrong dimension");
  if (!half_.empty()) {
    // real data: conjugate-symmetric coefficients, sum over m >= 0 only
    const cplx step = std::exp(cplx(0.0, k[0]));
    cplx e = step, acc(0.0);
    for (std::size_t m = 1; m < half_.size(); ++m, e *= step) acc += half_[m] * e;
    return half_[0].real() + 2.0 * acc.real();
  }
  std::vector<CVec> basis;
  for (int a = 0; a < grid_.dim(); ++a) basis.push_back(fourier_basis(k[a], grid_.n_per_axis()));
  return contract(coeffs_, basis).real();
}

Vec TrigInterpolant::line_integral(const Vec& c, double t) const {
  if (c.size() != grid_.dim()) throw InvalidInput("direction has wrong dimension");
  const int n = grid_.n_per_axis();
  std::vector<cplx> weighted(coeffs_.size());
  for (std::size_t idx = 0; idx < coeffs_.size(); ++idx) {
    double w = 0.0;
    std::size_t rest = idx;
    for (int a = grid_.dim() - 1; a >= 0; --a) {
      w += (static_cast<int>(rest % nf_) - n / 2) * c[a];
      rest /= nf_;
    }
    weighted[idx] = coeffs_[idx] * line_kernel(w, t);
  }
  std::vector<CVec> per_coord(n);
  for (int m = 0; m < n; ++m) per_coord[m] = fourier_basis(grid_.coordinate(m), n);
  Vec out(grid_.size());
  std::vector<CVec> basis(grid_.dim());
  for (Index i = 0; i < grid_.size(); ++i) {
    for (int a = 0; a < grid_.dim(); ++a) basis[a] = per_coord[grid_.axis_index(i, a)];
    out[i] = contract(weighted, basis).real();
  }
  return out;
}

double TrigInterpolant::refined_max(int refine) const {
  const MomentumGrid fine(grid_.dim(), grid_.n_per_axis() * refine);
  double best = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < fine.size(); ++i) best = std::max(best, (*this)(fine.point(i)));
  return best;
}

}  // namespace kinlab
