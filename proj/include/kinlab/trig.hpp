#pragma once

// Trigonometric interpolation on the momentum grid: off-grid evaluation,
// torus shifts and exact line integrals of interpolated grid functions.

#include <vector>

#include "kinlab/lattice.hpp"

namespace kinlab {

/// Matrix of the shift f(x) -> f(x - s) for n equispaced samples.
///
/// Built as exp(-s D) with D the spectral differentiation matrix, so the
/// Nyquist mode is left untouched and shifts compose exactly with the drift
/// term of the generator.
Mat shift_matrix_1d(int n, double s);

/// Applies a 1d n x n map along one axis of a grid function.
Vec apply_along_axis(const MomentumGrid& grid, const Vec& f, int axis, const Mat& map);
CVec apply_along_axis(const MomentumGrid& grid, const CVec& f, int axis, const Mat& map);

/// Applies f(k) -> f(k - s) on the full grid (tensor product of 1d shifts).
Vec shift_grid_function(const MomentumGrid& grid, const Vec& f, const Vec& s);
CVec shift_grid_function(const MomentumGrid& grid, const CVec& f, const Vec& s);

/// Full N x N matrix of the shift by s.
Mat shift_matrix(const MomentumGrid& grid, const Vec& s);

/// Tensor-product trigonometric interpolant of a real grid function.
///
/// Each axis carries frequencies -n/2 .. n/2, with the Nyquist coefficient
/// split evenly between +n/2 and -n/2 so that the interpolant is real.
class TrigInterpolant {
 public:
  TrigInterpolant(const MomentumGrid& grid, const Vec& values);

  double operator()(const Vec& k) const;

  /// Values at every grid point of int_0^t g(k + c (s - t)) ds.
  Vec line_integral(const Vec& c, double t) const;

  /// max of the interpolant over a grid refined `refine` times per axis.
  double refined_max(int refine) const;

  const MomentumGrid& grid() const { return grid_; }

 private:
  MomentumGrid grid_;
  int nf_;                    // frequencies per axis, n + 1
  std::vector<cplx> coeffs_;  // nf_^d coefficients, axis 0 slowest
  std::vector<cplx> half_;    // d = 1: coefficients of frequencies 0 .. n/2

  cplx contract(const std::vector<cplx>& coeffs, const std::vector<CVec>& basis) const;
};

}  // namespace kinlab
