#pragma once

// Momentum torus [-pi, pi)^d, band dispersion and spectral differentiation.

#include <optional>
#include <vector>

#include "kinlab/types.hpp"

namespace kinlab {

/// Reduce an angle into [-pi, pi).
double wrap_to_torus(double x);

/// Uniform tensor grid on [-pi, pi)^d with an even number of points per axis.
///
/// Points are stored with axis 0 varying slowest. Every point carries the
/// same quadrature weight (2pi/n)^d, so weights sum to (2pi)^d.
class MomentumGrid {
 public:
  MomentumGrid(int dim, int n_per_axis);

  int dim() const { return dim_; }
  int n_per_axis() const { return n_; }
  Index size() const { return size_; }
  double spacing() const { return kTwoPi / n_; }
  double weight() const { return weight_; }

  /// Coordinate of grid index m along any axis.
  double coordinate(int m) const { return -kPi + spacing() * m; }
  Index stride(int axis) const { return strides_[axis]; }
  int axis_index(Index i, int axis) const { return static_cast<int>((i / strides_[axis]) % n_); }
  Vec point(Index i) const;
  /// Index of the grid point -k_i.
  Index negated(Index i) const;
  Index index_of(const std::vector<int>& multi) const;

 private:
  int dim_;
  int n_;
  Index size_;
  double weight_;
  std::vector<Index> strides_;
};

enum class DispersionKind { cosine, tabulated };
enum class Differencing { spectral, centered };

/// Band function epsilon on the torus.
///
/// The cosine law is eps(k) = sum_j a_j * 2(1 - cos k_j) with per-axis
/// amplitudes a_j (all one by default). A tabulated law is only known at the
/// points of the grid it was sampled on.
class DispersionLaw {
 public:
  static DispersionLaw cosine(int dim, std::vector<double> amplitudes = {});
  static DispersionLaw tabulated(const MomentumGrid& grid, Vec values,
                                 Differencing scheme = Differencing::spectral);

  DispersionKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const std::vector<double>& amplitudes() const { return amplitudes_; }

  double energy(const Vec& k) const;
  Vec group_velocity(const Vec& k) const;

  /// Energies at every grid point.
  Vec energies(const MomentumGrid& grid) const;
  /// Group velocities at every grid point, one row per point.
  Mat velocities(const MomentumGrid& grid) const;

 private:
  DispersionLaw() = default;
  std::optional<Index> table_index(const Vec& k) const;

  DispersionKind kind_ = DispersionKind::cosine;
  int dim_ = 1;
  std::vector<double> amplitudes_;
  // tabulated only
  int table_n_ = 0;
  Vec table_values_;
  Mat table_gradient_;
};

double eval_dispersion(const DispersionLaw& law, const Vec& k);
Vec eval_group_velocity(const DispersionLaw& law, const Vec& k);

/// Fourier differentiation matrix for n equispaced points on [-pi, pi).
/// The Nyquist mode is mapped to zero, so the matrix is exactly antisymmetric.
Mat spectral_diff_matrix_1d(int n);
Mat centered_diff_matrix_1d(int n);

/// Full N x N partial-derivative matrix along one axis of the grid.
Mat derivative_matrix(const MomentumGrid& grid, int axis,
                      Differencing scheme = Differencing::spectral);

/// Spectral partial derivative of a grid function along `axis`.
Vec spectral_derivative(const MomentumGrid& grid, const Vec& f, int axis);

struct AssumptionAReport {
  bool holds = false;
  Vec worst_direction;
  double worst_max = 0.0;  // max_k |v . grad eps(k)| along the worst direction
};

/// Checks that no direction v makes v . grad eps vanish on the whole grid.
/// Scans the coordinate axes plus 2d+10 fixed pseudo-random unit vectors.
AssumptionAReport check_assumption_A(const DispersionLaw& law, const MomentumGrid& grid);

}  // namespace kinlab
