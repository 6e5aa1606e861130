#pragma once

// Steady states, spectra, the eigenvalue branch u(kappa, chi) near zero and
// the transport coefficients derived from it.
//
// Sign convention: with advection +i kappa . grad eps the branch behaves as
// u = i kappa . v - kappa . D kappa + ..., so v = -i du/dkappa and
// D = -(1/2) d^2u/dkappa^2.

#include <optional>
#include <string>
#include <vector>

#include "kinlab/generator.hpp"

namespace kinlab {

struct StationaryState {
  Vec chi;
  Vec zeta;             // <1, zeta> = 1
  double gap = 0.0;     // distance of the non-zero spectrum from the imaginary axis
  double residual = 0.0;  // ||M zeta||_inf
  double weight = 0.0;
};

struct StationaryOptions {
  bool compute_gap = true;
};

StationaryState stationary_state(const KineticModel& model, const Vec& chi, const StationaryOptions& options = {});

struct SpectrumReport {
  CVec eigenvalues;
  double max_re_nonzero = 0.0;  // max Re over the spectrum without the eigenvalue closest to 0
  double gap = 0.0;
  int count_right_of_half_gap = 0;  // eigenvalues with Re >= -gap/2
};

/// Dense eigenvalues of M; throws GeneratorSignError if some Re mu > 1e-8.
SpectrumReport full_spectrum(const CMat& m);
SpectrumReport full_spectrum(const Mat& m);

/// M_eps = E M E^{-1} with E = diag(e^{beta eps / 2}), and its pieces.
struct SymmetrizedGenerator {
  Mat matrix;      // E M E^{-1}
  Mat gain;        // E G E^{-1}, symmetric by detailed balance
  Vec loss;        // L
  Vec field;       // (beta / 2) chi . grad eps
  Mat drift;       // -chi . grad
};

SymmetrizedGenerator symmetrize(const KineticModel& model, const Vec& chi);

/// Exposes u(kappa, chi) for fixed chi. The stationary state and gap are
/// computed once; each evaluation counts eigenvalues in the disk of radius
/// gap/2 and refines the single candidate by inverse iteration.
class BranchTracker {
 public:
  BranchTracker(const KineticModel& model, const Vec& chi);

  cplx operator()(const CVec& kappa) const;
  /// Real kappa.
  cplx at(const Vec& kappa) const { return (*this)(CVec(kappa.cast<cplx>())); }

  const StationaryState& state() const { return state_; }
  const KineticModel& model() const { return model_; }
  const Vec& chi() const { return chi_; }

 private:
  KineticModel model_;
  Vec chi_;
  Mat m0_;
  StationaryState state_;
};

cplx eigenvalue_branch(const KineticModel& model, const Vec& chi, const CVec& kappa);

/// v = <grad eps, zeta>
Vec velocity(const StationaryState& state, const KineticModel& model);

struct VelocityCheck {
  Vec v_state;
  Vec v_branch;  // -i du/dkappa, central differences with one Richardson level
  double max_abs_diff = 0.0;
};

/// Throws InconsistencyError when the two routes differ by more than 1e-4.
VelocityCheck velocity_crosscheck(const BranchTracker& branch, double h = 1e-3);

/// Rayleigh-Schroedinger second-order term with the reduced resolvent.
Mat diffusion_rs(const StationaryState& state, const KineticModel& model);

struct FdDiffusion {
  Mat D;
  Mat D_coarse;  // without the Richardson step, step h
  double max_imag = 0.0;
};

/// -(1/2) Hessian of u at kappa = 0 by central differences (h, h/2, Richardson).
FdDiffusion diffusion_fd(const BranchTracker& branch, double h = 1e-3);

struct GreenKubo {
  Mat D;             // closed form through the symmetric eigendecomposition
  Mat D_quadrature;  // explicit time integration of C(t) up to 10/gap plus tail
  Mat C0;            // C(0) = covariance of grad eps under zeta0
  double horizon = 0.0;
  double decay_rate = 0.0;  // fitted decay of tr C(t)
  double gap = 0.0;
};

/// Requires chi = 0.
GreenKubo green_kubo(const KineticModel& model);

struct EinsteinReport {
  Mat mobility;  // mobility(i, j) = dv^j / dchi^i
  Mat beta_D;
  double rel_err = 0.0;
  bool pass = false;
};

EinsteinReport einstein_check(const KineticModel& model, double delta_chi = 1e-3);

struct LargeFieldRow {
  double chi = 0.0;
  double v = 0.0;
  double D = 0.0;
  double band_ratio = 0.0;  // min |Im mu| / |chi| away from 0
  bool ok = true;
  std::string error;
};

struct LargeFieldScan {
  std::vector<LargeFieldRow> rows;
  double last_ratio = 0.0;      // v(chi_last) / v(chi_prev)
  double last_variation = 0.0;  // relative change of chi v over the last step
};

/// d = 1 only. Rows that fail keep their error message; the scan continues.
LargeFieldScan large_field_scan(const KineticModel& model, const std::vector<double>& chis);

/// Index of the eigenvalue closest to zero.
Index nearest_to_zero(const CVec& eigenvalues);

}  // namespace kinlab
