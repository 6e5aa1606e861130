#pragma once

// Evolution of densities under e^{tM}: the free-loss semigroup S_t, the
// Dyson series around it, eigendecomposition and an explicit RK4 integrator.

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "kinlab/generator.hpp"
#include "kinlab/trig.hpp"

namespace kinlab {

/// S_t f(k) = f(k - chi t) exp(int_0^t L(k + chi (s - t)) ds).
///
/// The shift uses exp(-t chi . D) with the spectral derivative D; the loss
/// exponent integrates the trigonometric interpolant of L exactly, mode by mode.
class FreeLossSemigroup {
 public:
  FreeLossSemigroup(const KineticModel& model, const Vec& chi);

  Vec apply(double t, const Vec& f) const;
  /// exp of the integrated loss at every grid point
  Vec decay_factor(double t) const;

  /// S_t frozen for one t, for repeated application.
  struct Frozen {
    Vec decay;
    std::vector<Mat> shifts;  // per-axis 1d shift matrices, empty when chi = 0
  };
  Frozen freeze(double t) const;
  Vec apply(const Frozen& s, const Vec& f) const;

 private:
  MomentumGrid grid_;
  Vec chi_;
  Vec loss_;
  TrigInterpolant loss_interp_;
  bool drifting_;
};

Vec free_loss_apply(const KineticModel& model, const Vec& chi, double t, const Vec& f);

struct DysonOptions {
  int order_cap = 40;
  double term_tol = 1e-10;
  int nodes_per_panel = 12;
  double max_panel = 0.05;
};

struct DysonResult {
  Vec state;
  int orders = 0;          // highest order included
  double last_term = 0.0;  // sup-norm of that order's contribution
  bool converged = false;
};

/// T_t f = S_t f + sum_n int S G S ... G S f, nested integrals on composite
/// Gauss-Legendre panels. Kappa is zero. Throws TruncationError when the
/// series has not converged at the order cap.
DysonResult dyson_evolve(const KineticModel& model, const Vec& chi, double t, const Vec& f,
                         const DysonOptions& options = {});

/// Classical RK4 for f' = M f with step h (h <= 0 picks 0.05 / ||M||_inf).
CVec rk4_evolve(const CMat& m, double t, const CVec& f, double h = 0.0);
Vec rk4_evolve(const Mat& m, double t, const Vec& f, double h = 0.0);

/// e^{tM} through M = V diag(lambda) V^{-1}; switches to RK4 when V is
/// ill-conditioned (cond > 1e12).
class EigenEvolver {
 public:
  explicit EigenEvolver(const CMat& m);
  explicit EigenEvolver(const Mat& m) : EigenEvolver(CMat(m.cast<cplx>())) {}

  CVec apply(double t, const CVec& f) const;
  Vec apply_real(double t, const Vec& f) const;

  const CVec& eigenvalues() const { return lambda_; }
  double condition() const { return cond_; }
  bool fallback() const { return fallback_; }

 private:
  CMat m_;
  CMat v_, vinv_;
  CVec lambda_;
  double cond_ = 0.0;
  bool fallback_ = false;
};

struct EvolveOutcome {
  CVec state;
  bool fallback = false;  // true if RK4 replaced the eigendecomposition
};

EvolveOutcome eig_evolve(const GeneratorMatrix& m, double t, const CVec& f);

struct EvolutionResult {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<double> mass;      // <1, f_t>
  std::vector<double> distance;  // sup |f_t - zeta| when a reference is given
  std::string method;
  bool fallback = false;
};

/// Real evolution at kappa = 0 by "eig", "rk4" or "dyson".
EvolutionResult evolve(const KineticModel& model, const Vec& chi, const Vec& f, const std::vector<double>& times,
                       const std::string& method, const Vec* reference = nullptr);

struct RelaxationFit {
  double rate = 0.0;
  double residual = 0.0;  // rms deviation of the log fit
  double t1 = 0.0, t2 = 0.0;
  double gap = 0.0;  // spectral gap used for the window
};

/// Least-squares slope of log ||f_t - zeta||_inf on [2/gap, 2/gap + 6/gap].
RelaxationFit relaxation_rate(const Mat& m, const Vec& zeta, const Vec& f);

}  // namespace kinlab
