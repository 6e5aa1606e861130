#pragma once

// Second-order ladder operators on the fiber of total momentum p = lambda^2 kappa
// and their comparison with the kinetic generator.
//
// Normalization: blocks are stored divided by lambda^2. The k' integral is the
// grid sum with weight w, psihat(t) = int psi(w) e^{-iwt} dw, and every time
// integral carries the factor 1/(2 pi). With these choices the kappa = 0,
// chi = 0 blocks satisfy ll + rr = L and lr + rl = G.

#include <string>
#include <vector>

#include "kinlab/generator.hpp"

namespace kinlab {

inline constexpr const char* kFiberConvention = "dk'=w*sum;psihat=int psi e^{-iwt};c=1/(2pi);blocks/lambda^2";

/// Phi_k(t) = int_0^t eps(k - lambda^2 chi s) ds
double phase_integral(const DispersionLaw& law, const Vec& k, const Vec& chi, double lambda, double t);

struct FiberOperator {
  double lambda = 0.0;
  Vec kappa;
  Vec chi;
  cplx z;
  CMat ll, rr, lr, rl;  // divided by lambda^2
  std::string convention = kFiberConvention;
  double tail_bound = 0.0;   // neglected |psihat| mass beyond t_cut
  double t_cut = 0.0;
  bool limit = false;        // p = 0 and no drift: ll + rr diagonal, lr + rl = G

  CMat total() const { return ll + rr + lr + rl; }
};

FiberOperator build_fiber_ladder(const DispersionLaw& law, const MomentumGrid& grid, const SpectralDensity& sd,
                                 double lambda, const Vec& kappa, const Vec& chi, cplx z = 0.0);
/// Same, reusing a tabulated correlation function.
FiberOperator build_fiber_ladder(const DispersionLaw& law, const MomentumGrid& grid, const CorrelationTable& table,
                                 double lambda, const Vec& kappa, const Vec& chi, cplx z = 0.0);

/// lambda^-2 (L_S)_p = i lambda^-2 (eps(k + p/2) - eps(k - p/2)) - chi . grad
CMat free_liouvillian_fiber(const DispersionLaw& law, const MomentumGrid& grid, double lambda, const Vec& kappa,
                            const Vec& chi);

/// K(chi) - K(0) at kappa = 0, z = 0 (normalized like the blocks).
CMat delta_m(const DispersionLaw& law, const MomentumGrid& grid, const CorrelationTable& table, double lambda,
             const Vec& chi);
CMat delta_m(const DispersionLaw& law, const MomentumGrid& grid, const SpectralDensity& sd, double lambda,
             const Vec& chi);

struct KineticLimitRow {
  double lambda = 0.0;
  double residual = 0.0;      // ||lambda^-2 L_S + K(chi) - (M + dM)||_inf
  double residual_rel = 0.0;  // divided by ||M||_inf
  double dist_to_m = 0.0;     // ||dM||_inf = ||M~ - M||
  double free_error = 0.0;    // ||lambda^-2 (L_S)_p - (i kappa . grad eps - chi . grad)||_inf
};

struct KineticLimitTable {
  std::vector<KineticLimitRow> rows;
  double order = 0.0;       // fitted slope of log residual against log lambda
  double free_order = 0.0;  // same for free_error (0 when it vanishes identically)
  bool monotone = true;     // residual strictly decreasing along the list
};

/// lambdas must be strictly decreasing. A non-monotone residual only clears the flag.
KineticLimitTable kinetic_limit_error(const KineticModel& model, const std::vector<double>& lambdas,
                                      const Vec& kappa, const Vec& chi);

struct DeltaMScaling {
  std::vector<double> lambdas;
  std::vector<double> bound_constant;  // max over probes of ||dM f|| / (lambda^2 (||f|| + ||chi . grad f||))
  std::vector<double> mean_norm;       // mean over probes of ||dM f||
  std::vector<double> halving_ratio;   // mean_norm[i] / mean_norm[i + 1]
  double exponent = 0.0;               // fitted slope of log mean_norm against log lambda
};

/// Smooth random probes: low-order trigonometric polynomials with Gaussian coefficients.
std::vector<Vec> smooth_probes(const MomentumGrid& grid, int count, std::uint64_t seed, int max_mode = 3);

DeltaMScaling delta_m_scaling(const KineticModel& model, const std::vector<double>& lambdas, const Vec& chi,
                              int probes = 20, std::uint64_t seed = 7);

/// Least-squares slope of log y against log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kinlab
