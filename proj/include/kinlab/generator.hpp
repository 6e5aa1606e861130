#pragma once

// Discretized linear Boltzmann generator
//   M^{kappa,chi} = i kappa . grad eps - chi . grad + G + L
// on the momentum grid, with uniform quadrature weight w.

#include "kinlab/lattice.hpp"
#include "kinlab/reservoir.hpp"

namespace kinlab {

enum class DriftScheme { spectral, upwind };

struct JumpRateTable {
  MomentumGrid grid;
  Vec energies;
  Mat rates;   // rates(i, j) = r(k_i, k_j) = psi(eps_j - eps_i)
  Vec escape;  // R_i = w sum_j r(k_i, k_j)
  double beta = 1.0;
};

JumpRateTable build_rates(const DispersionLaw& law, const MomentumGrid& grid, const SpectralDensity& sd);

/// G(i, j) = w r(k_j, k_i): mass arriving at k_i from k_j.
Mat build_gain(const JumpRateTable& table);
/// Diagonal of L, i.e. -R.
Vec build_loss(const JumpRateTable& table);
/// -sum_a chi^a d/dk^a
Mat build_drift(const MomentumGrid& grid, const Vec& chi, DriftScheme scheme = DriftScheme::spectral);
/// Diagonal entries i kappa . grad eps(k_i).
CVec build_advection(const DispersionLaw& law, const MomentumGrid& grid, const CVec& kappa);

/// a0 = min_i R_i; throws DegenerateRates when a0 <= 1e-14.
double min_escape_rate(const JumpRateTable& table);

struct GeneratorTerms {
  bool advection = true;
  bool drift = true;
  bool gain = true;
  bool loss = true;
};

struct GeneratorMatrix {
  MomentumGrid grid;
  CVec kappa;
  Vec chi;
  CMat matrix;
  GeneratorTerms terms;
  DriftScheme scheme = DriftScheme::spectral;
  double weight = 0.0;
};

/// Law, grid and rates bundled once; generators for many (kappa, chi) are
/// then cheap to form.
class KineticModel {
 public:
  KineticModel(DispersionLaw law, MomentumGrid grid, SpectralDensity sd,
               DriftScheme scheme = DriftScheme::spectral);

  const DispersionLaw& law() const { return law_; }
  const MomentumGrid& grid() const { return table_.grid; }
  const SpectralDensity& density() const { return sd_; }
  const JumpRateTable& table() const { return table_; }
  const Mat& gain() const { return gain_; }
  const Vec& loss() const { return loss_; }
  const Vec& energies() const { return table_.energies; }
  /// Group velocity at every grid point, one column per axis.
  const Mat& velocities() const { return velocities_; }
  double beta() const { return table_.beta; }
  double weight() const { return table_.grid.weight(); }
  DriftScheme scheme() const { return scheme_; }
  int dim() const { return table_.grid.dim(); }
  Index size() const { return table_.grid.size(); }

  /// G + L
  Mat collision() const;
  Mat drift(const Vec& chi) const;
  /// M^{0,chi}, real
  Mat generator(const Vec& chi) const;
  /// M^{kappa,chi}
  CMat generator(const CVec& kappa, const Vec& chi) const;

  /// Gibbs density e^{-beta eps} / Z normalized so that w sum = 1.
  Vec gibbs() const;

  /// Validated assembly; throws AssemblyError on a conservation defect.
  GeneratorMatrix assemble(const CVec& kappa, const Vec& chi, GeneratorTerms terms = {}) const;

 private:
  DispersionLaw law_;
  SpectralDensity sd_;
  JumpRateTable table_;
  Mat gain_;
  Vec loss_;
  Mat velocities_;
  DriftScheme scheme_;
};

GeneratorMatrix assemble_generator(const DispersionLaw& law, const MomentumGrid& grid, const SpectralDensity& sd,
                                   const CVec& kappa, const Vec& chi);

/// Infinity norm (max absolute row sum).
double norm_inf(const CMat& m);
double norm_inf(const Mat& m);

}  // namespace kinlab
