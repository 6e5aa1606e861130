#pragma once

// Thermal reservoir: correlation function psihat(t), spectral density psi(w)
// and detailed-balance checks. Conventions: Lebesgue measure dq on R^d_res,
// sphere areas S_1 = 2pi, S_2 = 4pi, psihat(t) = int psi(w) e^{-iwt} dw.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kinlab/types.hpp"

namespace kinlab {

/// Spherically symmetric real coupling profile phi(q) = amplitude * exp(-q^2 / (2 width^2)).
struct FormFactor {
  std::string profile = "gaussian";
  double amplitude = 1.0;
  double width = 1.0;

  double operator()(double q) const;
  /// |phi(q)|^2
  double squared(double q) const;
};

struct ReservoirSpec {
  double beta = 1.0;
  int d_res = 2;
  FormFactor form_factor;

  /// Throws InvalidInput / UnsupportedConfiguration on bad fields.
  void validate() const;
};

/// Area of the unit sphere in R^d (S_{d-1}).
double sphere_area(int d);

/// rho(w) = S_{d-1} w^{d-1} |phi(w)|^2 for w >= 0.
double reservoir_density(const ReservoirSpec& spec, double w);

/// Infinite-volume psihat(t) for 0 <= Im t <= beta, absolute tolerance 1e-10.
cplx correlation_function(const ReservoirSpec& spec, cplx t);

/// Lattice-sum approximant of psihat in a periodic box of side L.
/// The q = 0 mode is regularized with frequency 1.
cplx finite_volume_correlation(const ReservoirSpec& spec, double L, cplx t);

/// Closed-form psi(w), with the continuous limit at w = 0.
double spectral_density_analytic(const ReservoirSpec& spec, double w);

struct DecayFit {
  double rate = 0.0;       // g in |psihat(t)| ~ A e^{-g t}
  double amplitude = 0.0;  // A
  double t_cut = 0.0;      // smallest horizon whose tail bound is below the requested tolerance
  double tail_bound = 0.0;
};

/// Fits exponential decay of |psihat| on [0, t_fit] and finds the cutoff
/// T with |psihat(T)| / g below `tail_tol`. Throws OracleUnavailable if no
/// cutoff up to `t_max` works.
DecayFit fit_correlation_decay(const ReservoirSpec& spec, double tail_tol = 1e-8,
                               double t_fit = 10.0, double t_max = 60.0);

/// Oracle: psi(w) = (1/2pi) int psihat(t) e^{iwt} dt over |t| <= T_cut.
double spectral_density_numeric(const ReservoirSpec& spec, double w);

/// psihat tabulated once on composite Gauss-Legendre nodes of [0, T_cut].
/// Reused by the numeric oracle and by the fiber time integrals.
class CorrelationTable {
 public:
  explicit CorrelationTable(const ReservoirSpec& spec, double tail_tol = 1e-8, double panel = 0.25,
                            int order = 16);

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<cplx>& values() const { return values_; }
  const DecayFit& decay() const { return fit_; }

  /// (1/pi) Re int_0^T psihat(t) e^{iwt} dt
  double fourier(double w) const;

 private:
  DecayFit fit_;
  std::vector<double> nodes_, weights_;
  std::vector<cplx> values_;
};

/// psi as used to build jump rates. Wraps either the analytic closed form,
/// a tabulation of the numeric oracle, or an arbitrary callable (for tests).
class SpectralDensity {
 public:
  enum class Source { analytic, numeric, custom };

  static SpectralDensity analytic(const ReservoirSpec& spec);
  /// Tabulates the oracle on `samples`; evaluation is restricted to those points.
  static SpectralDensity numeric(const ReservoirSpec& spec, const std::vector<double>& samples);
  static SpectralDensity custom(const ReservoirSpec& spec, std::function<double(double)> psi);

  double operator()(double w) const;
  const ReservoirSpec& spec() const { return spec_; }
  double beta() const { return spec_.beta; }
  Source source() const { return source_; }

 private:
  SpectralDensity() = default;
  ReservoirSpec spec_;
  Source source_ = Source::analytic;
  std::function<double(double)> eval_;
};

struct DetailedBalanceReport {
  double max_violation = 0.0;
  double worst_omega = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// max_w |e^{beta w} psi(w) - psi(-w)| / psi(-w); threshold 1e-10 for the
/// analytic source and 1e-4 otherwise.
DetailedBalanceReport check_detailed_balance(const SpectralDensity& sd, const std::vector<double>& omegas);

}  // namespace kinlab
