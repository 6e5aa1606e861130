#include "kinlab/reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "kinlab/errors.hpp"
#include "kinlab/quadrature.hpp"

namespace kinlab {

double FormFactor::operator()(double q) const { return amplitude * std::exp(-q * q / (2.0 * width * width)); }

double FormFactor::squared(double q) const {
  return amplitude * amplitude * std::exp(-q * q / (width * width));
}

void ReservoirSpec::validate() const {
  if (!std::isfinite(beta) || beta <= 0.0) throw InvalidInput(fmt::format("beta must be finite and positive, got {}", beta));
  if (d_res == 1) throw UnsupportedConfiguration("d_res = 1 makes psi diverge at zero frequency");
  if (d_res != 2 && d_res != 3) throw InvalidInput(fmt::format("d_res must be 2 or 3, got {}", d_res));
  if (form_factor.profile != "gaussian")
    throw InvalidInput(fmt::format("unknown form factor profile '{}'", form_factor.profile));
  if (!std::isfinite(form_factor.amplitude)) throw InvalidInput("form factor amplitude must be finite");
  if (!std::isfinite(form_factor.width) || form_factor.width <= 0.0)
    throw InvalidInput("form factor width must be positive");
}

double sphere_area(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return kTwoPi;
    case 3: return 2.0 * kTwoPi;
    default: throw InvalidInput(fmt::format("no sphere area for dimension {}", d));
  }
}

double reservoir_density(const ReservoirSpec& spec, double w) {
  return sphere_area(spec.d_res) * std::pow(w, spec.d_res - 1) * spec.form_factor.squared(w);
}

namespace {

// Radius beyond which |phi|^2 is below `rel` of its peak.
double q_cutoff(const FormFactor& ff, double rel) { return ff.width * std::sqrt(-std::log(rel)); }

// Thermal bracket for a mode of frequency q > 0 at complex time t = a + ib:
// e^{-itq} / (e^{beta q} - 1) + e^{itq} / (1 - e^{-beta q}), written without overflow.
cplx thermal_bracket(double beta, cplx t, double q) {
  const double a = t.real(), b = t.imag();
  const double denom = -std::expm1(-beta * q);
  const cplx up = std::exp(cplx((b - beta) * q, -a * q));
  const cplx down = std::exp(cplx(-b * q, a * q));
  return (up + down) / denom;
}

void check_strip(const ReservoirSpec& spec, cplx t) {
  if (t.imag() < 0.0 || t.imag() > spec.beta)
    throw DomainError(fmt::format("Im t = {} outside [0, beta = {}]", t.imag(), spec.beta));
}

}  // namespace

cplx correlation_function(const ReservoirSpec& spec, cplx t) {
  spec.validate();
  check_strip(spec, t);
  // The integrand is analytic in q (q^{d-1} cancels the 1/q of the bracket),
  // so a composite Gauss-Legendre rule resolving the e^{itq} oscillation is
  // accurate to rounding.
  const double qmax = q_cutoff(spec.form_factor, 1e-18);
  const double panel = std::min(0.5, 2.0 / std::max(std::abs(t.real()), 1e-300));
  const QuadratureRule rule = composite_gauss_legendre(20, 0.0, qmax, panel);
  const double s = sphere_area(spec.d_res);
  cplx acc(0.0);
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double q = rule.nodes[j];
    acc += rule.weights[j] * std::pow(q, spec.d_res - 1) * spec.form_factor.squared(q) *
           thermal_bracket(spec.beta, t, q);
  }
  return s * acc;
}

cplx finite_volume_correlation(const ReservoirSpec& spec, double L, cplx t) {
  spec.validate();
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError(fmt::format("box size must be positive, got {}", L));
  check_strip(spec, t);
  const int d = spec.d_res;
  const double dq = kTwoPi / L;
  const double cell = std::pow(dq, d);
  const double qmax = q_cutoff(spec.form_factor, 1e-14);
  const int nmax = static_cast<int>(std::ceil(qmax / dq));

  // q = 0 term: frequency regularized to 1
  cplx sum = cell * spec.form_factor.squared(0.0) * thermal_bracket(spec.beta, t, 1.0);

  // Radial multiplicities: count lattice points by |n|^2, then sum once per shell.
  std::map<long, long> shells;
  const long r2max = static_cast<long>(nmax) * nmax;
  if (d == 2) {
    for (int i = -nmax; i <= nmax; ++i)
      for (int j = -nmax; j <= nmax; ++j) {
        const long r2 = static_cast<long>(i) * i + static_cast<long>(j) * j;
        if (r2 > 0 && r2 <= r2max) ++shells[r2];
      }
  } else {
    for (int i = -nmax; i <= nmax; ++i)
      for (int j = -nmax; j <= nmax; ++j)
        for (int k = -nmax; k <= nmax; ++k) {
          const long r2 = static_cast<long>(i) * i + static_cast<long>(j) * j + static_cast<long>(k) * k;
          if (r2 > 0 && r2 <= r2max) ++shells[r2];
        }
  }
  for (const auto& [r2, count] : shells) {
    const double q = dq * std::sqrt(static_cast<double>(r2));
    sum += static_cast<double>(count) * cell * spec.form_factor.squared(q) * thermal_bracket(spec.beta, t, q);
  }
  return sum;
}

namespace {

double psi_closed_form(const ReservoirSpec& spec, double w) {
  const double beta = spec.beta;
  const double a = std::abs(w);
  if (a == 0.0) {
    // rho(w) / (beta w) as w -> 0
    return spec.d_res == 2 ? sphere_area(2) * spec.form_factor.squared(0.0) / beta : 0.0;
  }
  const double rho = reservoir_density(spec, a);
  if (w > 0.0) return rho / std::expm1(beta * a);
  return rho / -std::expm1(-beta * a);
}

}  // namespace

double spectral_density_analytic(const ReservoirSpec& spec, double w) {
  spec.validate();
  return psi_closed_form(spec, w);
}

DecayFit fit_correlation_decay(const ReservoirSpec& spec, double tail_tol, double t_fit, double t_max) {
  const int samples = 41;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int j = 0; j < samples; ++j) {
    const double t = t_fit * j / (samples - 1);
    const double y = std::log(std::abs(correlation_function(spec, t)));
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
  }
  const double slope = (samples * sxy - sx * sy) / (samples * sxx - sx * sx);
  DecayFit fit;
  fit.rate = -slope;
  fit.amplitude = std::exp((sy - slope * sx) / samples);
  if (!(fit.rate > 0.0)) throw OracleUnavailable("correlation function shows no exponential decay");

  double prev = std::abs(correlation_function(spec, 0.0));
  for (double T = 1.0; T <= t_max; T += 0.5) {
    const double cur = std::abs(correlation_function(spec, T));
    const double bound = cur / fit.rate;
    if (cur < prev && bound < tail_tol) {
      fit.t_cut = T;
      fit.tail_bound = bound;
      return fit;
    }
    prev = std::max(prev, cur);
  }
  throw OracleUnavailable(
      fmt::format("correlation tail stays above {} up to t = {}; decay is too slow for the Fourier oracle", tail_tol,
                  t_max));
}

CorrelationTable::CorrelationTable(const ReservoirSpec& spec, double tail_tol, double panel, int order)
    : fit_(fit_correlation_decay(spec, tail_tol)) {
  QuadratureRule rule = composite_gauss_legendre(order, 0.0, fit_.t_cut, panel);
  nodes_ = std::move(rule.nodes);
  weights_ = std::move(rule.weights);
  values_.reserve(nodes_.size());
  for (double t : nodes_) values_.push_back(correlation_function(spec, t));
}

double CorrelationTable::fourier(double w) const {
  cplx acc(0.0);
  for (std::size_t j = 0; j < nodes_.size(); ++j) acc += weights_[j] * values_[j] * std::exp(cplx(0.0, w * nodes_[j]));
  return acc.real() / kPi;
}

double spectral_density_numeric(const ReservoirSpec& spec, double w) {
  return CorrelationTable(spec).fourier(w);
}

SpectralDensity SpectralDensity::analytic(const ReservoirSpec& spec) {
  spec.validate();
  SpectralDensity sd;
  sd.spec_ = spec;
  sd.source_ = Source::analytic;
  sd.eval_ = [spec](double w) { return psi_closed_form(spec, w); };
  return sd;
}

SpectralDensity SpectralDensity::numeric(const ReservoirSpec& spec, const std::vector<double>& samples) {
  spec.validate();
  const CorrelationTable table(spec);
  auto values = std::make_shared<std::map<double, double>>();
  for (double w : samples) (*values)[w] = table.fourier(w);
  SpectralDensity sd;
  sd.spec_ = spec;
  sd.source_ = Source::numeric;
  sd.eval_ = [values](double w) {
    auto it = values->find(w);
    if (it == values->end()) throw InterpolationNotSupported(fmt::format("frequency {} is not tabulated", w));
    return it->second;
  };
  return sd;
}

SpectralDensity SpectralDensity::custom(const ReservoirSpec& spec, std::function<double(double)> psi) {
  SpectralDensity sd;
  sd.spec_ = spec;
  sd.source_ = Source::custom;
  sd.eval_ = std::move(psi);
  return sd;
}

double SpectralDensity::operator()(double w) const { return eval_(w); }

DetailedBalanceReport check_detailed_balance(const SpectralDensity& sd, const std::vector<double>& omegas) {
  DetailedBalanceReport r;
  r.threshold = sd.source() == SpectralDensity::Source::analytic ? 1e-10 : 1e-4;
  for (double w : omegas) {
    const double lhs = std::exp(sd.beta() * w) * sd(w);
    const double rhs = sd(-w);
    const double scale = rhs != 0.0 ? std::abs(rhs) : 1.0;
    const double v = std::abs(lhs - rhs) / scale;
    if (!(v <= r.max_violation)) {
      r.max_violation = v;
      r.worst_omega = w;
    }
  }
  r.pass = r.max_violation < r.threshold;
  return r;
}

}  // namespace kinlab
