#include "kinlab/generator.hpp"

#include <cmath>

#include <fmt/format.h>

#include "kinlab/errors.hpp"

namespace kinlab {

double norm_inf(const CMat& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }
double norm_inf(const Mat& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

JumpRateTable build_rates(const DispersionLaw& law, const MomentumGrid& grid, const SpectralDensity& sd) {
  if (law.dim() != grid.dim()) throw InvalidInput("dispersion and grid dimensions differ");
  JumpRateTable t{grid, law.energies(grid), Mat(grid.size(), grid.size()), Vec(grid.size()), sd.beta()};
  const Index n = grid.size();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double r = sd(t.energies[j] - t.energies[i]);
      if (!std::isfinite(r)) throw RateTableError(fmt::format("non-finite rate between points {} and {}", i, j));
      t.rates(i, j) = r;
    }
  }
  t.escape = grid.weight() * t.rates.rowwise().sum();
  return t;
}

Mat build_gain(const JumpRateTable& table) { return table.grid.weight() * table.rates.transpose(); }

Vec build_loss(const JumpRateTable& table) { return -table.escape; }

Mat build_drift(const MomentumGrid& grid, const Vec& chi, DriftScheme scheme) {
  if (chi.size() != grid.dim()) throw InvalidInput("chi has wrong dimension");
  Mat out = Mat::Zero(grid.size(), grid.size());
  for (int a = 0; a < grid.dim(); ++a) {
    if (chi[a] == 0.0) continue;
    if (scheme == DriftScheme::spectral) {
      out -= chi[a] * derivative_matrix(grid, a, Differencing::spectral);
      continue;
    }
    // first-order upwind: the profile moves toward +chi
    const double h = grid.spacing();
    const Index stride = grid.stride(a);
    const int n = grid.n_per_axis();
    for (Index i = 0; i < grid.size(); ++i) {
      const int m = grid.axis_index(i, a);
      const Index base = i - m * stride;
      if (chi[a] > 0.0) {
        out(i, i) -= chi[a] / h;
        out(i, base + ((m + n - 1) % n) * stride) += chi[a] / h;
      } else {
        out(i, i) += chi[a] / h;
        out(i, base + ((m + 1) % n) * stride) -= chi[a] / h;
      }
    }
  }
  return out;
}

CVec build_advection(const DispersionLaw& law, const MomentumGrid& grid, const CVec& kappa) {
  if (kappa.size() != grid.dim()) throw InvalidInput("kappa has wrong dimension");
  const Mat vel = law.velocities(grid);
  return cplx(0.0, 1.0) * (vel.cast<cplx>() * kappa);
}

double min_escape_rate(const JumpRateTable& table) {
  const double a0 = table.escape.minCoeff();
  if (!(a0 > 1e-14)) throw DegenerateRates(fmt::format("minimal escape rate {} is not positive", a0));
  return a0;
}

KineticModel::KineticModel(DispersionLaw law, MomentumGrid grid, SpectralDensity sd, DriftScheme scheme)
    : law_(std::move(law)),
      sd_(std::move(sd)),
      table_(build_rates(law_, grid, sd_)),
      gain_(build_gain(table_)),
      loss_(build_loss(table_)),
      velocities_(law_.velocities(grid)),
      scheme_(scheme) {}

Mat KineticModel::collision() const {
  Mat m = gain_;
  m.diagonal() += loss_;
  return m;
}

Mat KineticModel::drift(const Vec& chi) const { return build_drift(grid(), chi, scheme_); }

Mat KineticModel::generator(const Vec& chi) const {
  Mat m = collision();
  if (chi.size() != dim()) throw InvalidInput("chi has wrong dimension");
  if (chi.cwiseAbs().maxCoeff() > 0.0) m += drift(chi);
  return m;
}

CMat KineticModel::generator(const CVec& kappa, const Vec& chi) const {
  if (kappa.size() != dim()) throw InvalidInput("kappa has wrong dimension");
  CMat m = generator(chi).cast<cplx>();
  m.diagonal() += cplx(0.0, 1.0) * (velocities_.cast<cplx>() * kappa);
  return m;
}

Vec KineticModel::gibbs() const {
  const double emin = energies().minCoeff();
  Vec g = (-beta() * (energies().array() - emin)).exp().matrix();
  return g / (weight() * g.sum());
}

GeneratorMatrix KineticModel::assemble(const CVec& kappa, const Vec& chi, GeneratorTerms terms) const {
  if (kappa.size() != dim() || chi.size() != dim()) throw InvalidInput("kappa/chi have wrong dimension");
  const Index n = size();
  CMat m = CMat::Zero(n, n);
  if (terms.gain) m += gain_.cast<cplx>();
  if (terms.loss) m.diagonal() += loss_.cast<cplx>();
  if (terms.drift && chi.cwiseAbs().maxCoeff() > 0.0) m += drift(chi).cast<cplx>();
  if (terms.advection) m.diagonal() += build_advection(law_, grid(), kappa);

  if (gain_.minCoeff() < 0.0) throw AssemblyError("gain matrix has a negative entry");
  const double a0 = min_escape_rate(table_);
  if (loss_.maxCoeff() > -a0 * (1.0 - 1e-12)) throw AssemblyError("loss diagonal exceeds -a0");

  // probability conservation: every column of G + L - chi.grad sums to zero
  if (terms.gain && terms.loss) {
    CMat cons = m;
    if (terms.advection) cons.diagonal() -= build_advection(law_, grid(), kappa);
    const double scale = norm_inf(cons);
    const double defect = cons.colwise().sum().cwiseAbs().maxCoeff();
    if (defect > 1e-10 * scale)
      throw AssemblyError(fmt::format("column sums violate conservation by {} (scale {})", defect, scale));
  }
  return GeneratorMatrix{grid(), kappa, chi, std::move(m), terms, scheme_, weight()};
}

GeneratorMatrix assemble_generator(const DispersionLaw& law, const MomentumGrid& grid, const SpectralDensity& sd,
                                   const CVec& kappa, const Vec& chi) {
  return KineticModel(law, grid, sd).assemble(kappa, chi);
}

}  // namespace kinlab
