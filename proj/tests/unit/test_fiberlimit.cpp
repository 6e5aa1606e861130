#include <doctest.h>

#include <cmath>

#include "kinlab/errors.hpp"
#include "kinlab/fiberlimit.hpp"

using namespace kinlab;

namespace {

KineticModel model(int n = 32) {
  return KineticModel(DispersionLaw::cosine(1), MomentumGrid(1, n), SpectralDensity::analytic(ReservoirSpec{}));
}

double rel(const CMat& a, const CMat& b) { return norm_inf(CMat(a - b)) / norm_inf(b); }

}  // namespace

TEST_CASE("phase integral") {
  const auto law = DispersionLaw::cosine(1);
  const Vec k = Vec::Constant(1, 0.8), chi = Vec::Constant(1, 0.3);
  CHECK(phase_integral(law, k, chi, 0.5, 0.0) == 0.0);
  CHECK(phase_integral(law, k, chi, 0.0, 2.0) == doctest::Approx(2.0 * law.energy(k)).epsilon(1e-15));
  CHECK(phase_integral(law, k, Vec::Zero(1), 0.7, 2.0) == doctest::Approx(2.0 * law.energy(k)).epsilon(1e-15));
  // d/dt Phi_k(t) = eps(k - lambda^2 chi t)
  const double lam = 0.6, t = 1.4, h = 1e-5;
  const double dphi = (phase_integral(law, k, chi, lam, t + h) - phase_integral(law, k, chi, lam, t - h)) / (2 * h);
  CHECK(dphi == doctest::Approx(law.energy(Vec(k - lam * lam * chi * t))).epsilon(1e-9));
  CHECK_THROWS_AS(phase_integral(law, k, chi, lam, -1.0), DomainError);
}

TEST_CASE("ladder blocks reproduce loss and gain at rest") {
  const auto m = model();
  const CorrelationTable table(m.density().spec());
  const CMat loss = CMat(m.loss().cast<cplx>().asDiagonal());
  const CMat gain = m.gain().cast<cplx>();
  const Vec zero = Vec::Zero(1);
  const auto a = build_fiber_ladder(m.law(), m.grid(), table, 1e-3, zero, zero);
  CHECK(a.limit);
  CHECK(a.tail_bound < 1e-8);
  CHECK(rel(CMat(a.ll + a.rr), loss) < 1e-4);
  CHECK(rel(CMat(a.lr + a.rl), gain) < 1e-4);
  // off-diagonal part of ll + rr vanishes
  CMat diag_free = a.ll + a.rr;
  diag_free.diagonal().setZero();
  CHECK(diag_free.cwiseAbs().maxCoeff() < 1e-12);
  const auto b = build_fiber_ladder(m.law(), m.grid(), table, 0.3, zero, zero);
  CHECK((a.total() - b.total()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(build_fiber_ladder(m.law(), m.grid(), table, 0.1, zero, zero, cplx(-0.1, 0.0)), DomainError);
}

TEST_CASE("free Liouvillian fiber") {
  const auto m = model(16);
  const Vec chi = Vec::Constant(1, 0.2);
  const CMat at_zero = free_liouvillian_fiber(m.law(), m.grid(), 0.1, Vec::Zero(1), chi);
  CHECK((at_zero - m.drift(chi).cast<cplx>()).cwiseAbs().maxCoeff() == 0.0);
  const CMat f = free_liouvillian_fiber(m.law(), m.grid(), 0.1, Vec::Constant(1, 0.5), chi);
  for (Index i = 0; i < 16; ++i) CHECK(std::abs(f(i, i).imag() - 0.5 * 2 * std::sin(m.grid().point(i)[0])) < 1e-4);
}

TEST_CASE("delta M") {
  const auto m = model();
  const CorrelationTable table(m.density().spec());
  CHECK(delta_m(m.law(), m.grid(), table, 0.1, Vec::Zero(1)).cwiseAbs().maxCoeff() == 0.0);
  const auto sc = delta_m_scaling(m, {0.2, 0.1, 0.05}, Vec::Constant(1, 0.2));
  CHECK(sc.exponent > 1.8);
  CHECK(sc.exponent < 2.2);
  for (double r : sc.halving_ratio) {
    CHECK(r > 3.5);
    CHECK(r < 4.5);
  }
  // the relative-bound constant is stable under halving
  CHECK(sc.bound_constant.back() / sc.bound_constant.front() == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("kinetic limit table") {
  const auto m = model();
  const auto t = kinetic_limit_error(m, {0.2, 0.1, 0.05}, Vec::Constant(1, 0.1), Vec::Constant(1, 0.2));
  CHECK(t.monotone);
  CHECK(t.order > 1.8);
  CHECK(t.rows.back().free_error < t.rows.front().free_error);
  const auto rest = kinetic_limit_error(m, {0.2, 0.1}, Vec::Zero(1), Vec::Zero(1));
  for (const auto& r : rest.rows) {
    CHECK(r.residual_rel < 1e-8);
    CHECK(r.dist_to_m == 0.0);
  }
  CHECK_THROWS_AS(kinetic_limit_error(m, {0.1, 0.2}, Vec::Zero(1), Vec::Zero(1)), InvalidInput);
}
