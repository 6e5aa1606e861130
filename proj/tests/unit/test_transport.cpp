#include <doctest.h>

#include <cmath>

#include "kinlab/errors.hpp"
#include "kinlab/transport.hpp"

using namespace kinlab;

// Reference numbers come from an independent numpy/scipy construction of the
// same n = 64 grid model (dense eig, least-squares Green-Kubo solve).

namespace {

KineticModel model(int n = 64, double beta = 1.0) {
  ReservoirSpec s;
  s.beta = beta;
  return KineticModel(DispersionLaw::cosine(1), MomentumGrid(1, n), SpectralDensity::analytic(s));
}

}  // namespace

TEST_CASE("stationary state at rest is Gibbs") {
  const auto m = model();
  const auto st = stationary_state(m, Vec::Zero(1));
  CHECK((st.zeta - m.gibbs()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(st.gap == doctest::Approx(1.76344882998101).epsilon(1e-9));
  CHECK(velocity(st, m).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("driven stationary state") {
  const auto m = model();
  const auto st = stationary_state(m, Vec::Constant(1, 0.2));
  CHECK(st.zeta.minCoeff() > 0.0);
  CHECK(m.weight() * st.zeta.sum() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(velocity(st, m)[0] == doctest::Approx(0.0200985637098336).epsilon(1e-9));
}

TEST_CASE("eigenvalue branch") {
  const auto m = model();
  const BranchTracker at_rest(m, Vec::Zero(1));
  CHECK(std::abs(at_rest.at(Vec::Zero(1))) < 1e-12);
  const cplx u = at_rest.at(Vec::Constant(1, 0.1));
  CHECK(u.real() == doctest::Approx(-0.00100611715705422).epsilon(1e-9));
  CHECK(std::abs(u.imag()) < 1e-12);
  const BranchTracker driven(m, Vec::Constant(1, 0.2));
  const cplx a = driven.at(Vec::Constant(1, 0.1)), b = driven.at(Vec::Constant(1, -0.1));
  CHECK(std::abs(std::conj(a) - b) < 1e-10);
  const auto vc = velocity_crosscheck(driven);
  CHECK(vc.max_abs_diff < 1e-8);
}

TEST_CASE("three diffusion routes agree at rest") {
  const auto m = model();
  const BranchTracker br(m, Vec::Zero(1));
  const double rs = diffusion_rs(br.state(), m)(0, 0);
  const double fd = diffusion_fd(br).D(0, 0);
  const auto gk = green_kubo(m);
  CHECK(rs == doctest::Approx(0.100622541237452).epsilon(1e-9));
  CHECK(std::abs(rs - fd) / rs < 1e-5);
  CHECK(std::abs(rs - gk.D(0, 0)) / rs < 1e-5);
  CHECK(std::abs(rs - gk.D_quadrature(0, 0)) / rs < 1e-5);
  CHECK(rs > 0.0);
}

TEST_CASE("diffusion tensor in two dimensions is symmetric positive definite") {
  const KineticModel m(DispersionLaw::cosine(2, {1.0, 0.5}), MomentumGrid(2, 12),
                       SpectralDensity::analytic(ReservoirSpec{}));
  const auto st = stationary_state(m, Vec::Zero(2));
  const Mat d = diffusion_rs(st, m);
  CHECK((d - d.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  Eigen::SelfAdjointEigenSolver<Mat> es(d);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("spectrum sign") {
  const auto m = model(32);
  const auto sp = full_spectrum(m.generator(Vec::Constant(1, 0.5)));
  CHECK(sp.max_re_nonzero < 0.0);
  CHECK_THROWS_AS(full_spectrum(Mat(Mat::Identity(4, 4))), GeneratorSignError);
}

TEST_CASE("Einstein relation and its beta scaling") {
  const auto e1 = einstein_check(model());
  CHECK(e1.pass);
  CHECK(e1.rel_err < 1e-4);
  const auto e2 = einstein_check(model(64, 2.0));
  CHECK(e2.rel_err < 1e-4);
  // mobility / D equals beta on both sides
  const auto m2 = model(64, 2.0);
  const double d2 = diffusion_rs(stationary_state(m2, Vec::Zero(1)), m2)(0, 0);
  CHECK(e2.mobility(0, 0) / d2 == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("large-field scan") {
  const auto m = model();
  const auto scan = large_field_scan(m, {20.0, 40.0});
  REQUIRE(scan.rows.size() == 2);
  CHECK(scan.rows[1].v < scan.rows[0].v);
  CHECK(scan.rows[1].band_ratio > 0.9);
  const KineticModel m2(DispersionLaw::cosine(2), MomentumGrid(2, 8), SpectralDensity::analytic(ReservoirSpec{}));
  CHECK_THROWS_AS(large_field_scan(m2, {20.0}), UnsupportedConfiguration);
}
