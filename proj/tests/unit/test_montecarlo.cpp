#include <doctest.h>

#include <cmath>
#include <set>

#include "kinlab/errors.hpp"
#include "kinlab/fiberlimit.hpp"
#include "kinlab/montecarlo.hpp"

using namespace kinlab;

namespace {

KineticModel model(int n = 32) {
  return KineticModel(DispersionLaw::cosine(1), MomentumGrid(1, n), SpectralDensity::analytic(ReservoirSpec{}));
}

}  // namespace

TEST_CASE("per-trajectory streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(stream_seed(42, i));
  CHECK(seen.size() == 1000);
  CHECK(stream_seed(42, 7) == stream_seed(42, 7));
  CHECK(stream_seed(42, 7) != stream_seed(43, 7));
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform01(rng);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("thinning on a frozen-rate toy gives exponential waiting times") {
  const auto m = model();
  const auto p = make_frozen_process(m, Vec::Zero(1), 2.0);
  const auto tr = simulate_trajectory(p, 5000.0, 7);
  std::vector<double> gaps;
  double prev = 0.0;
  for (double t : tr.jump_times) {
    gaps.push_back(t - prev);
    prev = t;
  }
  REQUIRE(gaps.size() > 5000);
  const auto ks = ks_test_exponential(gaps, 2.0);
  CHECK(ks.p_value > 0.01);
  // a wrong rate is rejected
  CHECK(ks_test_exponential(gaps, 2.5).p_value < 0.01);
}

TEST_CASE("free streaming without coupling follows the closed form") {
  const auto m = model();
  for (double chi : {0.0, 0.3}) {
    const auto p = make_frozen_process(m, Vec::Constant(1, chi), 0.0);
    const double tau = 7.5;
    const auto tr = simulate_trajectory(p, tau, 3);
    CHECK(tr.jump_times.empty());
    const double k0 = tr.k0[0];
    const double x = chi == 0.0 ? 2 * std::sin(k0) * tau : (2 / chi) * (std::cos(k0) - std::cos(k0 + chi * tau));
    CHECK(tr.x_final[0] == doctest::Approx(x).epsilon(1e-12));
    CHECK(tr.k_final[0] == doctest::Approx(wrap_to_torus(k0 + chi * tau)).epsilon(1e-12));
  }
}

TEST_CASE("acceptance fraction matches mean R / R_max") {
  const auto m = model();
  const auto p = make_jump_process(m, Vec::Zero(1));
  McSettings s;
  s.n_traj = 400;
  s.horizon = 20.0;
  const auto est = ensemble_run(p, s);
  const double expect = m.weight() * m.gibbs().dot(m.table().escape) / p.r_max;
  // about 1e5 candidate events: binomial error below 2e-3
  CHECK(std::abs(est.acceptance - expect) < 5e-3);
  CHECK(est.histogram.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(est.histogram.minCoeff() > 0.0);
  CHECK(est.v_stderr[0] > 0.0);
  CHECK(est.D_stderr(0, 0) > 0.0);
}

TEST_CASE("ensemble output is reproducible and independent of the worker count") {
  const auto m = model();
  const auto p = make_jump_process(m, Vec::Constant(1, 0.2));
  McSettings s;
  s.n_traj = 160;
  s.horizon = 10.0;
  s.threads = 1;
  const auto a = ensemble_run(p, s);
  const auto b = ensemble_run(p, s);
  s.threads = 4;
  const auto c = ensemble_run(p, s);
  CHECK(a.v_hat[0] == b.v_hat[0]);
  CHECK(a.v_hat[0] == c.v_hat[0]);
  CHECK(a.D_hat(0, 0) == c.D_hat(0, 0));
  CHECK((a.histogram - c.histogram).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("standard errors shrink like one over root n") {
  const auto m = model();
  const auto p = make_jump_process(m, Vec::Zero(1));
  std::vector<double> ns, errs;
  for (int n : {100, 1000, 10000}) {
    McSettings s;
    s.n_traj = n;
    s.horizon = 5.0;
    s.seed = 99;
    const auto est = ensemble_run(p, s);
    ns.push_back(n);
    errs.push_back(est.v_stderr[0]);
  }
  const double slope = log_log_slope(ns, errs);
  CHECK(slope > -0.6);
  CHECK(slope < -0.4);
}

TEST_CASE("invalid settings") {
  const auto m = model(8);
  const auto p = make_jump_process(m, Vec::Zero(1));
  McSettings s;
  s.n_traj = 50;
  CHECK_THROWS_AS(ensemble_run(p, s), InvalidInput);
  s.n_traj = 200;
  s.burn_in = 1.0;
  CHECK_THROWS_AS(ensemble_run(p, s), InvalidInput);
  CHECK_THROWS_AS(simulate_trajectory(p, 0.0, 1), InvalidInput);
  const auto tab = KineticModel(DispersionLaw::tabulated(MomentumGrid(1, 8), DispersionLaw::cosine(1).energies(MomentumGrid(1, 8))),
                                MomentumGrid(1, 8), SpectralDensity::analytic(ReservoirSpec{}));
  CHECK_THROWS_AS(make_jump_process(tab, Vec::Constant(1, 0.1)), UnsupportedConfiguration);
  CHECK_NOTHROW(make_jump_process(tab, Vec::Zero(1)));
}
