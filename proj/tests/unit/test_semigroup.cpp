#include <doctest.h>

#include <cmath>
#include <random>

#include "kinlab/errors.hpp"
#include "kinlab/semigroup.hpp"
#include "kinlab/transport.hpp"

using namespace kinlab;

namespace {

KineticModel model(int n = 32) {
  return KineticModel(DispersionLaw::cosine(1), MomentumGrid(1, n), SpectralDensity::analytic(ReservoirSpec{}));
}

Vec bump(const KineticModel& m) {
  Vec f(m.size());
  for (Index i = 0; i < m.size(); ++i) f[i] = std::exp(std::cos(m.grid().point(i)[0] - 0.4));
  return f / (m.weight() * f.sum());
}

}  // namespace

TEST_CASE("free-loss semigroup at rest is exp(L t)") {
  const auto m = model();
  const Vec f = bump(m);
  const Vec got = free_loss_apply(m, Vec::Zero(1), 0.2, f);
  const Vec expect = (m.loss() * 0.2).array().exp() * f.array();
  CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-13);
  CHECK_THROWS_AS(free_loss_apply(m, Vec::Zero(1), -1.0, f), DomainError);
}

TEST_CASE("free-loss semigroup with drift transports and damps") {
  const auto m = model();
  const FreeLossSemigroup s(m, Vec::Constant(1, 0.5));
  const Vec f = bump(m);
  // semigroup property, up to aliasing of the shifted decay factor
  const Vec two = s.apply(0.1, s.apply(0.15, f));
  CHECK((two - s.apply(0.25, f)).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(s.decay_factor(0.3).maxCoeff() < 1.0);
}

TEST_CASE("three evolution routes agree") {
  const auto m = model();
  const Vec f = bump(m);
  for (double chi : {0.0, 0.2}) {
    const Vec c = Vec::Constant(1, chi);
    const double t = 0.3;
    const Vec eig = EigenEvolver(m.generator(c)).apply_real(t, f);
    const Vec rk = rk4_evolve(m.generator(c), t, f);
    const auto dy = dyson_evolve(m, c, t, f);
    CHECK(dy.converged);
    CHECK((eig - rk).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((eig - dy.state).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("Dyson series reports truncation") {
  const auto m = model(16);
  DysonOptions o;
  o.order_cap = 2;
  CHECK_THROWS_AS(dyson_evolve(m, Vec::Zero(1), 1.0, bump(m), o), TruncationError);
}

TEST_CASE("conservation and positivity improvement") {
  const auto m = model();
  const EigenEvolver ev(m.generator(Vec::Constant(1, 0.2)));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int p = 0; p < 10; ++p) {
    // sparse nonnegative probe: a few random spikes
    Vec f = Vec::Zero(m.size());
    for (int s = 0; s < 3; ++s) f[static_cast<Index>(u(rng) * m.size())] += u(rng) + 0.1;
    const Vec g = ev.apply_real(0.5, f);
    CHECK(m.weight() * std::abs(g.sum() - f.sum()) < 1e-8 * m.weight() * f.sum());
    CHECK(g.minCoeff() > 0.0);
  }
}

TEST_CASE("evolve driver") {
  const auto m = model();
  const StationaryState st = stationary_state(m, Vec::Zero(1));
  const auto r = evolve(m, Vec::Zero(1), bump(m), {0.0, 0.1, 0.2}, "rk4", &st.zeta);
  REQUIRE(r.states.size() == 3);
  for (double mass : r.mass) CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.distance[2] < r.distance[0]);
  CHECK_THROWS_AS(evolve(m, Vec::Zero(1), bump(m), {0.1}, "euler"), InvalidInput);
}

TEST_CASE("relaxation rate matches the spectral gap") {
  const auto m = model(64);
  const Mat g = m.generator(Vec::Zero(1));
  const Vec zeta = m.gibbs();
  const auto fit = relaxation_rate(g, zeta, bump(m));
  CHECK(std::abs(fit.rate - fit.gap) / fit.gap < 0.05);
  CHECK_THROWS_AS(relaxation_rate(g, zeta, zeta), FitUnreliable);
}
