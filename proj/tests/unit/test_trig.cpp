#include <doctest.h>

#include <cmath>

#include "kinlab/errors.hpp"
#include "kinlab/quadrature.hpp"
#include "kinlab/trig.hpp"

using namespace kinlab;

namespace {

Vec sample(const MomentumGrid& g, double shift = 0.0) {
  Vec f(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    const double k = g.point(i)[0] - shift;
    f[i] = 1.5 + std::cos(2 * k) + 0.3 * std::sin(5 * k);
  }
  return f;
}

}  // namespace

TEST_CASE("shift by one grid spacing permutes data without Nyquist content") {
  const int n = 12;
  const MomentumGrid g(1, n);
  const Mat t = shift_matrix_1d(n, kTwoPi / n);
  const Vec f = sample(g);
  const Vec moved = t * f;
  for (int j = 0; j < n; ++j) CHECK(std::abs(moved[j] - f[(j - 1 + n) % n]) < 1e-12);
  // the Nyquist mode is left in place so that shifts compose exactly
  Vec nyq(n);
  for (int j = 0; j < n; ++j) nyq[j] = (j % 2 == 0) ? 1.0 : -1.0;
  CHECK((t * nyq - nyq).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("shifts compose and are exact on band-limited data") {
  const MomentumGrid g(1, 16);
  const Mat a = shift_matrix_1d(16, 0.3), b = shift_matrix_1d(16, 0.45), ab = shift_matrix_1d(16, 0.75);
  CHECK((a * b - ab).cwiseAbs().maxCoeff() < 1e-13);
  const Vec shifted = shift_grid_function(g, sample(g), Vec::Constant(1, 0.37));
  CHECK((shifted - sample(g, 0.37)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((shift_matrix(g, Vec::Constant(1, 0.37)) * sample(g) - shifted).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two-dimensional shift is the tensor product") {
  const MomentumGrid g(2, 8);
  Vec f(g.size()), expect(g.size());
  Vec s(2);
  s << 0.2, -0.5;
  for (Index i = 0; i < g.size(); ++i) {
    const Vec k = g.point(i);
    f[i] = std::cos(k[0]) * std::sin(2 * k[1]);
    expect[i] = std::cos(k[0] - s[0]) * std::sin(2 * (k[1] - s[1]));
  }
  CHECK((shift_grid_function(g, f, s) - expect).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((shift_matrix(g, s) * f - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trigonometric interpolant") {
  const MomentumGrid g(1, 16);
  const TrigInterpolant p(g, sample(g));
  for (Index i = 0; i < g.size(); ++i) CHECK(p(g.point(i)) == doctest::Approx(sample(g)[i]).epsilon(1e-13));
  const double x = 0.4321;
  CHECK(p(Vec::Constant(1, x)) == doctest::Approx(1.5 + std::cos(2 * x) + 0.3 * std::sin(5 * x)).epsilon(1e-13));
  CHECK(p.refined_max(8) >= sample(g).maxCoeff());
  CHECK_THROWS_AS(TrigInterpolant(g, Vec::Zero(5)), InvalidInput);
}

TEST_CASE("interpolant in two dimensions") {
  const MomentumGrid g(2, 8);
  Vec f(g.size());
  for (Index i = 0; i < g.size(); ++i) f[i] = std::cos(g.point(i)[0] - 2 * g.point(i)[1]);
  const TrigInterpolant p(g, f);
  Vec k(2);
  k << 0.3, -1.2;
  CHECK(p(k) == doctest::Approx(std::cos(0.3 + 2.4)).epsilon(1e-12));
}

TEST_CASE("line integral along the drift is exact") {
  // int_0^t cos(k + c (s - t)) ds = (sin k - sin(k - c t)) / c
  const MomentumGrid g(1, 16);
  Vec f(g.size());
  for (Index i = 0; i < g.size(); ++i) f[i] = std::cos(g.point(i)[0]);
  const TrigInterpolant p(g, f);
  const double c = 0.7, t = 1.3;
  const Vec li = p.line_integral(Vec::Constant(1, c), t);
  for (Index i = 0; i < g.size(); ++i) {
    const double k = g.point(i)[0];
    CHECK(li[i] == doctest::Approx((std::sin(k) - std::sin(k - c * t)) / c).epsilon(1e-12));
  }
  const Vec still = p.line_integral(Vec::Zero(1), t);
  CHECK((still - t * f).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Gauss-Legendre rules") {
  const auto r = gauss_legendre(5, -1.0, 2.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * std::pow(r.nodes[i], 9);
  CHECK(acc == doctest::Approx((std::pow(2.0, 10) - 1.0) / 10.0).epsilon(1e-13));
  CHECK(std::is_sorted(r.nodes.begin(), r.nodes.end()));
  const auto c = composite_gauss_legendre(8, 0.0, 10.0, 0.5);
  CHECK(c.nodes.size() == 160);
  double e = 0.0;
  for (std::size_t i = 0; i < c.nodes.size(); ++i) e += c.weights[i] * std::exp(-c.nodes[i]);
  CHECK(e == doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-14));
}
