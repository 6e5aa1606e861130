#include "kinlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <boost/math/special_functions/legendre.hpp>

#include "kinlab/errors.hpp"

namespace kinlab {

namespace {

// Reference rule on [-1, 1], cached per order.
const QuadratureRule& reference_rule(int order) {
  static std::mutex mutex;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  QuadratureRule rule;
  for (double x : boost::math::legendre_p_zeros<double>(order)) {
    const double dp = boost::math::legendre_p_prime(order, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes.push_back(x);
    rule.weights.push_back(w);
    if (x != 0.0) {
      rule.nodes.push_back(-x);
      rule.weights.push_back(w);
    }
  }
  std::vector<std::size_t> perm(rule.nodes.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](auto a, auto b) { return rule.nodes[a] < rule.nodes[b]; });
  QuadratureRule sorted;
  for (auto p : perm) {
    sorted.nodes.push_back(rule.nodes[p]);
    sorted.weights.push_back(rule.weights[p]);
  }
  return cache.emplace(order, std::move(sorted)).first->second;
}

}  // namespace

QuadratureRule gauss_legendre(int order, double a, double b) {
  if (order < 1) throw InvalidInput("quadrature order must be positive");
  const QuadratureRule& ref = reference_rule(order);
  QuadratureRule out;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
    out.nodes.push_back(mid + half * ref.nodes[i]);
    out.weights.push_back(half * ref.weights[i]);
  }
  return out;
}

QuadratureRule composite_gauss_legendre(int order, double a, double b, double max_panel) {
  if (!(b > a)) return {};
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
  const double len = (b - a) / panels;
  QuadratureRule out;
  for (int p = 0; p < panels; ++p) {
    QuadratureRule r = gauss_legendre(order, a + p * len, a + (p + 1) * len);
    out.nodes.insert(out.nodes.end(), r.nodes.begin(), r.nodes.end());
    out.weights.insert(out.weights.end(), r.weights.begin(), r.weights.end());
  }
  return out;
}

}  // namespace kinlab
