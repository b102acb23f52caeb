#include "swmode/gauss.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace swmode {

namespace {

// Newton iteration on the Legendre polynomial, seeded with the Chebyshev
// approximation of the k-th root.
GaussRule compute_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[k] = -x;
    rule.weights[k] = w;
    rule.nodes[n - 1 - k] = x;
    rule.weights[n - 1 - k] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

double gauss_panel(const std::function<double(double)>& f, double a, double b,
                   const GaussRule& rule) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

double gauss_composite(const std::function<double(double)>& f, double a, double b,
                       int n_panels, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double h = (b - a) / n_panels;
  double sum = 0.0;
  for (int p = 0; p < n_panels; ++p) sum += gauss_panel(f, a + p * h, a + (p + 1) * h, rule);
  return sum;
}

double gauss_breakpoints(const std::function<double(double)>& f,
                         const std::vector<double>& breakpoints,
                         int panels_per_interval, int order) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    sum += gauss_composite(f, breakpoints[i], breakpoints[i + 1], panels_per_interval, order);
  return sum;
}

AdaptiveResult gauss_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol, int base_panels, int max_doublings, int order) {
  AdaptiveResult res;
  int panels = base_panels;
  double prev = gauss_composite(f, a, b, panels, order);
  for (int d = 0; d < max_doublings; ++d) {
    panels *= 2;
    double cur = gauss_composite(f, a, b, panels, order);
    double scale = std::max({std::abs(cur), std::abs(prev), 1e-300});
    if (std::abs(cur - prev) <= rel_tol * scale) {
      res.value = cur;
      res.converged = true;
      res.panels_used = panels;
      return res;
    }
    prev = cur;
  }
  res.value = prev;
  res.converged = false;
  res.panels_used = panels;
  return res;
}

AdaptiveResult gauss_adaptive_breakpoints(const std::function<double(double)>& f,
                                          std::vector<double> breakpoints,
                                          double rel_tol, int max_doublings, int order) {
  AdaptiveResult res;
  double prev = gauss_breakpoints(f, breakpoints, 1, order);
  for (int d = 0; d < max_doublings; ++d) {
    std::vector<double> refined;
    refined.reserve(breakpoints.size() * 2);
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
      refined.push_back(breakpoints[i]);
      refined.push_back(0.5 * (breakpoints[i] + breakpoints[i + 1]));
    }
    refined.push_back(breakpoints.back());
    breakpoints.swap(refined);
    double cur = gauss_breakpoints(f, breakpoints, 1, order);
    double scale = std::max({std::abs(cur), std::abs(prev), 1e-300});
    if (std::abs(cur - prev) <= rel_tol * scale) {
      res.value = cur;
      res.converged = true;
      res.panels_used = static_cast<int>(breakpoints.size()) - 1;
      return res;
    }
    prev = cur;
  }
  res.value = prev;
  res.converged = false;
  res.panels_used = static_cast<int>(breakpoints.size()) - 1;
  return res;
}

}  // namespace swmode
