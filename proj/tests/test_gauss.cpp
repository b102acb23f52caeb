#include <cmath>
#include <doctest.h>
#include <numbers>

#include "swmode/gauss.hpp"

using namespace swmode;

TEST_CASE("gauss rule integrates polynomials exactly") {
  const GaussRule& rule = gauss_legendre(8);
  // degree 15 is the highest exact degree for 8 nodes
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * std::pow(rule.nodes[i], 14);
  CHECK(acc == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("composite rule handles oscillatory integrands") {
  const double k = 37.0;
  const double val = gauss_composite([k](double x) { return std::cos(k * x); }, 0.0, 2.0,
                                     64, 16);
  CHECK(val == doctest::Approx(std::sin(2.0 * k) / k).epsilon(1e-12));
}

TEST_CASE("adaptive doubling converges and reports") {
  auto f = [](double x) { return std::exp(-x) * std::sin(20.0 * x); };
  AdaptiveResult r = gauss_adaptive(f, 0.0, 5.0, 1e-12);
  CHECK(r.converged);
  const double exact = 20.0 / 401.0 * (1.0 - std::exp(-5.0) * (std::cos(100.0) +
                                                              std::sin(100.0) / 20.0));
  // int e^{-x} sin(kx) = k/(1+k^2) [1 - e^{-X}(cos kX + sin kX / k)]
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("breakpoint mesh refinement converges on a peaked integrand") {
  auto f = [](double x) { return 1.0 / (1e-4 + (x - 0.9) * (x - 0.9)); };
  std::vector<double> breaks = {0.0, 0.5, 0.85, 0.95, 1.0};
  AdaptiveResult r = gauss_adaptive_breakpoints(f, breaks, 1e-10);
  CHECK(r.converged);
  const double exact = (std::atan((1.0 - 0.9) / 1e-2) - std::atan((0.0 - 0.9) / 1e-2)) / 1e-2;
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-9));
}
