#pragma once

#include <functional>
#include <vector>

namespace swmode {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes and weights for an n-point Gauss-Legendre rule (cached for reuse).
const GaussRule& gauss_legendre(int n);

/// Integrate f over [a, b] with a single n-point panel.
double gauss_panel(const std::function<double(double)>& f, double a, double b,
                   const GaussRule& rule);

/// Composite rule: [a, b] split into n_panels equal panels.
double gauss_composite(const std::function<double(double)>& f, double a, double b,
                       int n_panels, int order = 16);

/// Composite rule over explicit breakpoints (each interval is one panel,
/// subdivided panels_per_interval times).
double gauss_breakpoints(const std::function<double(double)>& f,
                         const std::vector<double>& breakpoints,
                         int panels_per_interval = 1, int order = 16);

struct AdaptiveResult {
  double value = 0.0;
  bool converged = false;
  int panels_used = 0;
};

/// Panel-doubling quadrature: starts from base_panels equal panels and doubles
/// until successive values agree to rel_tol, up to max_doublings.
AdaptiveResult gauss_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol, int base_panels = 8, int max_doublings = 12,
                              int order = 16);

/// Same doubling scheme on a breakpoint mesh (each refinement level splits every
/// interval in two). Breakpoints let the caller pre-resolve known features.
AdaptiveResult gauss_adaptive_breakpoints(const std::function<double(double)>& f,
                                          std::vector<double> breakpoints,
                                          double rel_tol, int max_doublings = 12,
                                          int order = 16);

}  // namespace swmode
