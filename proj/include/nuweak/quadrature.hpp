#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>

// Composite Gauss-Legendre quadrature with self-convergent node doubling.
// Good for Gaussian-damped oscillatory integrands as long as the node count
// resolves the total phase variation; callers estimate an initial node count
// from a cycle heuristic and the driver doubles until two successive passes
// agree.

namespace nuweak::quadrature {

namespace detail {

constexpr int kPanelOrder = 16;

struct PanelRule {
  std::array<double, kPanelOrder> nodes{};    // on [-1, 1]
  std::array<double, kPanelOrder> weights{};
};

// Newton iteration on P_n; standard construction of the n-point rule.
inline PanelRule make_panel_rule() {
  PanelRule rule;
  const int n = kPanelOrder;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

inline const PanelRule& panel_rule() {
  static const PanelRule rule = make_panel_rule();
  return rule;
}

}  // namespace detail

// Fixed-node composite rule; `nodes` is rounded up to a whole number of
// 16-point panels.
template <typename F>
auto integrate(F&& f, double a, double b, int nodes)
    -> decltype(f(0.0)) {
  using R = decltype(f(0.0));
  if (!(b > a)) throw std::invalid_argument("quadrature: empty interval");
  if (nodes < 1) throw std::invalid_argument("quadrature: nodes < 1");
  const auto& rule = detail::panel_rule();
  const int panels = (nodes + detail::kPanelOrder - 1) / detail::kPanelOrder;
  const double h = (b - a) / panels;
  R total{};
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    R acc{};
    for (int i = 0; i < detail::kPanelOrder; ++i) {
      acc += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    }
    total += (0.5 * h) * acc;
  }
  return total;
}

template <typename R>
struct AdaptiveResult {
  R value{};
  double self_delta = 0.0;  // |last - previous| of the doubling sequence
  int nodes = 0;
  bool converged = false;
};

// Doubles the node count until two passes agree to `rel_tol` relative (with
// `abs_floor` guarding the scale) or `max_nodes` is hit. Disagreement at the
// cap is reported through `converged`, not an exception: downstream
// tolerances decide whether the value is usable.
template <typename F>
auto integrate_adaptive(F&& f, double a, double b, int initial_nodes,
                        int max_nodes, double rel_tol, double abs_floor = 0.0)
    -> AdaptiveResult<decltype(f(0.0))> {
  using R = decltype(f(0.0));
  AdaptiveResult<R> out;
  int n = initial_nodes;
  R prev = integrate(f, a, b, n);
  while (2 * n <= max_nodes) {
    n *= 2;
    const R cur = integrate(f, a, b, n);
    const double delta = std::abs(cur - prev);
    const double scale = std::max(std::abs(cur), abs_floor);
    out.value = cur;
    out.self_delta = delta;
    out.nodes = n;
    if (delta <= rel_tol * scale) {
      out.converged = true;
      return out;
    }
    prev = cur;
  }
  if (out.nodes == 0) {
    out.value = prev;
    out.nodes = n;
  }
  return out;
}

}  // namespace nuweak::quadrature
