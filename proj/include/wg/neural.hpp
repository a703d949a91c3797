#pragma once

#include <functional>

#include "wg/expr.hpp"
#include "wg/mlp.hpp"

namespace wg {

/// Analytic boundary cutoff; vanishes on the boundary of the tagged domain
/// and is positive inside.
struct CutoffFunction {
  std::string domain;
  std::function<double(Vec2)> value;

  double operator()(Vec2 p) const { return value(p); }
};

// Smooth R-function set operations: f^g > 0 iff both positive, fvg > 0 iff
// either is. Unlike a product of boundary-line factors these stay nonzero on
// rays interior to the L-shape.
inline double smooth_and(double f, double g) { return f + g - std::sqrt(f * f + g * g); }
inline double smooth_or(double f, double g) { return f + g + std::sqrt(f * f + g * g); }

inline CutoffFunction cutoff(const std::string& domain) {
  CutoffFunction c;
  c.domain = domain;
  if (domain == "square") {
    c.value = [](Vec2 p) { return p.x * (1.0 - p.x) * p.y * (1.0 - p.y); };
  } else if (domain == "lshape") {
    c.value = [](Vec2 p) {
      double box = smooth_and(1.0 - p.x * p.x, 1.0 - p.y * p.y);
      double notch = smooth_or(-p.x, p.y);
      return smooth_and(box, notch);
    };
  } else {
    throw std::runtime_error("cutoff: unknown domain tag '" + domain + "'");
  }
  return c;
}

/// User-supplied cutoff from an expression in x and y; the caller is
/// responsible for it vanishing on the boundary of their domain.
inline CutoffFunction cutoff_expression(const std::string& expr) {
  CutoffFunction c;
  c.domain = "custom";
  c.value = Expression::parse(expr).as_function();
  return c;
}

/// Candidate n(x) = phi(x) * n_tilde(x); zero on the boundary by the cutoff.
struct NeuralCandidate {
  Mlp net;
  CutoffFunction phi;

  double eval(Vec2 p, MlpWorkspace& ws) const { return phi(p) * mlp_forward(net, p, ws); }

  std::vector<double> eval_batch(const std::vector<Vec2>& points) const {
    MlpWorkspace ws;
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = eval(points[i], ws);
    return out;
  }

  std::function<double(Vec2)> as_function() const {
    auto net_copy = net;
    auto phi_copy = phi;
    return [net_copy, phi_copy](Vec2 p) {
      MlpWorkspace ws;
      return phi_copy(p) * mlp_forward(net_copy, p, ws);
    };
  }
};

}  // namespace wg
