#pragma once

#include <cstdint>

#include "wg/geometry.hpp"

namespace wg {

namespace detail {

// splitmix64; <random> distributions are implementation-defined and would
// break the bit-identical-trajectory contract across toolchains.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

}  // namespace detail

/// Feedforward network R^2 -> R with tanh hidden layers and a linear output;
/// parameters live in one flat vector (per layer: row-major weights, then
/// biases).
struct Mlp {
  std::vector<int> widths;  // {2, hidden..., 1}
  std::vector<double> theta;
  std::uint64_t seed = 0;
  std::vector<int> w_offset;
  std::vector<int> b_offset;

  int n_layers() const { return static_cast<int>(widths.size()) - 1; }
  int n_params() const { return static_cast<int>(theta.size()); }
  int max_width() const {
    int m = 0;
    for (int w : widths) m = std::max(m, w);
    return m;
  }
};

inline Mlp mlp_init(const std::vector<int>& hidden_widths, std::uint64_t seed) {
  Mlp net;
  net.seed = seed;
  net.widths.push_back(2);
  for (int w : hidden_widths) {
    require(w >= 1, "mlp_init: hidden width must be >= 1");
    net.widths.push_back(w);
  }
  net.widths.push_back(1);

  int offset = 0;
  for (int l = 0; l < net.n_layers(); ++l) {
    net.w_offset.push_back(offset);
    offset += net.widths[l + 1] * net.widths[l];
    net.b_offset.push_back(offset);
    offset += net.widths[l + 1];
  }
  net.theta.assign(offset, 0.0);

  detail::SplitMix64 rng(seed);
  for (int l = 0; l < net.n_layers(); ++l) {
    int fan_in = net.widths[l], fan_out = net.widths[l + 1];
    double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (int i = 0; i < fan_out * fan_in; ++i)
      net.theta[net.w_offset[l] + i] = rng.uniform(-bound, bound);
  }
  return net;
}

/// Scratch buffers reused across evaluations of one network.
struct MlpWorkspace {
  std::vector<double> act;    // activations of all layers, concatenated
  std::vector<double> delta;  // back-propagated sensitivities
  std::vector<int> act_offset;

  void resize_for(const Mlp& net) {
    act_offset.clear();
    int total = 0;
    for (int w : net.widths) {
      act_offset.push_back(total);
      total += w;
    }
    act.assign(total, 0.0);
    delta.assign(total, 0.0);
  }
};

/// Forward pass; activations of every layer stay in the workspace so a
/// backward pass can follow.
inline double mlp_forward(const Mlp& net, Vec2 p, MlpWorkspace& ws) {
  if (ws.act_offset.size() != net.widths.size()) ws.resize_for(net);
  double* a0 = ws.act.data() + ws.act_offset[0];
  a0[0] = p.x;
  a0[1] = p.y;
  for (int l = 0; l < net.n_layers(); ++l) {
    const double* w = net.theta.data() + net.w_offset[l];
    const double* b = net.theta.data() + net.b_offset[l];
    const double* in = ws.act.data() + ws.act_offset[l];
    double* out = ws.act.data() + ws.act_offset[l + 1];
    int nin = net.widths[l], nout = net.widths[l + 1];
    bool hidden = l + 1 < net.n_layers();
    for (int i = 0; i < nout; ++i) {
      double s = b[i];
      const double* wi = w + i * nin;
      for (int j = 0; j < nin; ++j) s += wi[j] * in[j];
      out[i] = hidden ? std::tanh(s) : s;
    }
  }
  return ws.act[ws.act_offset.back()];
}

inline std::vector<double> mlp_forward_batch(const Mlp& net, const std::vector<Vec2>& points) {
  MlpWorkspace ws;
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = mlp_forward(net, points[i], ws);
  return out;
}

/// Accumulates dL/dtheta into grad for one point whose activations are in ws
/// and whose upstream sensitivity is dL/d(output).
inline void mlp_backward_accumulate(const Mlp& net, double upstream, MlpWorkspace& ws,
                                    std::vector<double>& grad) {
  ws.delta[ws.act_offset.back()] = upstream;
  for (int l = net.n_layers() - 1; l >= 0; --l) {
    const double* w = net.theta.data() + net.w_offset[l];
    const double* in = ws.act.data() + ws.act_offset[l];
    const double* dout = ws.delta.data() + ws.act_offset[l + 1];
    double* din = ws.delta.data() + ws.act_offset[l];
    double* gw = grad.data() + net.w_offset[l];
    double* gb = grad.data() + net.b_offset[l];
    int nin = net.widths[l], nout = net.widths[l + 1];
    for (int j = 0; j < nin; ++j) din[j] = 0.0;
    for (int i = 0; i < nout; ++i) {
      double d = dout[i];
      if (d == 0.0) continue;
      gb[i] += d;
      const double* wi = w + i * nin;
      double* gwi = gw + i * nin;
      for (int j = 0; j < nin; ++j) {
        gwi[j] += d * in[j];
        din[j] += d * wi[j];
      }
    }
    if (l > 0) {
      // tanh'(z) = 1 - tanh(z)^2, read off the stored activation
      for (int j = 0; j < nin; ++j) din[j] *= 1.0 - in[j] * in[j];
    }
  }
}

/// Chain-rule gradient of any scalar L that reaches theta only through the
/// network values at a fixed point set: dL/dtheta from dL/d(values).
inline std::vector<double> backprop_through_points(const Mlp& net, const std::vector<Vec2>& points,
                                                   const std::vector<double>& upstream) {
  require(points.size() == upstream.size(), "backprop_through_points: size mismatch");
  std::vector<double> grad(net.n_params(), 0.0);
  MlpWorkspace ws;
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(std::isfinite(upstream[i]), "backprop_through_points: non-finite upstream value");
    if (upstream[i] == 0.0) continue;
    mlp_forward(net, points[i], ws);
    mlp_backward_accumulate(net, upstream[i], ws, grad);
  }
  for (double g : grad)
    require(std::isfinite(g), "backprop_through_points: non-finite gradient");
  return grad;
}

/// Adam with bias correction; a descent step (pass the gradient of the loss
/// being minimized).
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(int n_params) : m(n_params, 0.0), v(n_params, 0.0) {}
};

inline void adam_step(AdamState& state, std::vector<double>& theta,
                      const std::vector<double>& grad, double lr) {
  require(theta.size() == grad.size() && theta.size() == state.m.size(),
          "adam_step: size mismatch");
  state.t += 1;
  double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    double mhat = state.m[i] / bc1;
    double vhat = state.v[i] / bc2;
    theta[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

}  // namespace wg
