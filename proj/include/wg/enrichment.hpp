#pragma once

#include <chrono>
#include <cstdlib>
#include <limits>
#include <thread>

#include "wg/lifting.hpp"

namespace wg {

inline int wgnet_thread_count() {
  if (const char* env = std::getenv("WGNET_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

struct TrainingConfig {
  std::vector<int> hidden{32, 32};
  int restarts = 4;
  int steps = 2000;
  double lr = 1e-3;
  std::uint64_t seed = 1;
  NeuralQuadConfig quad{4, 1};  // training-time quadrature, coarser than the lift
};

struct EnrichmentConfig {
  LiftMode mode = LiftMode::generalized;
  double tol_rel = 1e-4;  // stopping scale: |eta| < tol_rel * ||u0||_aw
  int max_enrichments = 8;
  double delta_norm = 1e-10;
  double schur_eps_factor = 1e-10;
  NeuralQuadConfig lift_quad{10, 2};
  TrainingConfig training;
  SolverConfig solver;
};

struct StepLog {
  int m = 0;
  double abs_j = std::numeric_limits<double>::quiet_NaN();   // training objective
  double eta = std::numeric_limits<double>::quiet_NaN();     // indicator, lift quadrature
  double energy = 0.0;                                       // J_h after the solve
  double err_aw = std::numeric_limits<double>::quiet_NaN();
  double eps_m = std::numeric_limits<double>::quiet_NaN();
  double ortho_residual = 0.0;
  std::vector<char> redundant;
  double train_seconds = 0.0;
  double solve_seconds = 0.0;
};

/// Base WG system plus the enrichment columns and the current Galerkin
/// solution over W_h^m.
struct EnrichedState {
  const WgSystem* sys = nullptr;
  ScalarField f;
  CutoffFunction phi;
  EnrichmentConfig cfg;
  DirichletReduction red;
  LiftContext ctx;  // lift-grade quadrature
  double baseline_norm_aw = 0.0;

  std::vector<LiftedNeuralFunction> columns;
  std::vector<std::vector<double>> col_full;  // a_w coupling columns, full dofs
  DenseMatrix d_mat{0, 0};
  std::vector<double> f_enr;
  std::vector<double> g_red;

  std::vector<double> x_full;  // polynomial part, boundary data embedded
  std::vector<double> alpha;
  std::vector<char> redundant;
  std::vector<Mlp> networks;  // trained candidates, for checkpointing
  double last_solve_residual = 0.0;

  std::vector<StepLog> log;
  std::string stop_reason;

  int m() const { return static_cast<int>(columns.size()); }
};

inline EnrichedState make_enriched_state(const WgSystem& sys, const ScalarField& f,
                                         const ScalarField& g, CutoffFunction phi,
                                         EnrichmentConfig cfg) {
  EnrichedState st;
  st.sys = &sys;
  st.f = f;
  st.phi = std::move(phi);
  st.cfg = cfg;
  st.red = apply_dirichlet(sys, g);
  st.ctx = make_lift_context(sys, cfg.lift_quad);
  auto sol = wg_solve(sys, st.red, cfg.solver);
  st.x_full = sol.u.coeffs;
  st.alpha.clear();
  st.baseline_norm_aw = norm_aw(sys, st.x_full);
  st.last_solve_residual = sol.cg.rel_residual;
  return st;
}

/// b - A u^(m) over the full dof space, the Riesz representation of the
/// residual functional R_h.
inline std::vector<double> residual_vector(const EnrichedState& st) {
  auto r = st.sys->a_full.apply(st.x_full);
  for (int i = 0; i < st.sys->n_dofs(); ++i) r[i] = st.sys->load[i] - r[i];
  for (int j = 0; j < st.m(); ++j)
    if (st.alpha[j] != 0.0) axpy(-st.alpha[j], st.col_full[j], r);
  return r;
}

inline double residual_functional(const EnrichedState& st, const std::vector<double>& v_full) {
  auto r = residual_vector(st);
  double s = 0.0;
  for (int d : st.red.free_dofs) s += r[d] * v_full[d];
  return s;
}

inline double indicator(const EnrichedState& st, const std::vector<double>& v_full,
                        double delta_norm = 1e-10) {
  double nv = norm_aw(*st.sys, v_full);
  require(nv > delta_norm, "indicator: zero-norm direction");
  return residual_functional(st, v_full) / nv;
}

/// R_h(u^(m))(n-hat) for a lifted (already a_w-normalized) candidate; this is
/// the indicator value eta_h(u^(m), n-hat).
inline double residual_on_candidate(const EnrichedState& st, const LiftedNeuralFunction& cand) {
  auto col = aw_column(st.ctx, cand);
  double aw_u = dot(st.x_full, col);
  for (int j = 0; j < st.m(); ++j)
    if (st.alpha[j] != 0.0) aw_u += st.alpha[j] * aw_pair(st.ctx, st.columns[j], cand);
  return f_moment(st.ctx, cand, st.f) - aw_u;
}

inline void add_column(EnrichedState& st, LiftedNeuralFunction lifted) {
  require(lifted.mode == st.cfg.mode, "add_column: lifting mode mismatch");
  auto col = aw_column(st.ctx, lifted);
  int m_old = st.m();
  DenseMatrix d_new(m_old + 1, m_old + 1);
  for (int i = 0; i < m_old; ++i)
    for (int j = 0; j < m_old; ++j) d_new(i, j) = st.d_mat(i, j);
  for (int i = 0; i < m_old; ++i) {
    double v = aw_pair(st.ctx, st.columns[i], lifted);
    d_new(i, m_old) = v;
    d_new(m_old, i) = v;
  }
  d_new(m_old, m_old) = aw_pair(st.ctx, lifted, lifted);
  st.d_mat = std::move(d_new);
  st.f_enr.push_back(f_moment(st.ctx, lifted, st.f));
  st.g_red.push_back(st.f_enr.back() - dot(st.red.bc_values, col));
  st.col_full.push_back(std::move(col));
  st.columns.push_back(std::move(lifted));
  st.alpha.push_back(0.0);
  st.redundant.assign(st.m(), 0);
}

/// Galerkin solve over the enriched space via the bordered system.
inline BorderedResult enriched_solve(EnrichedState& st) {
  BorderedSystem sys;
  sys.a = &st.red.a_reduced;
  int n = st.red.a_reduced.n;
  int m = st.m();
  sys.b_cols = DenseMatrix(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) sys.b_cols(i, j) = st.col_full[j][st.red.free_dofs[i]];
  sys.d = st.d_mat;
  sys.rhs = st.red.b_reduced;
  sys.g_rhs = st.g_red;
  auto res = bordered_solve(sys, st.cfg.solver.rel_tol, st.cfg.schur_eps_factor);
  st.x_full = st.red.embed(res.x);
  st.alpha = res.alpha;
  st.redundant = res.redundant;
  st.last_solve_residual = res.rel_residual;
  return res;
}

/// J_h(u) = 1/2 a_w(u, u) - (f, u_0) over the enriched representation.
inline double discrete_energy(const EnrichedState& st) {
  const WgSystem& sys = *st.sys;
  double quad = dot(st.x_full, sys.a_full.apply(st.x_full));
  double lin = dot(sys.load, st.x_full);
  for (int j = 0; j < st.m(); ++j) {
    quad += 2.0 * st.alpha[j] * dot(st.x_full, st.col_full[j]);
    lin += st.alpha[j] * st.f_enr[j];
    for (int i = 0; i < st.m(); ++i) quad += st.alpha[i] * st.alpha[j] * st.d_mat(i, j);
  }
  return 0.5 * quad - lin;
}

/// ||Q_h u - u^(m)||_aw against a projected exact solution.
inline double enriched_error_aw(const EnrichedState& st, const std::vector<double>& q_exact) {
  std::vector<double> d(q_exact.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = q_exact[i] - st.x_full[i];
  double e2 = energy_product(*st.sys, d, d);
  for (int j = 0; j < st.m(); ++j) {
    e2 -= 2.0 * st.alpha[j] * dot(d, st.col_full[j]);
    for (int i = 0; i < st.m(); ++i) e2 += st.alpha[i] * st.alpha[j] * st.d_mat(i, j);
  }
  return std::sqrt(std::max(0.0, e2));
}

/// Interior L2 error of the enriched solution u_0 + sum alpha_j n_j.
inline double enriched_error_l2(const EnrichedState& st, const ScalarField& u_exact,
                                ProjectionQuad err_quad = {-1, 2, 2}) {
  const Mesh& mesh = *st.sys->mesh;
  const WgSpace& space = *st.sys->space;
  int degree = err_quad.degree < 0 ? st.sys->quad_degree + 2 : err_quad.degree;
  double l2 = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    CellBasis basis(mesh.cell_centroid[c], mesh.cell_diameter[c], space.k);
    auto rule = neural_rule(mesh.cell_polygon(c), err_quad.subdivisions, degree);
    for (std::size_t p = 0; p < rule.points.size(); ++p) {
      double uh = 0.0;
      for (int i = 0; i < space.n_cell_basis; ++i)
        uh += st.x_full[space.cell_offset(c) + i] * basis.eval(i, rule.points[p]);
      for (int j = 0; j < st.m(); ++j)
        if (st.alpha[j] != 0.0)
          uh += st.alpha[j] * st.columns[j].eval_scaled(rule.points[p]);
      double diff = u_exact(rule.points[p]) - uh;
      l2 += rule.weights[p] * diff * diff;
    }
  }
  return std::sqrt(l2);
}

namespace detail {

// min over beta of q^2 - 2 beta.c + beta.G beta with near-singular G handled
// by pivot dropping.
inline double span_distance_sq(const DenseMatrix& gram, const std::vector<double>& c, double q_sq,
                               double eps_factor = 1e-12) {
  int m = gram.rows;
  if (m == 0) return q_sq;
  DenseMatrix g = gram;
  std::vector<double> rhs = c;
  double trace = 0.0;
  for (int i = 0; i < m; ++i) trace += gram(i, i);
  double eps = eps_factor * std::max(trace / m, 1e-300);
  std::vector<char> used(m, 0);
  double reduction = 0.0;
  for (int step = 0; step < m; ++step) {
    int piv = -1;
    double best = -1.0;
    for (int j = 0; j < m; ++j)
      if (!used[j] && g(j, j) > best) {
        best = g(j, j);
        piv = j;
      }
    if (best < eps) break;
    used[piv] = 1;
    reduction += rhs[piv] * rhs[piv] / best;
    for (int i = 0; i < m; ++i) {
      if (used[i]) continue;
      double f = g(i, piv) / best;
      rhs[i] -= f * rhs[piv];
      for (int j = 0; j < m; ++j)
        if (!used[j]) g(i, j) -= f * g(piv, j);
    }
  }
  return std::max(0.0, q_sq - reduction);
}

}  // namespace detail

/// Singular-part capture diagnostic: the a_w-distance from Q_h u_s to the
/// span of the current enrichment functions.
inline double singular_eps(const EnrichedState& st, const std::vector<double>& q_singular) {
  double q_sq = energy_product(*st.sys, q_singular, q_singular);
  std::vector<double> c(st.m());
  for (int j = 0; j < st.m(); ++j) c[j] = dot(q_singular, st.col_full[j]);
  return std::sqrt(detail::span_distance_sq(st.d_mat, c, q_sq));
}

/// The training objective as a function of theta: the residual of the
/// current solution against the lifted candidate, normalized by its energy
/// norm, with an exact reverse-mode gradient. The objective is a closed-form
/// function of the candidate values at the session's quadrature points: the
/// numerator is linear in them, the energy norm quadratic, so the chain rule
/// runs through backprop_through_points.
class TrainingSession {
 public:
  TrainingSession(const EnrichedState& st, NeuralQuadConfig quad)
      : st_(&st), ctx_(make_lift_context(*st.sys, quad)) {
    phi_vals_.resize(ctx_.points.size());
    for (std::size_t i = 0; i < ctx_.points.size(); ++i) phi_vals_[i] = st.phi(ctx_.points[i]);
    refresh();
  }

  /// Rebuilds the linear part after the current solution changed.
  void refresh() {
    const EnrichedState& st = *st_;
    const WgSystem& sys = *st.sys;
    const Mesh& mesh = *sys.mesh;
    const WgSpace& space = *sys.space;
    n_vec_.assign(ctx_.points.size(), 0.0);

    if (st.cfg.mode == LiftMode::generalized) {
      for (int q = 0; q < ctx_.n_volume_points; ++q)
        n_vec_[q] = ctx_.point_weights[q] * st.f(ctx_.points[q]);
      for (int c = 0; c < mesh.n_cells(); ++c) {
        auto dofs = space.cell_dofs(c);
        std::vector<double> x_loc(dofs.size());
        for (std::size_t i = 0; i < dofs.size(); ++i) x_loc[i] = st.x_full[dofs[i]];
        auto w_grad = matvec(sys.local[c].g, x_loc);
        for (int j = 0; j < st.m(); ++j)
          if (st.alpha[j] != 0.0) axpy(st.alpha[j], st.columns[j].grad_coeffs[c], w_grad);
        auto q_cell = matvec(sys.local[c].weighted_vec_mass, w_grad);
        const DenseMatrix& gm = ctx_.grad_map[c];
        const auto& ids = ctx_.cell_point_ids[c];
        for (int col = 0; col < gm.cols; ++col) {
          double s = 0.0;
          for (int i = 0; i < gm.rows; ++i) s += gm(i, col) * q_cell[i];
          n_vec_[ids[col]] -= s;
        }
      }
    } else {
      std::vector<double> u_eff = st.x_full;
      for (int j = 0; j < st.m(); ++j)
        if (st.alpha[j] != 0.0) axpy(st.alpha[j], st.columns[j].coeffs, u_eff);
      auto r = sys.a_full.apply(u_eff);
      for (int i = 0; i < sys.n_dofs(); ++i) r[i] = sys.load[i] - r[i];
      for (int c = 0; c < mesh.n_cells(); ++c) {
        const DenseMatrix& p0 = ctx_.q0_map[c];
        for (int q = 0; q < p0.cols; ++q) {
          double s = 0.0;
          for (int i = 0; i < p0.rows; ++i) s += p0(i, q) * r[space.cell_offset(c) + i];
          n_vec_[ctx_.cell_pt_offset[c] + q] += s;
        }
      }
      for (int e = 0; e < mesh.n_edges(); ++e) {
        if (mesh.edges[e].boundary) continue;
        const DenseMatrix& pb = ctx_.qb_map[e];
        for (int q = 0; q < pb.cols; ++q) {
          double s = 0.0;
          for (int i = 0; i < pb.rows; ++i) s += pb(i, q) * r[space.edge_offset(e) + i];
          n_vec_[ctx_.edge_pt_offset[e] + q] += s;
        }
      }
    }
  }

  struct Evaluation {
    double j = 0.0;
    bool valid = false;
    std::vector<double> grad;  // d|J|-agnostic: gradient of J itself
  };

  Evaluation evaluate(const Mlp& net, bool want_grad) const {
    const EnrichedState& st = *st_;
    const WgSystem& sys = *st.sys;
    Evaluation out;

    std::vector<double> y(ctx_.points.size());
    {
      MlpWorkspace ws;
      for (std::size_t i = 0; i < ctx_.points.size(); ++i)
        y[i] = phi_vals_[i] * mlp_forward(net, ctx_.points[i], ws);
    }

    double numerator = dot(n_vec_, y);
    double energy = 0.0;
    std::vector<double> s_vec;
    if (want_grad) s_vec.assign(y.size(), 0.0);

    if (st.cfg.mode == LiftMode::generalized) {
      for (int c = 0; c < sys.mesh->n_cells(); ++c) {
        auto loc = gather_local(ctx_, c, y);
        auto g = matvec(ctx_.grad_map[c], loc);
        auto wg = matvec(sys.local[c].weighted_vec_mass, g);
        for (std::size_t i = 0; i < g.size(); ++i) energy += g[i] * wg[i];
        if (want_grad) {
          const DenseMatrix& gm = ctx_.grad_map[c];
          const auto& ids = ctx_.cell_point_ids[c];
          for (int col = 0; col < gm.cols; ++col) {
            double s = 0.0;
            for (int i = 0; i < gm.rows; ++i) s += gm(i, col) * wg[i];
            s_vec[ids[col]] += s;
          }
        }
      }
    } else {
      const WgSpace& space = *sys.space;
      std::vector<double> c_full(space.n_dofs, 0.0);
      for (int c = 0; c < sys.mesh->n_cells(); ++c) {
        const DenseMatrix& p0 = ctx_.q0_map[c];
        for (int i = 0; i < p0.rows; ++i) {
          double s = 0.0;
          for (int q = 0; q < p0.cols; ++q) s += p0(i, q) * y[ctx_.cell_pt_offset[c] + q];
          c_full[space.cell_offset(c) + i] = s;
        }
      }
      for (int e = 0; e < sys.mesh->n_edges(); ++e) {
        if (sys.mesh->edges[e].boundary) continue;
        const DenseMatrix& pb = ctx_.qb_map[e];
        for (int i = 0; i < pb.rows; ++i) {
          double s = 0.0;
          for (int q = 0; q < pb.cols; ++q) s += pb(i, q) * y[ctx_.edge_pt_offset[e] + q];
          c_full[space.edge_offset(e) + i] = s;
        }
      }
      auto z = sys.a_full.apply(c_full);
      energy = dot(c_full, z);
      if (want_grad) {
        for (int c = 0; c < sys.mesh->n_cells(); ++c) {
          const DenseMatrix& p0 = ctx_.q0_map[c];
          for (int q = 0; q < p0.cols; ++q) {
            double s = 0.0;
            for (int i = 0; i < p0.rows; ++i) s += p0(i, q) * z[space.cell_offset(c) + i];
            s_vec[ctx_.cell_pt_offset[c] + q] += s;
          }
        }
        for (int e = 0; e < sys.mesh->n_edges(); ++e) {
          if (sys.mesh->edges[e].boundary) continue;
          const DenseMatrix& pb = ctx_.qb_map[e];
          for (int q = 0; q < pb.cols; ++q) {
            double s = 0.0;
            for (int i = 0; i < pb.rows; ++i) s += pb(i, q) * z[space.edge_offset(e) + i];
            s_vec[ctx_.edge_pt_offset[e] + q] += s;
          }
        }
      }
    }

    if (!(energy > st.cfg.delta_norm * st.cfg.delta_norm) || !std::isfinite(energy) ||
        !std::isfinite(numerator))
      return out;  // degenerate denominator: rejected evaluation

    double denom = std::sqrt(energy);
    out.j = numerator / denom;
    out.valid = std::isfinite(out.j);
    if (!out.valid || !want_grad) return out;

    // dJ/dy = n_vec / D - N s_vec / D^3, then through the cutoff factor.
    std::vector<double> upstream(y.size());
    double inv_d = 1.0 / denom;
    double nd3 = numerator / (energy * denom);
    for (std::size_t i = 0; i < y.size(); ++i)
      upstream[i] = (n_vec_[i] * inv_d - nd3 * s_vec[i]) * phi_vals_[i];
    out.grad = backprop_through_points(net, ctx_.points, upstream);
    return out;
  }

  const LiftContext& context() const { return ctx_; }

 private:
  const EnrichedState* st_;
  LiftContext ctx_;
  std::vector<double> phi_vals_;
  std::vector<double> n_vec_;
};

struct RestartSummary {
  std::uint64_t seed = 0;
  double final_abs_j = 0.0;
  bool valid = false;
};

struct TrainResult {
  NeuralCandidate candidate;
  double abs_j = 0.0;
  std::vector<RestartSummary> restarts;
};

/// Adam ascent on |J| over the neural class, restarted from distinct seeds;
/// the span of a candidate is sign-invariant so the sign of J is irrelevant.
inline TrainResult train_candidate(const EnrichedState& st, const TrainingSession& session,
                                   int seed_offset = 0) {
  const TrainingConfig& tc = st.cfg.training;
  require(tc.restarts >= 1, "train_candidate: needs at least one restart");

  struct Slot {
    Mlp net;
    double j = 0.0;
    bool valid = false;
  };
  std::vector<Slot> slots(tc.restarts);
  std::vector<RestartSummary> summaries(tc.restarts);

  auto run_restart = [&](int r) {
    std::uint64_t seed = tc.seed + 997ull * static_cast<std::uint64_t>(seed_offset) +
                         static_cast<std::uint64_t>(r);
    Mlp net = mlp_init(tc.hidden, seed);
    AdamState adam(net.n_params());
    Mlp last_valid = net;
    double last_j = 0.0;
    bool ever_valid = false;
    for (int step = 0; step < tc.steps; ++step) {
      auto ev = session.evaluate(net, true);
      if (!ev.valid) break;
      ever_valid = true;
      last_valid = net;
      last_j = ev.j;
      double sign = ev.j >= 0.0 ? 1.0 : -1.0;
      for (double& g : ev.grad) g = -sign * g;  // descent on -|J|
      adam_step(adam, net.theta, ev.grad, tc.lr);
    }
    auto fin = session.evaluate(net, false);
    if (fin.valid) {
      ever_valid = true;
      last_valid = net;
      last_j = fin.j;
    }
    slots[r] = {std::move(last_valid), last_j, ever_valid};
    summaries[r] = {seed, std::abs(last_j), ever_valid};
  };

  int n_threads = std::min(wgnet_thread_count(), tc.restarts);
  if (n_threads <= 1) {
    for (int r = 0; r < tc.restarts; ++r) run_restart(r);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back([&, t]() {
        for (int r = t; r < tc.restarts; r += n_threads) run_restart(r);
      });
    for (auto& th : pool) th.join();
  }

  int best = -1;
  for (int r = 0; r < tc.restarts; ++r) {
    if (!slots[r].valid) continue;
    if (best < 0 || std::abs(slots[r].j) > std::abs(slots[best].j)) best = r;
  }
  require(best >= 0, "train_candidate: no admissible candidate (all restarts degenerate)");

  TrainResult out;
  out.candidate = NeuralCandidate{std::move(slots[best].net), st.phi};
  out.abs_j = std::abs(slots[best].j);
  out.restarts = std::move(summaries);
  return out;
}

struct EnrichmentDiagnostics {
  ScalarField exact_u;        // enables err_aw logging
  ScalarField singular_part;  // enables eps_m logging
  ProjectionQuad err_quad{-1, 2, 2};
};

/// The enrichment loop: solve, then repeatedly train a residual-maximizing
/// candidate, lift it, extend the trial space, and re-solve; stop when the
/// indicator of the incoming candidate falls below tol or max_enrichments is
/// reached.
inline void run_enrichment(EnrichedState& st, const EnrichmentDiagnostics& diag = {}) {
  using clock = std::chrono::steady_clock;
  std::vector<double> q_exact, q_singular;
  if (diag.exact_u) q_exact = project_Qh(*st.sys, diag.exact_u, diag.err_quad);
  if (diag.singular_part) q_singular = project_Qh(*st.sys, diag.singular_part, diag.err_quad);

  auto log_step = [&](StepLog entry) {
    entry.energy = discrete_energy(st);
    if (!q_exact.empty()) entry.err_aw = enriched_error_aw(st, q_exact);
    if (!q_singular.empty()) entry.eps_m = singular_eps(st, q_singular);
    entry.redundant = st.redundant;
    entry.ortho_residual = st.last_solve_residual;
    st.log.push_back(std::move(entry));
  };

  StepLog base;
  base.m = 0;
  log_step(base);

  double tol_abs = st.cfg.tol_rel * st.baseline_norm_aw;
  TrainingSession session(st, st.cfg.training.quad);

  while (st.m() < st.cfg.max_enrichments) {
    StepLog entry;
    entry.m = st.m() + 1;
    auto t0 = clock::now();
    TrainResult trained;
    LiftedNeuralFunction lifted;
    try {
      session.refresh();
      trained = train_candidate(st, session, st.m());
      lifted = lift(st.ctx, trained.candidate.as_function(), st.cfg.mode, st.cfg.delta_norm);
    } catch (const std::exception& e) {
      st.stop_reason = std::string("training failure: ") + e.what();
      break;
    }
    entry.abs_j = trained.abs_j;
    entry.eta = residual_on_candidate(st, lifted);
    entry.train_seconds = std::chrono::duration<double>(clock::now() - t0).count();

    if (std::abs(entry.eta) < tol_abs) {
      st.stop_reason = "indicator below tolerance";
      break;
    }

    auto t1 = clock::now();
    add_column(st, std::move(lifted));
    st.networks.push_back(trained.candidate.net);
    enriched_solve(st);
    entry.solve_seconds = std::chrono::duration<double>(clock::now() - t1).count();
    log_step(entry);
  }
  if (st.stop_reason.empty() && st.m() >= st.cfg.max_enrichments)
    st.stop_reason = "max enrichments reached";
}

}  // namespace wg
