#pragma once

#include <chrono>
#include <filesystem>

#include <json.hpp>

#include "wg/config.hpp"

namespace wg {

using nlohmann::json;

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

struct PhaseTimer {
  using clock = std::chrono::steady_clock;
  clock::time_point start = clock::now();
  json& out;
  std::string phase;
  clock::time_point phase_start = clock::now();

  explicit PhaseTimer(json& j) : out(j) {}

  void begin(const std::string& name) {
    phase = name;
    phase_start = clock::now();
  }

  void end() {
    if (phase.empty()) return;
    out[phase] = std::chrono::duration<double>(clock::now() - phase_start).count();
    phase.clear();
  }

  double total() const { return std::chrono::duration<double>(clock::now() - start).count(); }
};

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path);
  require(out.good(), "cannot open output file '" + path + "'");
  out << contents;
  require(out.good(), "write failed for '" + path + "'");
}

}  // namespace detail

inline json config_to_json(const RunConfig& c) {
  json j;
  j["problem"] = {{"name", c.problem_name}, {"beta", c.beta}};
  if (c.problem_name == "custom") {
    j["problem"]["domain"] = c.custom_domain;
    j["problem"]["f"] = c.custom_f;
    j["problem"]["g"] = c.custom_g;
    j["problem"]["u"] = c.custom_u;
  }
  j["mesh"] = {{"generator", c.generator},
               {"n", c.n},
               {"cell_kind", c.cell_kind == CellKind::quad ? "quad" : "triangle"},
               {"file", c.mesh_file},
               {"refinements", c.refinements}};
  j["space"] = {{"k", c.k}};
  j["quadrature"] = {{"poly_degree", c.poly_degree},
                     {"neural_degree", c.neural_quad.degree},
                     {"neural_subdivisions", c.neural_quad.subdivisions},
                     {"error_degree", c.error_quad.degree},
                     {"error_subdivisions", c.error_quad.subdivisions}};
  j["solver"] = {{"rel_tol", c.solver.rel_tol},
                 {"max_iter_factor", c.solver.max_iter_factor},
                 {"preconditioner",
                  c.solver.precond == Preconditioner::jacobi ? "jacobi" : "none"}};
  j["enrichment"] = {{"mode", to_string(c.enrichment.mode)},
                     {"tol_rel", c.enrichment.tol_rel},
                     {"max_m", c.enrichment.max_enrichments},
                     {"delta_norm", c.enrichment.delta_norm},
                     {"schur_eps_factor", c.enrichment.schur_eps_factor}};
  j["training"] = {{"widths", c.enrichment.training.hidden},
                   {"restarts", c.enrichment.training.restarts},
                   {"steps", c.enrichment.training.steps},
                   {"lr", c.enrichment.training.lr},
                   {"seed", c.enrichment.training.seed},
                   {"quad_degree", c.enrichment.training.quad.degree},
                   {"quad_subdivisions", c.enrichment.training.quad.subdivisions}};
  j["convergence"] = {{"levels", c.levels}};
  j["output"] = {{"dir", c.out_dir}};
  return j;
}

inline json mlp_checkpoint(const Mlp& net) {
  json j;
  j["widths"] = net.widths;
  j["seed"] = net.seed;
  j["theta"] = net.theta;
  return j;
}

inline Mlp mlp_from_checkpoint(const json& j) {
  std::vector<int> widths = j.at("widths").get<std::vector<int>>();
  require(widths.size() >= 2 && widths.front() == 2 && widths.back() == 1,
          "checkpoint: malformed widths");
  std::vector<int> hidden(widths.begin() + 1, widths.end() - 1);
  Mlp net = mlp_init(hidden, j.at("seed").get<std::uint64_t>());
  auto theta = j.at("theta").get<std::vector<double>>();
  require(theta.size() == net.theta.size(), "checkpoint: wrong parameter count");
  net.theta = std::move(theta);
  return net;
}

inline json manifest_skeleton(const std::string& command, const RunConfig& cfg,
                              const std::string& config_path) {
  json m;
  m["command"] = command;
  m["generator"] = "wgnet 1.0";
  m["compiler"] = {{"id", "gcc"}, {"version", __VERSION__}, {"std", __cplusplus}};
  m["threads"] = wgnet_thread_count();
  m["config_path"] = config_path;
  m["config_text"] = cfg.raw_text;
  m["config"] = config_to_json(cfg);
  m["seed"] = cfg.enrichment.training.seed;
  return m;
}

struct CommandResult {
  json manifest;
  std::string printed;
};

inline CommandResult cmd_solve(const RunConfig& cfg, const std::string& out_dir,
                               const std::string& config_path = "<inline>") {
  std::filesystem::create_directories(out_dir);
  json timings;
  detail::PhaseTimer timer(timings);

  timer.begin("setup_seconds");
  Problem problem = cfg.build_problem();
  check_pde_consistency(problem);
  Mesh mesh = cfg.build_mesh(problem);
  WgSpace space(mesh, cfg.k);
  timer.end();

  timer.begin("assemble_seconds");
  auto sys = assemble_system(mesh, space, problem.coefficients(mesh), problem.f, cfg.poly_degree);
  auto red = apply_dirichlet(sys, problem.g, cfg.error_quad);
  timer.end();

  timer.begin("solve_seconds");
  auto sol = wg_solve(sys, red, cfg.solver);
  timer.end();

  std::ostringstream csv;
  csv << "cell,cx,cy";
  for (int i = 0; i < space.n_cell_basis; ++i) csv << ",c" << i;
  csv << "\n";
  for (int c = 0; c < mesh.n_cells(); ++c) {
    csv << c << "," << fmt17(mesh.cell_centroid[c].x) << "," << fmt17(mesh.cell_centroid[c].y);
    for (int i = 0; i < space.n_cell_basis; ++i)
      csv << "," << fmt17(sol.u[space.cell_offset(c) + i]);
    csv << "\n";
  }
  detail::write_file(out_dir + "/solution.csv", csv.str());

  CommandResult res;
  res.manifest = manifest_skeleton("solve", cfg, config_path);
  res.manifest["results"] = {{"dofs", space.n_dofs},
                             {"cells", mesh.n_cells()},
                             {"h", mesh.h},
                             {"cg_iterations", sol.cg.iterations},
                             {"cg_residual", sol.cg.rel_residual}};
  std::ostringstream out;
  out << "solve: " << mesh.n_cells() << " cells, " << space.n_dofs << " dofs, h = " << mesh.h
      << ", cg iterations " << sol.cg.iterations << "\n";
  if (problem.has_exact()) {
    auto err = compute_errors(sys, problem, sol.u.coeffs, cfg.error_quad);
    res.manifest["results"]["err_aw"] = err.err_aw;
    res.manifest["results"]["err_l2"] = err.err_l2;
    out << "errors: energy " << fmt17(err.err_aw) << ", interior L2 " << fmt17(err.err_l2)
        << "\n";
  }
  res.manifest["timings"] = timings;
  detail::write_file(out_dir + "/manifest.json", res.manifest.dump(2) + "\n");
  res.printed = out.str();
  return res;
}

inline CommandResult cmd_convergence(const RunConfig& cfg, const std::string& out_dir,
                                     const std::string& config_path = "<inline>") {
  std::filesystem::create_directories(out_dir);
  Problem problem = cfg.build_problem();
  check_pde_consistency(problem);
  require(cfg.generator != "file", "convergence: needs a generated mesh family, not a file");

  json timings;
  detail::PhaseTimer timer(timings);
  timer.begin("study_seconds");
  auto rows = convergence_study(problem, cfg.k, cfg.n, cfg.levels, cfg.cell_kind, cfg.solver,
                                cfg.error_quad, cfg.poly_degree);
  timer.end();

  std::ostringstream csv, gp, out;
  csv << "h,dofs,err_aw,err_l2,eoc_aw,eoc_l2\n";
  gp << "# log10(h) log10(err_aw) log10(err_l2)\n";
  out << "convergence: " << problem.name << ", k = " << cfg.k << "\n";
  out << "      h           dofs   err_aw        err_l2        eoc_aw  eoc_l2\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    csv << fmt17(r.h) << "," << r.dofs << "," << fmt17(r.err_aw) << "," << fmt17(r.err_l2);
    if (i == 0)
      csv << ",,";
    else
      csv << "," << fmt17(r.eoc_aw) << "," << fmt17(r.eoc_l2);
    csv << "\n";
    gp << fmt17(std::log10(r.h)) << " " << fmt17(std::log10(r.err_aw)) << " "
       << fmt17(std::log10(r.err_l2)) << "\n";
    char line[160];
    std::snprintf(line, sizeof(line), "  %10.6f %8d   %.6e  %.6e  %6.3f  %6.3f\n", r.h, r.dofs,
                  r.err_aw, r.err_l2, r.eoc_aw, r.eoc_l2);
    out << line;
  }
  detail::write_file(out_dir + "/rates.csv", csv.str());
  detail::write_file(out_dir + "/rates.gp.dat", gp.str());

  CommandResult res;
  res.manifest = manifest_skeleton("convergence", cfg, config_path);
  json jrows = json::array();
  for (const auto& r : rows)
    jrows.push_back({{"h", r.h},
                     {"dofs", r.dofs},
                     {"err_aw", r.err_aw},
                     {"err_l2", r.err_l2},
                     {"eoc_aw", r.eoc_aw},
                     {"eoc_l2", r.eoc_l2}});
  res.manifest["results"]["rows"] = jrows;
  res.manifest["timings"] = timings;
  detail::write_file(out_dir + "/manifest.json", res.manifest.dump(2) + "\n");
  res.printed = out.str();
  return res;
}

inline CommandResult cmd_enrich(const RunConfig& cfg, const std::string& out_dir,
                                const std::string& config_path = "<inline>") {
  std::filesystem::create_directories(out_dir);
  Problem problem = cfg.build_problem();
  check_pde_consistency(problem);
  Mesh mesh = cfg.build_mesh(problem);
  WgSpace space(mesh, cfg.k);

  json timings;
  detail::PhaseTimer timer(timings);
  timer.begin("assemble_seconds");
  auto sys = assemble_system(mesh, space, problem.coefficients(mesh), problem.f, cfg.poly_degree);
  timer.end();

  timer.begin("enrichment_seconds");
  auto st = make_enriched_state(sys, problem.f, problem.g, cutoff(problem.domain),
                                cfg.enrichment);
  EnrichmentDiagnostics diag;
  diag.err_quad = cfg.error_quad;
  if (problem.has_exact()) {
    diag.exact_u = problem.u;
    if (problem.regularity == Regularity::singular) diag.singular_part = problem.u;
  }
  run_enrichment(st, diag);
  timer.end();

  std::ostringstream csv, out;
  csv << "m,abs_j,eta,J_h,err_aw,eps_m,redundant\n";
  out << "enrich: " << problem.name << ", mode " << to_string(cfg.enrichment.mode) << ", m = "
      << st.m() << " (" << st.stop_reason << ")\n";
  for (const auto& l : st.log) {
    int n_red = 0;
    for (char r : l.redundant) n_red += r;
    csv << l.m << "," << fmt17(l.abs_j) << "," << fmt17(l.eta) << "," << fmt17(l.energy) << ","
        << fmt17(l.err_aw) << "," << fmt17(l.eps_m) << "," << n_red << "\n";
    char line[200];
    std::snprintf(line, sizeof(line),
                  "  m=%d |J|=%.3e eta=%.3e J_h=%.9f err_aw=%.4e eps_m=%.3e redundant=%d\n",
                  l.m, l.abs_j, l.eta, l.energy, l.err_aw, l.eps_m, n_red);
    out << line;
  }
  detail::write_file(out_dir + "/enrichment.csv", csv.str());

  CommandResult res;
  res.manifest = manifest_skeleton("enrich", cfg, config_path);
  json steps = json::array();
  for (const auto& l : st.log) {
    json s = {{"m", l.m},
              {"abs_j", l.abs_j},
              {"eta", l.eta},
              {"J_h", l.energy},
              {"ortho_residual", l.ortho_residual},
              {"train_seconds", l.train_seconds},
              {"solve_seconds", l.solve_seconds}};
    if (std::isfinite(l.err_aw)) s["err_aw"] = l.err_aw;
    if (std::isfinite(l.eps_m)) s["eps_m"] = l.eps_m;
    s["redundant"] = json::array();
    for (char r : l.redundant) s["redundant"].push_back(static_cast<bool>(r));
    steps.push_back(s);
  }
  res.manifest["results"]["steps"] = steps;
  res.manifest["results"]["stop_reason"] = st.stop_reason;
  res.manifest["results"]["baseline_norm_aw"] = st.baseline_norm_aw;
  res.manifest["results"]["alphas"] = st.alpha;
  json checkpoints = json::array();
  for (const auto& net : st.networks) checkpoints.push_back(mlp_checkpoint(net));
  res.manifest["networks"] = checkpoints;
  res.manifest["timings"] = timings;
  detail::write_file(out_dir + "/manifest.json", res.manifest.dump(2) + "\n");
  res.printed = out.str();
  return res;
}

inline CommandResult cmd_mesh_info(const RunConfig& cfg,
                                   const std::string& config_path = "<inline>") {
  Problem problem = cfg.build_problem();
  Mesh mesh = cfg.build_mesh(problem);
  int boundary_edges = 0;
  for (const auto& e : mesh.edges) boundary_edges += e.boundary;
  double min_area = 1e300, max_area = 0.0, worst_shape = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    min_area = std::min(min_area, mesh.cell_area[c]);
    max_area = std::max(max_area, mesh.cell_area[c]);
    worst_shape = std::max(worst_shape,
                           mesh.cell_diameter[c] * mesh.cell_diameter[c] / mesh.cell_area[c]);
  }
  std::ostringstream out;
  out << "mesh: " << mesh.n_vertices() << " vertices, " << mesh.n_cells() << " cells, "
      << mesh.n_edges() << " edges (" << boundary_edges << " boundary)\n"
      << "h = " << fmt17(mesh.h) << ", total area = " << fmt17(mesh.total_area()) << "\n"
      << "cell area in [" << fmt17(min_area) << ", " << fmt17(max_area)
      << "], max h_T^2/area = " << fmt17(worst_shape) << "\n";
  CommandResult res;
  res.manifest = manifest_skeleton("mesh-info", cfg, config_path);
  res.printed = out.str();
  return res;
}

inline CommandResult cmd_validate_quadrature(const RunConfig& cfg,
                                             const std::string& config_path = "<inline>") {
  int degree = cfg.poly_degree > 0 ? cfg.poly_degree : 2 * cfg.k + 2;
  std::ostringstream out;
  out << "shape,degree,a,b,computed,exact,rel_err\n";
  const std::vector<Vec2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const std::array<Vec2, 3> tri{{{0, 0}, {1, 0}, {0, 1}}};
  auto moment_sq = [](int a, int b) { return 1.0 / ((a + 1.0) * (b + 1.0)); };
  auto moment_tri = [](int a, int b) {
    double v = 1.0;
    for (int i = 1; i <= a; ++i) v *= i;
    for (int i = 1; i <= b; ++i) v *= i;
    for (int i = 1; i <= a + b + 2; ++i) v /= i;
    return v;
  };
  auto tri_rule = triangle_rule(tri, degree);
  auto sq_rule = polygon_rule(square, degree);
  for (int a = 0; a <= degree; ++a)
    for (int b = 0; a + b <= degree; ++b) {
      double ct = tri_rule.integrate([&](Vec2 p) { return powi(p.x, a) * powi(p.y, b); });
      double cs = sq_rule.integrate([&](Vec2 p) { return powi(p.x, a) * powi(p.y, b); });
      double et = moment_tri(a, b), es = moment_sq(a, b);
      out << "triangle," << degree << "," << a << "," << b << "," << fmt17(ct) << "," << fmt17(et)
          << "," << fmt17(std::abs(ct - et) / et) << "\n";
      out << "square," << degree << "," << a << "," << b << "," << fmt17(cs) << "," << fmt17(es)
          << "," << fmt17(std::abs(cs - es) / es) << "\n";
    }
  CommandResult res;
  res.manifest = manifest_skeleton("validate-quadrature", cfg, config_path);
  res.printed = out.str();
  return res;
}

}  // namespace wg
