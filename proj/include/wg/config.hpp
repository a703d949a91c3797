#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "wg/enrichment.hpp"
#include "wg/problems.hpp"

namespace wg {

/// Configuration mistakes are their own failure class: the CLI maps them to
/// exit code 2, numerical failures to 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Run description parsed from the sectioned key-value file. Every field is
/// validated up front; unknown sections or keys are rejected by name.
struct RunConfig {
  // [problem]
  std::string problem_name = "smooth_square";
  double beta = 10.0;
  std::string custom_domain = "square";
  std::string custom_f, custom_g, custom_u;

  // [mesh]
  std::string generator = "square";  // square | lshape | file
  int n = 8;
  CellKind cell_kind = CellKind::quad;
  std::string mesh_file;
  int refinements = 0;

  // [space]
  int k = 1;

  // [quadrature]
  int poly_degree = -1;  // -1: 2k+2
  NeuralQuadConfig neural_quad{10, 2};
  ProjectionQuad error_quad{-1, 2, 2};

  // [solver]
  SolverConfig solver;

  // [enrichment]
  EnrichmentConfig enrichment;

  // [convergence]
  int levels = 4;

  // [output]
  std::string out_dir = "out";

  std::string raw_text;

  static RunConfig parse_file(const std::string& path);
  static RunConfig parse_text(const std::string& text, const std::string& origin = "<config>");

  Problem build_problem() const {
    if (problem_name == "smooth_square") return problem_smooth_square();
    if (problem_name == "lshape_singular") return problem_lshape_singular();
    if (problem_name == "interface_strip") return problem_interface_strip(beta);
    if (problem_name == "custom")
      return problem_from_expressions(custom_domain, custom_f, custom_g, custom_u);
    throw ConfigError("unknown problem name '" + problem_name + "'");
  }

  Mesh build_mesh(const Problem& problem) const {
    Mesh mesh;
    if (generator == "file") {
      mesh = load_mesh(mesh_file);
    } else {
      mesh = problem.make_mesh(n, cell_kind);
    }
    for (int r = 0; r < refinements; ++r) mesh = uniform_refine(mesh);
    return mesh;
  }
};

namespace detail {

struct ConfigParser {
  std::string origin;
  std::map<std::string, std::map<std::string, std::string>> values;

  static const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"problem", {"name", "beta", "domain", "f", "g", "u"}},
        {"mesh", {"generator", "n", "cell_kind", "file", "refinements"}},
        {"space", {"k"}},
        {"quadrature",
         {"poly_degree", "neural_degree", "neural_subdivisions", "error_degree",
          "error_subdivisions"}},
        {"solver", {"rel_tol", "max_iter_factor", "preconditioner"}},
        {"enrichment", {"mode", "tol_rel", "max_m", "delta_norm", "schur_eps_factor"}},
        {"training",
         {"widths", "restarts", "steps", "lr", "seed", "quad_degree", "quad_subdivisions"}},
        {"convergence", {"levels"}},
        {"output", {"dir"}},
    };
    return s;
  }

  static std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  void parse(const std::string& text) {
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        if (!schema().count(section))
          throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown section [" +
                            section + "]");
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (section.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": key '" + key +
                          "' outside any section");
      if (!schema().at(section).count(key))
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key +
                          "' in section [" + section + "]");
      values[section][key] = value;
    }
  }

  bool has(const std::string& sec, const std::string& key) const {
    auto it = values.find(sec);
    return it != values.end() && it->second.count(key);
  }

  std::string str(const std::string& sec, const std::string& key, std::string dflt) const {
    return has(sec, key) ? values.at(sec).at(key) : dflt;
  }

  double num(const std::string& sec, const std::string& key, double dflt) const {
    if (!has(sec, key)) return dflt;
    const std::string& v = values.at(sec).at(key);
    try {
      std::size_t used = 0;
      double x = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw ConfigError("[" + sec + "] " + key + ": not a number: '" + v + "'");
    }
  }

  long integer(const std::string& sec, const std::string& key, long dflt) const {
    double x = num(sec, key, static_cast<double>(dflt));
    long r = static_cast<long>(x);
    if (static_cast<double>(r) != x)
      throw ConfigError("[" + sec + "] " + key + ": expected an integer");
    return r;
  }
};

}  // namespace detail

inline RunConfig RunConfig::parse_text(const std::string& text, const std::string& origin) {
  detail::ConfigParser p;
  p.origin = origin;
  p.parse(text);

  RunConfig c;
  c.raw_text = text;

  c.problem_name = p.str("problem", "name", c.problem_name);
  c.beta = p.num("problem", "beta", c.beta);
  c.custom_domain = p.str("problem", "domain", c.custom_domain);
  c.custom_f = p.str("problem", "f", "");
  c.custom_g = p.str("problem", "g", "");
  c.custom_u = p.str("problem", "u", "");

  c.generator = p.str("mesh", "generator", c.generator);
  if (c.generator != "square" && c.generator != "lshape" && c.generator != "file")
    throw ConfigError("[mesh] generator must be square, lshape, or file");
  c.n = static_cast<int>(p.integer("mesh", "n", c.n));
  if (c.n < 1) throw ConfigError("[mesh] n must be >= 1");
  std::string kind = p.str("mesh", "cell_kind", "quad");
  if (kind == "quad")
    c.cell_kind = CellKind::quad;
  else if (kind == "triangle")
    c.cell_kind = CellKind::triangle;
  else
    throw ConfigError("[mesh] cell_kind must be quad or triangle");
  c.mesh_file = p.str("mesh", "file", "");
  if (c.generator == "file" && c.mesh_file.empty())
    throw ConfigError("[mesh] generator=file requires a file path");
  c.refinements = static_cast<int>(p.integer("mesh", "refinements", 0));
  if (c.refinements < 0) throw ConfigError("[mesh] refinements must be >= 0");

  c.k = static_cast<int>(p.integer("space", "k", c.k));
  if (c.k < 1 || c.k > 2) throw ConfigError("[space] k must be 1 or 2");

  c.poly_degree = static_cast<int>(p.integer("quadrature", "poly_degree", -1));
  c.neural_quad.degree = static_cast<int>(p.integer("quadrature", "neural_degree", 10));
  c.neural_quad.subdivisions =
      static_cast<int>(p.integer("quadrature", "neural_subdivisions", 2));
  c.error_quad.degree = static_cast<int>(p.integer("quadrature", "error_degree", -1));
  c.error_quad.subdivisions =
      static_cast<int>(p.integer("quadrature", "error_subdivisions", 2));
  if (c.neural_quad.subdivisions < 1 || c.error_quad.subdivisions < 1)
    throw ConfigError("[quadrature] subdivisions must be >= 1");

  c.solver.rel_tol = p.num("solver", "rel_tol", 1e-10);
  if (!(c.solver.rel_tol > 0.0)) throw ConfigError("[solver] rel_tol must be positive");
  c.solver.max_iter_factor = static_cast<int>(p.integer("solver", "max_iter_factor", 10));
  std::string precond = p.str("solver", "preconditioner", "jacobi");
  if (precond == "jacobi")
    c.solver.precond = Preconditioner::jacobi;
  else if (precond == "none")
    c.solver.precond = Preconditioner::none;
  else
    throw ConfigError("[solver] preconditioner must be jacobi or none");

  std::string mode = p.str("enrichment", "mode", "generalized");
  if (mode == "generalized")
    c.enrichment.mode = LiftMode::generalized;
  else if (mode == "projected")
    c.enrichment.mode = LiftMode::projected;
  else
    throw ConfigError("[enrichment] mode must be projected or generalized");
  c.enrichment.tol_rel = p.num("enrichment", "tol_rel", 1e-4);
  c.enrichment.max_enrichments = static_cast<int>(p.integer("enrichment", "max_m", 8));
  if (c.enrichment.max_enrichments < 0 || c.enrichment.max_enrichments > kMaxBorderColumns)
    throw ConfigError("[enrichment] max_m must be in [0, 16]");
  c.enrichment.delta_norm = p.num("enrichment", "delta_norm", 1e-10);
  c.enrichment.schur_eps_factor = p.num("enrichment", "schur_eps_factor", 1e-10);
  c.enrichment.lift_quad = c.neural_quad;
  c.enrichment.solver = c.solver;

  TrainingConfig& t = c.enrichment.training;
  std::string widths = p.str("training", "widths", "32,32");
  t.hidden.clear();
  std::istringstream ws(widths);
  std::string tok;
  while (std::getline(ws, tok, ',')) {
    tok = detail::ConfigParser::trim(tok);
    if (tok.empty()) continue;
    try {
      t.hidden.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw ConfigError("[training] widths: not an integer list: '" + widths + "'");
    }
    if (t.hidden.back() < 1) throw ConfigError("[training] widths must be positive");
  }
  if (t.hidden.empty()) throw ConfigError("[training] widths must list at least one layer");
  t.restarts = static_cast<int>(p.integer("training", "restarts", 4));
  t.steps = static_cast<int>(p.integer("training", "steps", 2000));
  if (t.restarts < 1 || t.steps < 1)
    throw ConfigError("[training] restarts and steps must be >= 1");
  t.lr = p.num("training", "lr", 1e-3);
  if (!(t.lr > 0.0)) throw ConfigError("[training] lr must be positive");
  t.seed = static_cast<std::uint64_t>(p.integer("training", "seed", 1));
  t.quad.degree = static_cast<int>(p.integer("training", "quad_degree", 4));
  t.quad.subdivisions = static_cast<int>(p.integer("training", "quad_subdivisions", 1));
  if (t.quad.subdivisions < 1) throw ConfigError("[training] quad_subdivisions must be >= 1");

  c.levels = static_cast<int>(p.integer("convergence", "levels", 4));
  if (c.levels < 1) throw ConfigError("[convergence] levels must be >= 1");

  c.out_dir = p.str("output", "dir", c.out_dir);
  return c;
}

inline RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

}  // namespace wg
