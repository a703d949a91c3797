// wgnet: weak Galerkin solves, convergence studies, and residual-driven
// neural enrichment runs, driven by a sectioned key-value config file.
#include <CLI11.hpp>

#include "wg/cli.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "path to the run config")->required();
  cmd->add_option("--out", args.out_dir, "output directory (overrides [output] dir)");
  cmd->add_option("--seed", args.seed, "training seed (overrides [training] seed)")
      ->each([&args](const std::string&) { args.seed_set = true; });
}

wg::RunConfig load(const CommonArgs& args) {
  auto cfg = wg::RunConfig::parse_file(args.config_path);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (args.seed_set) cfg.enrichment.training.seed = args.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wgnet: weak Galerkin method with residual-driven neural enrichment"};
  app.require_subcommand(1);

  CommonArgs solve_args, conv_args, enrich_args, mesh_args, quad_args;
  auto* solve = app.add_subcommand("solve", "assemble and solve one problem");
  add_common(solve, solve_args);
  auto* conv = app.add_subcommand("convergence", "rate study over uniform refinements");
  add_common(conv, conv_args);
  auto* enrich = app.add_subcommand("enrich", "run the neural enrichment loop");
  add_common(enrich, enrich_args);
  auto* mesh_info = app.add_subcommand("mesh-info", "mesh statistics and validation");
  add_common(mesh_info, mesh_args);
  auto* vquad = app.add_subcommand("validate-quadrature", "monomial moment error table");
  add_common(vquad, quad_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    wg::CommandResult res;
    if (solve->parsed()) {
      auto cfg = load(solve_args);
      res = wg::cmd_solve(cfg, cfg.out_dir, solve_args.config_path);
    } else if (conv->parsed()) {
      auto cfg = load(conv_args);
      res = wg::cmd_convergence(cfg, cfg.out_dir, conv_args.config_path);
    } else if (enrich->parsed()) {
      auto cfg = load(enrich_args);
      res = wg::cmd_enrich(cfg, cfg.out_dir, enrich_args.config_path);
    } else if (mesh_info->parsed()) {
      res = wg::cmd_mesh_info(load(mesh_args), mesh_args.config_path);
    } else if (vquad->parsed()) {
      res = wg::cmd_validate_quadrature(load(quad_args), quad_args.config_path);
    }
    std::fputs(res.printed.c_str(), stdout);
    return 0;
  } catch (const wg::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
