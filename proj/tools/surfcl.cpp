#include "surfcl/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Narrow-band embedding solver for conservation laws on implicit curves and surfaces"};
  app.require_subcommand(1);

  app.add_subcommand("list", "List the experiment catalog");

  auto* run = app.add_subcommand("run", "Run an experiment and write errors, rates, mass series and snapshots");
  std::string experiment_pos, experiment_flag, n, order, cfl, embedding, extension, t_final, snapshots, out, config_file,
      weno_eps, sweep, sweep_order, dump;
  run->add_option("id", experiment_pos, "Experiment id (see 'list')");
  run->add_option("--experiment", experiment_flag, "Experiment id (see 'list')");
  run->add_option("--n", n, "Points per axis, comma list (n >= 41)");
  run->add_option("--order", order, "Scheme order: 1 or 3");
  run->add_option("--cfl", cfl, "CFL number in (0, 1] (default 0.5)");
  run->add_option("--embedding", embedding, "pushforward | straightforward");
  run->add_option("--extension", extension, "neumann | exact");
  run->add_option("--t-final", t_final, "Final time override");
  run->add_option("--snapshots", snapshots, "Number of output times on [0, T], ends included (default 2)");
  run->add_option("--out", out, "Output directory (default $SURFCL_OUTPUT_ROOT/<id>)");
  run->add_option("--config", config_file, "key=value configuration file; flags win");
  run->add_option("--weno-eps", weno_eps, "WENO smoothness epsilon (default 1e-6)");
  run->add_option("--sweep", sweep, "Extension solver: ordered | pseudo_time");
  run->add_option("--sweep-order", sweep_order, "Extension difference order: 1 | 2 (default 2)");
  run->add_option("--dump", dump, "Snapshot dumps: none | final | all (default final)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list")) {
      std::cout << surfcl::list_experiments();
      return 0;
    }
    surfcl::RunConfig cfg;
    if (!config_file.empty())
      for (const auto& [k, v] : surfcl::RunConfig::read_file(config_file)) cfg.set(k, v);
    if (!experiment_pos.empty() && !experiment_flag.empty() && experiment_pos != experiment_flag)
      throw surfcl::Error("cli", "experiment given twice with different values");
    const std::pair<const char*, const std::string*> flags[] = {
        {"experiment", experiment_flag.empty() ? &experiment_pos : &experiment_flag},
        {"n", &n}, {"order", &order}, {"cfl", &cfl}, {"embedding", &embedding}, {"extension", &extension},
        {"t_final", &t_final}, {"snapshots", &snapshots}, {"out", &out}, {"weno_eps", &weno_eps},
        {"sweep", &sweep}, {"sweep_order", &sweep_order}, {"dump", &dump}};
    for (const auto& [key, value] : flags)
      if (!value->empty()) cfg.set(key, *value);
    if (cfg.experiment.empty()) throw surfcl::Error("cli", "no experiment given; run 'surfcl list' for the catalog");

    const surfcl::RunReport report = surfcl::run_experiment(cfg);
    for (const auto& row : report.errors)
      std::cout << "n=" << row.n << " dx=" << row.dx << " l1=" << row.norms.l1 << " l2=" << row.norms.l2
                << " linf=" << row.norms.linf << '\n';
    if (report.rates.l1) std::cout << "rate l1=" << *report.rates.l1 << '\n';
    if (report.rates.l2) std::cout << "rate l2=" << *report.rates.l2 << '\n';
    if (report.rates.linf) std::cout << "rate linf=" << *report.rates.linf << '\n';
    std::cout << "output: " << report.output_dir << '\n';
    return 0;
  } catch (const surfcl::Error& e) {
    std::cerr << "surfcl: error in module " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "surfcl: error: " << e.what() << '\n';
    return 1;
  }
}
