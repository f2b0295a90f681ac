#include "hsflow/acceptance.hpp"
#include "hsflow/algebrachk.hpp"
#include "hsflow/io.hpp"
#include "hsflow/problems.hpp"
#include "hsflow/skeleton.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using nlohmann::json;

int exit_check_failure(const std::string& msg) {
  std::cerr << "check failure: " << msg << "\n";
  return 1;
}

int exit_usage(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 2;
}

std::filesystem::path out_path(const std::string& out_dir,
                               const std::string& file) {
  std::filesystem::path p(file);
  if (!out_dir.empty()) p = std::filesystem::path(out_dir) / p;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  return p;
}

int run_command(const std::string& config_path, std::uint64_t seed_override,
                bool has_seed, const std::string& out_dir) {
  hsflow::ExperimentConfig cfg = hsflow::load_config(config_path, "run");
  if (has_seed) cfg.seed = seed_override;
  hsflow::Problem prob =
      hsflow::make_problem(cfg.space, cfg.field, cfg.seed, cfg.field_coeffs);
  const hsflow::Skeleton skel = hsflow::named_skeleton(cfg.method);
  const hsflow::IsotropyChoice nu = prob.nu_of_h(cfg.step);
  hsflow::Matrix x = cfg.x0 == "origin"
                         ? prob.entry.space.origin
                         : prob.entry.space.sample_point(
                               hsflow::mix_seed(cfg.seed, 0x583030ULL));
  std::vector<hsflow::Matrix> points{x};
  for (long n = 0; n < cfg.steps; ++n) {
    try {
      x = hsflow::step(skel, prob.entry.space, nu, x);
    } catch (const std::runtime_error& err) {
      return exit_check_failure("step " + std::to_string(n + 1) + ": " +
                                err.what());
    }
    points.push_back(x);
  }
  const auto path = out_path(out_dir, cfg.out);
  std::ofstream out(path);
  if (!out) return exit_usage("cannot write '" + path.string() + "'");
  hsflow::write_trajectory_csv(out, prob.entry.space, points, cfg.step);
  std::cout << "wrote " << points.size() << " rows to " << path.string()
            << " (final " << prob.entry.space.invariant_name << " "
            << hsflow::format_real(prob.entry.space.invariant_of(x)) << ")\n";
  return 0;
}

int orders_command(const std::string& config_path, std::uint64_t seed_override,
                   bool has_seed, const std::string& out_dir) {
  hsflow::ExperimentConfig cfg = hsflow::load_config(config_path, "orders");
  if (has_seed) cfg.seed = seed_override;
  hsflow::Problem prob =
      hsflow::make_problem(cfg.space, cfg.field, cfg.seed, cfg.field_coeffs);
  const hsflow::Skeleton skel = hsflow::named_skeleton(cfg.method);
  const hsflow::Matrix x0 =
      cfg.x0 == "origin" ? prob.entry.space.origin
                         : prob.entry.space.sample_point(
                               hsflow::mix_seed(cfg.seed, 0x583030ULL));
  hsflow::Matrix reference;
  if (prob.exact) {
    reference = prob.exact(cfg.t_final, x0);
  } else {
    const double h_ref = cfg.h_list.back() / 100.0;
    const auto steps = static_cast<long>(std::llround(cfg.t_final / h_ref));
    const hsflow::IsotropyChoice nu = prob.nu_of_h(h_ref);
    const hsflow::Skeleton cf4 = hsflow::named_skeleton("cf4");
    reference = x0;
    for (long n = 0; n < steps; ++n) {
      reference = hsflow::step(cf4, prob.entry.space, nu, reference);
    }
  }
  hsflow::OrderReport report;
  try {
    report = hsflow::observed_order(skel, prob.entry.space, prob.nu_of_h, x0,
                                    cfg.h_list, reference, cfg.t_final);
  } catch (const std::runtime_error& err) {
    return exit_check_failure(err.what());
  }

  const auto path = out_path(out_dir, cfg.out);
  std::ofstream out(path);
  if (!out) return exit_usage("cannot write '" + path.string() + "'");
  out << "h,error,local_slope\n";
  for (std::size_t i = 0; i < report.step_sizes.size(); ++i) {
    out << hsflow::format_real(report.step_sizes[i]) << ","
        << hsflow::format_real(report.errors[i]) << ",";
    if (i + 1 < report.step_sizes.size() && report.errors[i] > 0.0 &&
        report.errors[i + 1] > 0.0) {
      const double slope =
          std::log(report.errors[i] / report.errors[i + 1]) /
          std::log(report.step_sizes[i] / report.step_sizes[i + 1]);
      out << hsflow::format_real(slope);
    }
    out << "\n";
  }
  if (report.exact_to_precision) {
    out << "# exact to precision\n";
    std::cout << cfg.method << " on " << cfg.space
              << ": exact to precision\n";
  } else {
    out << "# fitted_order " << hsflow::format_real(report.observed_order)
        << "\n";
    std::cout << cfg.method << " on " << cfg.space << ": fitted order "
              << report.observed_order << "\n";
  }
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

int classify_command(const std::string& basis_path,
                     const std::string& builtin) {
  hsflow::SubalgebraSplit split;
  if (!builtin.empty()) {
    split = hsflow::builtin_split(builtin);
  } else {
    split = hsflow::load_basis_file(basis_path);
  }
  auto mark = [](bool b) { return b ? "✓" : "✗"; };
  if (!split.m_basis.empty()) {
    const hsflow::Classification c = hsflow::classify(split);
    std::cout << "reductive " << mark(c.reductive) << "  symmetric "
              << mark(c.symmetric) << "  flat " << mark(c.flat)
              << "   (residuals " << c.residuals[0] << ", " << c.residuals[1]
              << ", " << c.residuals[2] << "; Lie-algebra criterion)\n";
  } else {
    std::cout << "no candidate complement supplied; skipping "
                 "reductive/symmetric/flat classification\n";
  }
  const hsflow::ComplementSearch search =
      hsflow::find_reductive_complements(split.g_basis, split.h_basis);
  if (search.empty) {
    std::cout << "complement search: no reductive complement exists (best "
                 "section residual "
              << search.residual << ")\n";
  } else if (search.directions.empty()) {
    std::cout << "complement search: unique complement\n";
  } else {
    std::cout << "complement search: affine solution set of dimension "
              << search.directions.size() << "\n";
  }
  return 0;
}

int acceptance_command(bool corrupt, const std::vector<int>& only, bool serial,
                       std::uint64_t seed, bool has_seed,
                       const std::string& out_dir) {
  hsflow::AcceptanceOptions options;
  options.corrupt = corrupt;
  options.only = only;
  options.exec = serial ? hsflow::Exec::Serial : hsflow::Exec::Parallel;
  if (has_seed) options.seed = seed;
  const auto results = hsflow::run_acceptance(options);
  hsflow::print_report(std::cout, results);
  if (!out_dir.empty()) {
    json j = json::array();
    for (const auto& res : results) {
      json checks = json::array();
      for (const auto& rec : res.records) {
        checks.push_back({{"name", rec.name},
                          {"params", rec.params},
                          {"value", rec.value},
                          {"comparator", rec.comparator},
                          {"threshold", rec.threshold},
                          {"target", rec.target},
                          {"pass", rec.pass}});
      }
      j.push_back({{"id", res.id},
                   {"title", res.title},
                   {"pass", res.pass},
                   {"seconds", res.seconds},
                   {"checks", checks}});
    }
    const auto path = out_path(out_dir, "acceptance_report.json");
    std::ofstream out(path);
    out << j.dump(2) << "\n";
    std::cout << "wrote " << path.string() << "\n";
  }
  return hsflow::all_passed(results) ? 0 : 1;
}

int list_command() {
  std::cout << "spaces:\n";
  for (const auto& s : hsflow::space_catalog()) std::cout << "  " << s << "\n";
  std::cout << "methods:\n ";
  for (const auto& s : hsflow::skeleton_names()) std::cout << " " << s;
  std::cout << "\nfields:\n ";
  for (const auto& s : hsflow::field_names()) std::cout << " " << s;
  std::cout << "\nbuiltin bases (classify --builtin):\n ";
  for (const auto& s : hsflow::builtin_split_names()) std::cout << " " << s;
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equivariant integrators on homogeneous spaces"};
  app.require_subcommand(1);

  std::string config_path, out_dir, basis_path, builtin;
  std::uint64_t seed = 0;
  bool corrupt = false, serial = false;
  std::vector<int> only;

  auto* run = app.add_subcommand("run", "integrate and write a trajectory");
  run->add_option("--config", config_path, "experiment config file")
      ->required();
  auto* run_seed = run->add_option("--seed", seed, "override config seed");
  run->add_option("--out", out_dir, "output directory");

  auto* orders =
      app.add_subcommand("orders", "empirical convergence-order table");
  orders->add_option("--config", config_path, "experiment config file")
      ->required();
  auto* orders_seed = orders->add_option("--seed", seed, "override seed");
  orders->add_option("--out", out_dir, "output directory");

  auto* classify = app.add_subcommand(
      "classify", "reductive/symmetric/flat verdicts for a basis file");
  auto* basis_opt = classify->add_option("--basis", basis_path, "basis file");
  auto* builtin_opt =
      classify->add_option("--builtin", builtin, "builtin split name");
  basis_opt->excludes(builtin_opt);

  auto* acceptance =
      app.add_subcommand("acceptance", "run the full acceptance suite");
  acceptance->add_flag("--corrupt", corrupt,
                       "inject a corrupted connection (suite must fail)");
  acceptance->add_option("--criterion", only, "run only these criterion ids");
  acceptance->add_flag("--serial", serial, "disable OpenMP sweeps");
  auto* acc_seed = acceptance->add_option("--seed", seed, "override seed");
  acceptance->add_option("--out", out_dir,
                         "directory for acceptance_report.json");

  app.add_subcommand("list", "registered spaces, methods, fields and bases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) {
      return run_command(config_path, seed, !run_seed->empty(), out_dir);
    }
    if (orders->parsed()) {
      return orders_command(config_path, seed, !orders_seed->empty(), out_dir);
    }
    if (classify->parsed()) {
      if (basis_path.empty() && builtin.empty()) {
        return exit_usage("classify: need --basis or --builtin");
      }
      return classify_command(basis_path, builtin);
    }
    if (acceptance->parsed()) {
      return acceptance_command(corrupt, only, serial, seed,
                                !acc_seed->empty(), out_dir);
    }
    return list_command();
  } catch (const std::invalid_argument& err) {
    return exit_usage(err.what());
  } catch (const std::exception& err) {
    return exit_check_failure(err.what());
  }
}
