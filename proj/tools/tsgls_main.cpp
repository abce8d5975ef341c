#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "tsgls/cli/cli.hpp"
#include "tsgls/mesh/io.hpp"

namespace {

using namespace tsgls;

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitInvalid = 2;

cli::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cli::ConfigError({"cannot open '" + path + "'"});
  try {
    return cli::json::parse(in);
  } catch (const cli::json::parse_error& e) {
    throw cli::ConfigError({std::string("JSON parse error: ") + e.what()});
  }
}

void print_problems(const std::string& what) { std::cerr << what << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-spectral stabilized finite element solver"};
  app.require_subcommand(1);
  int verbosity = 0;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbosity, "More logging (repeat for trace output)");
  app.add_flag("-q,--quiet", quiet, "Only warnings and errors");

  std::string config_path;
  std::optional<std::string> output_dir;
  bool serial = false;

  auto* run = app.add_subcommand("run", "Solve one case");
  run->add_option("config", config_path, "Case config (JSON)")->required();
  run->add_option("-o,--output", output_dir, "Output directory (overrides the config)");
  run->add_flag("--serial", serial, "Serial kernels; outputs are bit-reproducible");

  std::string study_path;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter study");
  sweep->add_option("study", study_path, "Study file (JSON)")->required();
  sweep->add_option("-o,--output", output_dir, "Output directory (overrides the study)");
  sweep->add_flag("--serial", serial, "Serial kernels");

  std::string mesh_config;
  std::string mesh_out;
  std::string vtk_out;
  auto* mesh_gen = app.add_subcommand("mesh-gen", "Write the mesh described by a config");
  mesh_gen->add_option("config", mesh_config, "Case config whose mesh block is used")->required();
  mesh_gen->add_option("-o,--output", mesh_out, "Mesh file to write")->required();
  mesh_gen->add_option("--vtk", vtk_out, "Also write the mesh as legacy VTK");

  std::string check_path;
  bool print_normalized = false;
  auto* validate = app.add_subcommand("validate-config", "Check a config without solving");
  validate->add_option("config", check_path, "Case config (JSON)")->required();
  validate->add_flag("--print", print_normalized, "Print the normalized config");

  CLI11_PARSE(app, argc, argv);

  spdlog::set_level(quiet            ? spdlog::level::warn
                    : verbosity >= 2 ? spdlog::level::trace
                    : verbosity == 1 ? spdlog::level::debug
                                     : spdlog::level::info);

  try {
    if (*run) {
      const auto cfg = cli::load_config(config_path);
      cli::RunOptions opts;
      opts.output_dir = output_dir;
      opts.serial = serial;
      const auto summary = cli::run_case(cfg, opts);
      spdlog::info("{} after {} steps in {:.2f} s", summary.converged ? "converged" : "NOT converged",
                   summary.steps, summary.wall_time);
      for (const auto& [name, e] : summary.errors) spdlog::info("error {}: {:.4e}", name, e);
      return summary.converged ? kExitOk : kExitNotConverged;
    }
    if (*sweep) {
      cli::RunOptions opts;
      opts.output_dir = output_dir;
      opts.serial = serial;
      const auto result = cli::run_sweep(read_json(study_path), opts);
      bool all_ok = true;
      for (const auto& p : result.points) {
        all_ok = all_ok && p.ok;
        const auto it = p.summary.errors.find(result.metric);
        spdlog::info("{} = {}: {} {}", result.parameter, p.value.dump(),
                     it == p.summary.errors.end() ? std::string("-") : fmt::format("{:.4e}", it->second),
                     p.ok ? "" : "(" + p.failure + ")");
      }
      if (result.report) {
        for (std::size_t k = 0; k < result.report->observed_order.size(); ++k) {
          spdlog::info("observed order {}: {:.3f}", k + 1, result.report->observed_order[k]);
        }
      }
      return all_ok ? kExitOk : kExitNotConverged;
    }
    if (*mesh_gen) {
      const auto cfg = cli::load_config(mesh_config);
      const auto m = cli::build_mesh(cfg);
      mesh::save_mesh(m, mesh_out);
      if (!vtk_out.empty()) mesh::write_vtk(m, {}, vtk_out);
      spdlog::info("{} nodes, {} elements written to {}", m.n_nodes(), m.n_elements(), mesh_out);
      return kExitOk;
    }
    if (*validate) {
      const auto cfg = cli::load_config(check_path);
      const auto m = cli::build_mesh(cfg);
      if (auto problems = cli::check_against_mesh(cfg, m); !problems.empty()) {
        throw cli::ConfigError(problems);
      }
      if (print_normalized) std::cout << cli::to_json(cfg).dump(2) << '\n';
      std::cerr << "config ok\n";
      return kExitOk;
    }
  } catch (const InvalidInput& e) {
    print_problems(e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNotConverged;
  }
  return kExitOk;
}
