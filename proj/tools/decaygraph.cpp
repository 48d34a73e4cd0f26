#include "decaygraph/errors.hpp"
#include "decaygraph/io.hpp"
#include "decaygraph/reproduce.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

template <typename T>
void copy_if_set(const CLI::App& app, const char* flag, const T& value, std::optional<T>& out) {
  if (app.count(flag) > 0) out = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pure-decay lattice toolkit: build, diagonalize, analyze and drive directed graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(decaygraph::kToolVersion));

  std::string spec_path;
  std::string figure = "all";
  decaygraph::RunOptions options;
  double t = 0, gamma = 0, omega_min = 0, omega_max = 0, tolerance = 0;
  int source = 1, omega_steps = 0;

  auto add_common = [&](CLI::App* sub, bool needs_spec) {
    auto* spec = sub->add_option("--spec", spec_path, "Lattice spec file (JSON)");
    if (needs_spec) spec->required()->check(CLI::ExistingFile);
    sub->add_option("--out", options.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--t", t, "Override the hopping ratio of every axis");
    sub->add_option("--tolerance", tolerance, "Override the pass tolerance of the command");
  };

  const std::vector<std::pair<std::string, std::string>> commands{
      {"build", "Assemble the Hamiltonian and export entries and edges"},
      {"spectrum", "Eigenvalues and eigenvectors, numeric and/or closed form"},
      {"decay", "Pure-decay check and per-chain decay constants"},
      {"charges", "Amplitude and combinatorial decay charges"},
      {"drive", "Driven steady-state frequency sweep under uniform loss"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, true);
    if (name == "spectrum") {
      sub->add_flag("--analytic", options.analytic, "Closed-form spectrum");
      sub->add_flag("--numeric", options.numeric, "Dense numerical spectrum (default)");
    }
    if (name == "drive") {
      sub->add_option("--gamma", gamma, "Uniform loss rate");
      sub->add_option("--source", source, "Driven node (1-based)");
      sub->add_option("--omega-min", omega_min, "Sweep start");
      sub->add_option("--omega-max", omega_max, "Sweep end");
      sub->add_option("--omega-steps", omega_steps, "Sweep points")->check(CLI::PositiveNumber);
    }
  }
  auto* reproduce = app.add_subcommand("reproduce", "Run the canned figure checks");
  add_common(reproduce, false);
  reproduce->add_option("figure", figure, "Figure id or \"all\"")
      ->check(CLI::IsMember([] {
        auto ids = decaygraph::figure_ids();
        ids.push_back("all");
        return ids;
      }()));

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  copy_if_set(*sub, "--t", t, options.t);
  copy_if_set(*sub, "--tolerance", tolerance, options.tolerance);
  if (sub->get_name() == "drive") {
    copy_if_set(*sub, "--gamma", gamma, options.gamma);
    copy_if_set(*sub, "--source", source, options.source);
    copy_if_set(*sub, "--omega-min", omega_min, options.omega_min);
    copy_if_set(*sub, "--omega-max", omega_max, options.omega_max);
    copy_if_set(*sub, "--omega-steps", omega_steps, options.omega_steps);
  }
  options.figure = figure;

  try {
    const auto manifest = decaygraph::run_command(sub->get_name(), spec_path, options);
    for (const auto& line : manifest.summary) std::cout << line << "\n";
    for (const auto& path : manifest.outputs) std::cout << "wrote " << path << "\n";
    return manifest.exit_status;
  } catch (const decaygraph::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
