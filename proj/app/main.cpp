#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chiral/lab/presets.hpp"
#include "chiral/lab/runner.hpp"

using namespace chiral;

namespace {

void print(const lab::RunResult& r) {
  for (const auto& line : r.summary) std::cout << line << "\n";
  for (const auto& n : r.manifest.notes) std::cout << "note: " << n << "\n";
  std::cout << "wrote " << r.manifest.outputs.size() << " files to " << r.dir.string() << " ("
            << r.manifest.wall_time_s << " s)\n";
}

std::map<std::string, std::string> parse_sets(const std::vector<std::string>& sets) {
  std::map<std::string, std::string> out;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "--set expects section.key=value, got '" + s + "'");
    out[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chiral reservoir and spin-chain laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir, figure, key;
  std::vector<std::string> sets;
  std::uint64_t seed = 1;
  int n_traj = 0;
  double t_final = 0.0, threshold = 0.1, from = 0.0, to = 0.0;
  int steps = 0;

  auto* run = app.add_subcommand("run", "run the mode given in a config file");
  run->add_option("config", config_path, "INI config")->required();
  run->add_option("--out", out_dir, "output directory (default: run.output)");
  run->add_option("--set", sets, "override section.key=value");

  auto* fig = app.add_subcommand("figure", "reproduce the datasets of a figure");
  fig->add_option("name", figure, "figure name")->required();
  fig->add_option("--out", out_dir, "output directory (default: the figure name)");
  fig->add_option("--seed", seed, "trajectory seed");
  fig->add_option("--n-traj", n_traj, "override the number of trajectories");
  fig->add_option("--t-final", t_final, "override the final time");
  auto* list = app.add_subcommand("figures", "list the figure names");

  auto* est = app.add_subcommand("estimates", "Rb/Yb experimental estimates");
  est->add_option("--out", out_dir, "output directory")->default_val("estimates");
  est->add_option("--threshold", threshold, "pass threshold for << inequalities");

  auto* val = app.add_subcommand("validate", "audit the approximations for a config");
  val->add_option("config", config_path, "INI config")->required();
  val->add_option("--out", out_dir, "output directory (default: run.output)");
  val->add_option("--set", sets, "override section.key=value");

  auto* sw = app.add_subcommand("sweep", "repeat a config over a parameter grid");
  sw->add_option("config", config_path, "INI config")->required();
  sw->add_option("--param", key, "section.key to vary")->required();
  sw->add_option("--from", from, "first value")->required();
  sw->add_option("--to", to, "last value")->required();
  sw->add_option("--steps", steps, "number of values")->required();
  sw->add_option("--out", out_dir, "output directory (default: run.output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto out = out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir);
  try {
    if (*run) {
      print(lab::run_file(config_path, parse_sets(sets), out));
    } else if (*val) {
      auto overrides = parse_sets(sets);
      overrides["run.mode"] = "validate";
      print(lab::run_file(config_path, overrides, out));
    } else if (*fig) {
      lab::FigureOptions o;
      o.seed = seed;
      if (n_traj > 0) o.n_traj = n_traj;
      if (t_final > 0.0) o.t_final = t_final;
      print(lab::reproduce_figure(figure, out.value_or(figure), o));
    } else if (*list) {
      for (const auto& n : lab::figure_names()) std::cout << n << "\n";
    } else if (*est) {
      print(lab::run_estimates(out_dir, threshold));
    } else if (*sw) {
      print(lab::sweep(config_path, key, from, to, steps, out));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::UnknownFigure ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: RuntimeFailure: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
