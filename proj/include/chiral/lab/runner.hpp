#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chiral/lab/config.hpp"
#include "chiral/lab/io.hpp"

namespace chiral::lab {

struct RunResult {
  std::filesystem::path dir;
  RunManifest manifest;
  std::vector<std::string> summary;  // human-readable lines for the console
};

/// Dispatches the configured mode and writes CSVs plus manifest.json into
/// the output directory (`out_dir` if given, else run.output). Module errors
/// are rethrown as RuntimeFailure carrying the original message.
RunResult run(const ExperimentConfig& config, const std::optional<std::filesystem::path>& out_dir = std::nullopt);
RunResult run_file(const std::string& path, const std::map<std::string, std::string>& overrides = {},
                   const std::optional<std::filesystem::path>& out_dir = std::nullopt);

struct FigureOptions {
  std::uint64_t seed = 1;
  std::optional<int> n_traj;     // overrides the preset trajectory count
  std::optional<Real> t_final;   // overrides the preset final time
};

/// Writes one CSV per curve of the named figure. Throws UnknownFigure.
RunResult reproduce_figure(const std::string& name, const std::filesystem::path& out_dir,
                           const FigureOptions& options = {});

/// Rb/Yb estimate report written to `out_dir`.
RunResult run_estimates(const std::filesystem::path& out_dir, Real threshold = 0.1);

/// Runs the config once per value of `key` ("section.key") on a uniform grid
/// and writes each run into out/step_NNN, plus sweep.csv listing the values.
RunResult sweep(const std::string& path, const std::string& key, Real from, Real to, int steps,
                const std::optional<std::filesystem::path>& out_dir = std::nullopt);

}  // namespace chiral::lab
