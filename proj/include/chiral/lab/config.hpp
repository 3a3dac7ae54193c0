#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "chiral/chain/params.hpp"
#include "chiral/lab/units.hpp"
#include "chiral/reservoir/plane_wave.hpp"

namespace chiral::lab {

enum class Mode { Spectrum, RatesSweep, Evolve, Steady, GapScan, ImperfectionScan, Trajectories, Estimates, Validate };

const char* to_string(Mode m);
Mode parse_mode(const std::string& s);

struct RunSection {
  Mode mode = Mode::Steady;
  std::string output = "results";
  std::uint64_t seed = 1;
  Real threshold = 0.1;  // pass threshold for "<<" inequalities
};

struct GridSection {
  Index points = 4096;
  Real k_min = -4.0, k_max = 4.0;
};

struct SweepSection {
  Real from = 0.01, to = 2.0;
  int steps = 200;
  bool recenter = false;
};

struct EvolveSection {
  Real t_final = 100.0;
  int points = 101;
  Real rtol = 1e-8, atol = 1e-10;
  std::string initial = "ground";  // ground | dimer
};

struct ScanSection {
  std::string axis;  // gamma_ratio | rabi | epsilon | gamma_prime | detuning
  std::vector<Real> values;
};

struct TrajectorySection {
  int n_traj = 64;
  Real dt_max = std::numeric_limits<Real>::infinity();
  bool global_purity = true;
};

struct LatticeSection {
  bool present = false;
  Real d = 0.0;      // lattice period (1/k0)
  Real k_lat = 0.0;  // lattice wavevector (k0); 0 selects pi/d
  Real v0 = 0.0;     // lattice depth (E0), recorded only
};

/// Parsed flat key-value configuration. Sections: run, units, reservoir,
/// chain, lattice, grid, sweep, evolve, scan, trajectories, validate.
struct ExperimentConfig {
  std::string canonical;  // sorted "section.key = value" lines; hashed for the manifest
  UnitSystem units;
  bool has_reservoir = false;
  bool has_chain = false;
  reservoir::ReservoirParams reservoir;
  Real omega = 1.46;  // transition frequency hbar*omega (E0)
  chain::ChainParams chain;
  RunSection run;
  GridSection grid;
  SweepSection sweep;
  EvolveSection evolve;
  ScanSection scan;
  TrajectorySection trajectories;
  LatticeSection lattice;
  Real rate_scale = 1.0;  // [validate] multiplier on the reservoir decay rates
};

/// Parses INI text. `overrides` maps "section.key" to a replacement value.
/// Throws ConfigError naming the offending key.
ExperimentConfig parse_config(const std::string& text, const std::map<std::string, std::string>& overrides = {});
ExperimentConfig load_config(const std::string& path, const std::map<std::string, std::string>& overrides = {});

}  // namespace chiral::lab
