#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ineq_cli/manifest.hpp"

namespace ineq::cli {

// Flag combination the grammar cannot express (missing seed, both --fixture
// and --energy, ...). Maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Collects the files a run reads and writes, then emits the manifest.
class RunRecorder {
 public:
  RunRecorder(std::string subcommand, std::filesystem::path out_dir);

  void input(const std::string& path);
  // Writes `content` to out_dir/name and records it.
  void write(const std::string& name, const std::string& content);
  void finish(const std::string& config_json);

  const std::filesystem::path& out_dir() const { return out_dir_; }

 private:
  std::string subcommand_;
  std::filesystem::path out_dir_;
  std::vector<FileDigest> inputs_;
  std::vector<FileDigest> outputs_;
};

struct SimulateArgs {
  std::optional<std::string> config;
  std::size_t agents = 0;
  std::int64_t money = 0;
  double quantum = 1.0;
  std::uint64_t steps = 0;
  std::string rule = "fixed";
  std::int64_t delta = 1;
  std::int64_t floor = 0;
  std::optional<std::uint64_t> seed;
  std::uint64_t checkpoint_every = 0;
  std::int64_t bin = 1;
  std::string out;
  // two-system coupling
  bool couple = false;
  std::size_t agents2 = 0;
  std::int64_t money2 = 0;
  double migration_rate = 0.0;
  std::size_t replicas = 1;
  std::size_t threads = 0;
  std::uint64_t equilibrate = 0;
};

struct FpArgs {
  std::optional<std::string> spec;
  std::string kind;
  double A0 = 0, B0 = 0, a = 0, b = 0;
  std::optional<double> r_max;
  std::optional<double> r_min;
  std::size_t points = 4000;
  std::size_t transient_steps = 0;
  std::size_t transient_points = 1000;
  std::optional<double> dt;
  std::optional<double> pulse;
  std::size_t observe_every = 100;
  std::string out;
};

struct FitIncomeArgs {
  std::vector<std::string> inputs;
  std::vector<int> years;
  std::optional<std::string> mode;
  std::vector<double> exp_window;
  std::vector<double> tail_window;
  bool refine = false;
  // synthetic data instead of files
  std::optional<double> synth_T;
  double synth_alpha = 0, synth_r0 = 0;
  std::size_t synth_samples = 100000;
  std::size_t synth_levels = 50;
  double synth_cmin = 1e-4;
  std::uint64_t seed = 0;
  std::string out;
};

struct EnergyArgs {
  std::optional<std::string> energy;
  std::optional<std::string> population;
  std::vector<int> years;
  bool per_capita = false;
  bool fixture = false;
  std::optional<std::string> export_fixture;
  std::string out;
};

int run_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int run_fp(const FpArgs& args, std::ostream& out, std::ostream& err);
int run_fit_income(const FitIncomeArgs& args, std::ostream& out, std::ostream& err);
int run_energy(const EnergyArgs& args, std::ostream& out, std::ostream& err);
int run_verify(const std::string& manifest, std::ostream& out, std::ostream& err);

}  // namespace ineq::cli
