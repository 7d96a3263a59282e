#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "ineq/coupling.hpp"
#include "ineq/csv.hpp"
#include "ineq/energy.hpp"
#include "ineq/fokker_planck.hpp"
#include "ineq/income_fit.hpp"
#include "ineq/simulation.hpp"
#include "ineq_cli/cli.hpp"
#include "json.hpp"

namespace ineq::cli {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

template <class F>
std::string render(F&& writer) {
  std::ostringstream o;
  writer(o);
  return o.str();
}

}  // namespace

RunRecorder::RunRecorder(std::string subcommand, fs::path out_dir)
    : subcommand_(std::move(subcommand)), out_dir_(std::move(out_dir)) {
  std::error_code ec;
  fs::create_directories(out_dir_, ec);
  if (ec || !fs::is_directory(out_dir_))
    throw std::runtime_error(fmt::format("cannot create output directory {}", out_dir_.string()));
}

void RunRecorder::input(const std::string& path) { inputs_.push_back({path, sha256_file(path)}); }

void RunRecorder::write(const std::string& name, const std::string& content) {
  const fs::path p = out_dir_ / name;
  {
    std::ofstream o(p, std::ios::binary | std::ios::trunc);
    if (!o) throw std::runtime_error(fmt::format("cannot write {}", p.string()));
    o << content;
    if (!o) throw std::runtime_error(fmt::format("write failed for {}", p.string()));
  }
  outputs_.push_back({name, sha256_file(p)});
}

void RunRecorder::finish(const std::string& config_json) {
  Manifest m;
  m.tool_version = INEQ_VERSION;
  m.subcommand = subcommand_;
  m.config_json = config_json;
  m.inputs = inputs_;
  m.outputs = outputs_;
  m.created_utc = utc_now();
  const fs::path p = out_dir_ / "manifest.json";
  std::ofstream o(p, std::ios::binary | std::ios::trunc);
  if (!o) throw std::runtime_error(fmt::format("cannot write {}", p.string()));
  o << to_json(m);
}

// ---------------------------------------------------------------- simulate

namespace {

kinetic::SimulationConfig simulation_config(const SimulateArgs& a) {
  if (a.config) return kinetic::parse_simulation_config(read_file(*a.config));
  if (!a.seed) throw UsageError("simulate needs --seed");
  if (a.agents == 0 || a.steps == 0) throw UsageError("simulate needs --agents and --steps");
  kinetic::SimulationConfig c;
  c.n_agents = a.agents;
  c.total_money_quanta = a.money;
  c.quantum_value = a.quantum;
  c.rule.kind = a.rule == "uniform" ? kinetic::RuleKind::uniform_amount : kinetic::RuleKind::fixed_quantum;
  c.rule.delta = a.delta;
  c.rule.floor = a.floor;
  c.steps = a.steps;
  c.seed = *a.seed;
  c.checkpoint_every = a.checkpoint_every;
  c.rule.validate();
  return c;
}

int run_coupled(const SimulateArgs& a, const kinetic::SimulationConfig& c, std::ostream& out) {
  if (a.agents2 == 0) throw UsageError("--couple needs --agents2 and --money2");
  RunRecorder rec("simulate", a.out);
  if (a.config) rec.input(*a.config);

  auto first = kinetic::AgentEnsemble::equal_split(c.n_agents, c.total_money_quanta, c.quantum_value);
  auto second = kinetic::AgentEnsemble::equal_split(a.agents2, a.money2, c.quantum_value);
  if (a.equilibrate > 0) {
    Rng r1(c.seed, 1'000'001);
    Rng r2(c.seed, 1'000'002);
    for (std::uint64_t k = 0; k < a.equilibrate; ++k) {
      kinetic::exchange_step(first, c.rule, r1);
      kinetic::exchange_step(second, c.rule, r2);
    }
  }
  kinetic::CouplingOptions opts{c.rule, c.steps, a.migration_rate};
  const auto reports =
      kinetic::run_coupling_replicas(first, second, opts, a.replicas, c.seed, a.threads);

  std::ostringstream csv;
  csv << "replica,delta_M_quanta,delta_N,delta_S,exchanges_accepted,migrations_accepted\n";
  std::size_t money_positive = 0, entropy_nonneg = 0, agents_to_hotter = 0;
  const bool first_hotter =
      static_cast<double>(first.total()) / first.size() > static_cast<double>(second.total()) / second.size();
  for (std::size_t r = 0; r < reports.size(); ++r) {
    const auto& f = reports[r];
    csv << r << ',' << f.money_flux << ',' << f.agent_flux << ',' << csv::format_number(f.entropy_change)
        << ',' << f.exchanges_accepted << ',' << f.migrations_accepted << '\n';
    money_positive += (first_hotter ? f.money_flux > 0 : f.money_flux < 0);
    entropy_nonneg += f.entropy_change >= 0.0;
    agents_to_hotter += (first_hotter ? f.agent_flux < 0 : f.agent_flux > 0);
  }
  rec.write("flux.csv", csv.str());

  json cfg = json::parse(kinetic::to_json(c));
  cfg["couple"] = true;
  cfg["n_agents_2"] = a.agents2;
  cfg["total_money_quanta_2"] = a.money2;
  cfg["migration_rate"] = a.migration_rate;
  cfg["replicas"] = a.replicas;
  cfg["equilibrate_steps"] = a.equilibrate;

  json summary;
  summary["replicas"] = reports.size();
  summary["T1_initial"] = reports.empty() ? 0.0 : reports[0].initial_temperature_1;
  summary["T2_initial"] = reports.empty() ? 0.0 : reports[0].initial_temperature_2;
  summary["money_flows_hot_to_cold"] = money_positive;
  summary["entropy_non_negative"] = entropy_nonneg;
  summary["agents_flow_to_hotter"] = agents_to_hotter;
  const std::string s = summary.dump(2) + "\n";
  rec.write("summary.json", s);
  rec.write("config.json", cfg.dump(2) + "\n");
  rec.finish(cfg.dump());
  out << s;
  return kExitOk;
}

}  // namespace

int run_simulate(const SimulateArgs& a, std::ostream& out, std::ostream&) {
  kinetic::SimulationConfig c = simulation_config(a);
  if (a.couple) return run_coupled(a, c, out);

  RunRecorder rec("simulate", a.out);
  if (a.config) rec.input(*a.config);
  auto ens = kinetic::AgentEnsemble::equal_split(c.n_agents, c.total_money_quanta, c.quantum_value);
  kinetic::SimulationOptions opts;
  opts.steps = c.steps;
  opts.checkpoint_every = c.checkpoint_every;
  opts.seed = c.seed;
  opts.bin_quanta = a.bin;
  const auto traj = kinetic::run_simulation(ens, c.rule, opts);

  // Temperature in quanta measured from the floor, for the KS reference.
  const double t_quanta = static_cast<double>(ens.total()) / ens.size() - static_cast<double>(c.rule.floor);
  const double bin_width = static_cast<double>(a.bin) * c.quantum_value;
  const auto thermo = kinetic::temperature_and_potential(ens, bin_width);

  json summary;
  summary["steps"] = c.steps;
  summary["accepted"] = traj.accepted;
  summary["conservation_checks"] = traj.conservation_checks;
  summary["total_money_quanta"] = ens.total();
  summary["temperature"] = thermo.temperature;
  summary["chemical_potential"] = thermo.potential ? json(*thermo.potential) : json(nullptr);
  summary["entropy_final"] = traj.checkpoints.back().entropy;
  summary["entropy_equilibrium"] =
      kinetic::equilibrium_entropy(ens.size(), t_quanta * c.quantum_value, bin_width);
  summary["ks_exponential"] = t_quanta > 0.0 ? json(kinetic::ks_distance_exponential(ens, t_quanta, c.rule.floor))
                                             : json(nullptr);

  rec.write("trajectory.csv", render([&](std::ostream& o) { kinetic::write_trajectory_csv(o, traj); }));
  rec.write("histogram.csv",
            render([&](std::ostream& o) { kinetic::write_histogram_csv(o, traj.final_histogram); }));
  const std::string s = summary.dump(2) + "\n";
  rec.write("summary.json", s);
  json cfg = json::parse(kinetic::to_json(c));
  cfg["bin_quanta"] = a.bin;
  rec.write("config.json", cfg.dump(2) + "\n");
  rec.finish(cfg.dump());
  out << s;
  return kExitOk;
}

// ---------------------------------------------------------------------- fp

int run_fp(const FpArgs& a, std::ostream& out, std::ostream&) {
  std::optional<fp::DriftDiffusionSpec> spec;
  if (a.spec) {
    spec = fp::spec_from_json(read_file(*a.spec));
  } else if (a.kind == "additive") {
    spec = fp::DriftDiffusionSpec::additive(a.A0, a.B0);
  } else if (a.kind == "multiplicative") {
    spec = fp::DriftDiffusionSpec::multiplicative(a.a, a.b);
  } else if (a.kind == "combined") {
    spec = fp::DriftDiffusionSpec::combined(a.A0, a.B0, a.a, a.b);
  } else {
    throw UsageError("fp needs --spec or --kind");
  }

  RunRecorder rec("fp", a.out);
  if (a.spec) rec.input(*a.spec);
  const bool mult = spec->kind() == fp::DiffusionKind::multiplicative;
  double scale = 0.0;
  if (!mult) {
    scale = spec->temperature();
    if (spec->kind() == fp::DiffusionKind::combined) scale = std::max(scale, spec->crossover());
  }
  double r_min = 0.0;
  if (mult) {
    if (!a.r_min) throw UsageError("a multiplicative spec needs --r-min");
    r_min = *a.r_min;
  }
  const double r_max = a.r_max ? *a.r_max : mult ? 100.0 * r_min : 60.0 * scale;

  const auto grid = fp::make_grid(*spec, r_max, a.points, r_min);
  const auto dist = fp::stationary_solution(*spec, grid);
  rec.write("stationary.csv", render([&](std::ostream& o) { fp::write_distribution_csv(o, dist); }));

  std::ostringstream d2;
  d2 << "r,delta_r2\n";
  for (double r : grid) d2 << csv::format_number(r) << ',' << csv::format_number(fp::delta_r2_diagnostic(r, *spec)) << '\n';
  rec.write("delta_r2.csv", d2.str());

  json diag;
  diag["grid_points"] = grid.size();
  diag["r_max"] = r_max;
  diag["grid_mass"] = 1.0 - dist.tail_mass;
  diag["tail_mass"] = dist.tail_mass;
  diag["zero_flux_residual"] = fp::zero_flux_residual(dist, *spec);
  if (!mult) diag["T"] = spec->temperature();
  if (spec->kind() != fp::DiffusionKind::additive) diag["alpha"] = spec->pareto_exponent();
  if (spec->kind() == fp::DiffusionKind::combined) diag["r0"] = spec->crossover();

  if (a.transient_steps > 0) {
    if (mult) throw UsageError("transients need an additive or combined spec");
    const double t_max = a.r_max ? *a.r_max : 50.0 * scale;
    const auto ugrid = fp::make_uniform_grid(t_max, a.transient_points);
    auto target = fp::stationary_solution(*spec, ugrid);
    const double target_mass = fp::cell_mass(target);
    for (double& p : target.density) p /= target_mass;

    fp::GridDistribution start = target;
    if (a.pulse) {
      const auto w = fp::cell_widths(ugrid);
      const auto it = std::lower_bound(ugrid.begin(), ugrid.end(), *a.pulse);
      const auto k = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - ugrid.begin(), ugrid.size() - 1));
      std::fill(start.density.begin(), start.density.end(), 0.0);
      start.density[k] = 1.0 / w[k];
    }
    const double dt = a.dt ? *a.dt : fp::max_stable_dt(ugrid, *spec);
    std::ostringstream l1;
    l1 << "step,time,l1_to_stationary,mass\n";
    auto record = [&](std::size_t step, const fp::GridDistribution& st) {
      l1 << step << ',' << csv::format_number(dt * static_cast<double>(step)) << ','
         << csv::format_number(fp::l1_distance(st, target)) << ','
         << csv::format_number(fp::cell_mass(st)) << '\n';
    };
    record(0, start);
    const auto final_state = fp::evolve_transient(start, *spec, dt, a.transient_steps, record, a.observe_every);
    rec.write("transient.csv", render([&](std::ostream& o) { fp::write_distribution_csv(o, final_state); }));
    rec.write("transient_l1.csv", l1.str());
    diag["transient_dt"] = dt;
    diag["transient_steps"] = a.transient_steps;
    diag["transient_l1_final"] = fp::l1_distance(final_state, target);
  }

  const std::string s = diag.dump(2) + "\n";
  rec.write("diagnostics.json", s);
  json cfg = json::parse(fp::to_json(*spec));
  cfg["r_max"] = r_max;
  cfg["r_min"] = r_min;
  cfg["points"] = a.points;
  cfg["transient_steps"] = a.transient_steps;
  cfg["transient_points"] = a.transient_points;
  cfg["dt"] = a.dt ? json(*a.dt) : json(nullptr);
  cfg["pulse"] = a.pulse ? json(*a.pulse) : json(nullptr);
  cfg["observe_every"] = a.observe_every;
  rec.write("spec.json", fp::to_json(*spec) + "\n");
  rec.finish(cfg.dump());
  out << s;
  return kExitOk;
}

// -------------------------------------------------------------- fit-income

int run_fit_income(const FitIncomeArgs& a, std::ostream& out, std::ostream&) {
  income::FitOptions opts;
  if (!a.exp_window.empty()) opts.exponential_window = {a.exp_window[0], a.exp_window[1]};
  if (!a.tail_window.empty()) opts.tail_window = {a.tail_window[0], a.tail_window[1]};
  opts.joint_refine = a.refine;
  std::optional<income::CountMode> mode;
  if (a.mode) mode = *a.mode == "at_or_above" ? income::CountMode::at_or_above : income::CountMode::in_bin;

  if (a.synth_T && !a.inputs.empty()) throw UsageError("use either --input or --synth-T");
  if (!a.synth_T && a.inputs.empty()) throw UsageError("fit-income needs --input or --synth-T");
  if (!a.years.empty() && a.years.size() != std::max<std::size_t>(a.inputs.size(), 1))
    throw UsageError("give one --year per --input");

  RunRecorder rec("fit-income", a.out);
  std::vector<income::IncomeBinTable> tables;
  json cfg;
  if (a.synth_T) {
    const TwoClassModel model(*a.synth_T, a.synth_alpha, a.synth_r0);
    Rng rng(a.seed);
    const int year = a.years.empty() ? 0 : a.years[0];
    tables.push_back(income::synthesize_income_table(model, a.synth_samples, a.synth_levels,
                                                     a.synth_cmin, rng, year));
    rec.write("synthetic_income.csv",
              render([&](std::ostream& o) { income::write_income_csv(o, tables.back()); }));
    cfg["synthetic"] = {{"T", *a.synth_T}, {"alpha", a.synth_alpha}, {"r0", a.synth_r0},
                        {"samples", a.synth_samples}, {"levels", a.synth_levels},
                        {"c_min", a.synth_cmin}, {"seed", a.seed}};
  } else {
    for (std::size_t k = 0; k < a.inputs.size(); ++k) {
      std::ifstream in(a.inputs[k], std::ios::binary);
      if (!in) throw std::runtime_error(fmt::format("cannot read {}", a.inputs[k]));
      const int year = a.years.empty() ? 0 : a.years[k];
      tables.push_back(income::read_income_csv(in, a.inputs[k], year, mode));
      rec.input(a.inputs[k]);
    }
    cfg["inputs"] = a.inputs;
  }
  cfg["years"] = a.years;
  cfg["mode"] = a.mode ? json(*a.mode) : json(nullptr);
  cfg["exp_window"] = {opts.exponential_window.lo, opts.exponential_window.hi};
  cfg["tail_window"] = {opts.tail_window.lo, opts.tail_window.hi};
  cfg["refine"] = a.refine;

  std::ostringstream rows;
  rows << income::table_header() << '\n';
  for (const auto& t : tables) {
    const auto report = income::fit_report(t, opts);
    rec.write(fmt::format("fit_{}.json", t.year), income::to_json(report) + "\n");
    rec.write(fmt::format("lorenz_{}.csv", t.year),
              render([&](std::ostream& o) { write_lorenz_csv(o, report.lorenz); }));
    rows << income::table_row(report) << '\n';
  }
  rec.write("table.csv", rows.str());
  rec.finish(cfg.dump());
  out << rows.str();
  return kExitOk;
}

// ------------------------------------------------------------------ energy

int run_energy(const EnergyArgs& a, std::ostream& out, std::ostream& err) {
  if (a.export_fixture) {
    RunRecorder rec("energy", *a.export_fixture);
    std::ostringstream e, p;
    energy::write_fixture_csv(e, p);
    rec.write("fixture_energy.csv", e.str());
    rec.write("fixture_population.csv", p.str());
    rec.finish(json{{"export_fixture", true}}.dump());
    return kExitOk;
  }
  if (a.out.empty()) throw UsageError("energy needs --out");
  if (a.fixture == (a.energy.has_value() || a.population.has_value()))
    throw UsageError("use either --fixture or both --energy and --population");
  if (!a.fixture && !(a.energy && a.population))
    throw UsageError("--energy and --population go together");
  std::vector<int> years = a.years;
  if (years.empty()) {
    if (!a.fixture) throw UsageError("energy needs --year");
    years = {1990, 2000, 2005};
  }

  RunRecorder rec("energy", a.out);
  if (!a.fixture) {
    rec.input(*a.energy);
    rec.input(*a.population);
  }
  std::ostringstream trend;
  trend << "year,world_avg_kw,gini,countries\n";
  json summaries = json::array();
  for (int year : years) {
    std::vector<energy::CountryRecord> records;
    std::vector<energy::DroppedRow> dropped;
    if (a.fixture) {
      records = energy::table2_fixture(year);
    } else {
      std::ifstream e(*a.energy, std::ios::binary);
      std::ifstream p(*a.population, std::ios::binary);
      if (!e || !p) throw std::runtime_error("cannot read energy or population file");
      auto res = energy::ingest_wri(e, p, year, a.per_capita, *a.energy, *a.population);
      records = std::move(res.records);
      dropped = std::move(res.dropped);
    }
    const auto cdf = energy::weighted_cdf(records);
    const auto summary = energy::summarize(records, year);
    const auto curve = energy::lorenz_energy(records);
    rec.write(fmt::format("cdf_{}.csv", year), render([&](std::ostream& o) { energy::write_cdf_csv(o, cdf); }));
    rec.write(fmt::format("overlay_{}.csv", year), render([&](std::ostream& o) {
                energy::write_exponential_overlay_csv(o, cdf, summary.world_avg_kw);
              }));
    rec.write(fmt::format("lorenz_{}.csv", year), render([&](std::ostream& o) { write_lorenz_csv(o, curve); }));
    rec.write(fmt::format("summary_{}.json", year), energy::to_json(summary) + "\n");
    if (!a.fixture) {
      std::ostringstream d;
      d << "source,line,country,reason\n";
      for (const auto& r : dropped)
        d << csv::escape(r.source) << ',' << r.line << ',' << csv::escape(r.country) << ','
          << csv::escape(r.reason) << '\n';
      rec.write(fmt::format("dropped_{}.csv", year), d.str());
      if (!dropped.empty()) err << fmt::format("{}: {} rows dropped\n", year, dropped.size());
    }
    trend << year << ',' << csv::format_number(summary.world_avg_kw) << ','
          << csv::format_number(summary.gini) << ',' << summary.countries << '\n';
    summaries.push_back(json::parse(energy::to_json(summary)));
  }
  rec.write("gini_trend.csv", trend.str());
  json cfg;
  cfg["fixture"] = a.fixture;
  cfg["energy"] = a.energy ? json(*a.energy) : json(nullptr);
  cfg["population"] = a.population ? json(*a.population) : json(nullptr);
  cfg["years"] = years;
  cfg["per_capita"] = a.per_capita;
  rec.finish(cfg.dump());
  out << summaries.dump(2) << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------ verify

int run_verify(const std::string& manifest, std::ostream& out, std::ostream& err) {
  const auto bad = verify_manifest(manifest);
  if (bad.empty()) {
    out << "ok\n";
    return kExitOk;
  }
  for (const auto& m : bad) err << m.path << ": " << m.reason << '\n';
  return kExitFailure;
}

}  // namespace ineq::cli
