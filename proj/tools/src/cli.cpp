#include "ineq_cli/cli.hpp"

#include <exception>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "ineq/error.hpp"

namespace ineq::cli {

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Statistical-mechanics toolkit for money, income and energy inequality", "ineq"};
  app.set_version_flag("--version", INEQ_VERSION);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Kinetic money-exchange simulation");
  s->add_option("--config", sim.config, "JSON run configuration (flags below override nothing)");
  s->add_option("--agents", sim.agents, "Number of agents N");
  s->add_option("--money", sim.money, "Total money M in quanta");
  s->add_option("--quantum", sim.quantum, "Money represented by one quantum")->capture_default_str();
  s->add_option("--steps", sim.steps, "Exchange steps (per replica when coupling)");
  s->add_option("--rule", sim.rule, "fixed: move delta quanta; uniform: move 1..delta quanta")
      ->check(CLI::IsMember({"fixed", "uniform"}))
      ->capture_default_str();
  s->add_option("--delta", sim.delta, "Transfer size in quanta")->capture_default_str();
  s->add_option("--floor", sim.floor, "Lowest allowed balance; negative allows debt")
      ->capture_default_str();
  s->add_option("--seed", sim.seed, "RNG seed (required)");
  s->add_option("--checkpoint-every", sim.checkpoint_every, "Steps between entropy checkpoints");
  s->add_option("--bin", sim.bin, "Histogram bin width in quanta")->capture_default_str();
  s->add_option("--out", sim.out, "Output directory")->required();
  s->add_flag("--couple", sim.couple, "Couple two systems and record fluxes");
  s->add_option("--agents2", sim.agents2, "Agents in system 2");
  s->add_option("--money2", sim.money2, "Money in system 2 (quanta)");
  s->add_option("--migration-rate", sim.migration_rate, "Share of steps that are migration attempts");
  s->add_option("--replicas", sim.replicas, "Independent coupled replicas")->capture_default_str();
  s->add_option("--threads", sim.threads, "Worker threads for replicas (0: all cores)");
  s->add_option("--equilibrate", sim.equilibrate,
                "Exchange steps run inside each system before coupling");

  FpArgs fp;
  auto* f = app.add_subcommand("fp", "Stationary and transient Fokker-Planck solutions");
  f->add_option("--spec", fp.spec, "JSON drift/diffusion spec");
  f->add_option("--kind", fp.kind, "additive | multiplicative | combined")
      ->check(CLI::IsMember({"additive", "multiplicative", "combined"}));
  f->add_option("--A0", fp.A0, "Additive drift");
  f->add_option("--B0", fp.B0, "Additive diffusion");
  f->add_option("--a", fp.a, "Multiplicative drift rate");
  f->add_option("--b", fp.b, "Multiplicative diffusion rate");
  f->add_option("--r-max", fp.r_max, "Upper grid bound (default 60 max(T, r0))");
  f->add_option("--r-min", fp.r_min, "Lower grid bound (multiplicative only)");
  f->add_option("--points", fp.points, "Stationary grid points")->capture_default_str();
  f->add_option("--transient-steps", fp.transient_steps, "Explicit time steps to run");
  f->add_option("--transient-points", fp.transient_points, "Uniform grid points for transients")
      ->capture_default_str();
  f->add_option("--dt", fp.dt, "Time step (default: stability limit)");
  f->add_option("--pulse", fp.pulse, "Start from a pulse at this income instead of P_s");
  f->add_option("--observe-every", fp.observe_every, "Steps between L1 records")
      ->capture_default_str();
  f->add_option("--out", fp.out, "Output directory")->required();

  FitIncomeArgs fit;
  auto* i = app.add_subcommand("fit-income", "Two-class fit of binned income data");
  i->add_option("--input", fit.inputs, "Income CSV (repeatable, one per year)");
  i->add_option("--year", fit.years, "Year tag per input (repeatable)");
  i->add_option("--mode", fit.mode, "Count column meaning: at_or_above | in_bin")
      ->check(CLI::IsMember({"at_or_above", "in_bin"}));
  i->add_option("--exp-window", fit.exp_window, "C range of the exponential fit: lo hi")
      ->expected(2);
  i->add_option("--tail-window", fit.tail_window, "C range of the power-law fit: lo hi")
      ->expected(2);
  i->add_flag("--refine", fit.refine, "Jointly refine (T, alpha, r0) after the staged fit");
  i->add_option("--synth-T", fit.synth_T, "Generate data from a model with this T");
  i->add_option("--synth-alpha", fit.synth_alpha, "Model alpha for --synth-T");
  i->add_option("--synth-r0", fit.synth_r0, "Model r0 for --synth-T");
  i->add_option("--synth-samples", fit.synth_samples, "Sampled returns")->capture_default_str();
  i->add_option("--synth-levels", fit.synth_levels, "Income levels")->capture_default_str();
  i->add_option("--synth-cmin", fit.synth_cmin, "Model C at the top level")->capture_default_str();
  i->add_option("--seed", fit.seed, "RNG seed for synthetic data")->capture_default_str();
  i->add_option("--out", fit.out, "Output directory")->required();

  EnergyArgs en;
  auto* e = app.add_subcommand("energy", "Population-weighted energy consumption inequality");
  e->add_option("--energy", en.energy, "country,year,value CSV (ktoe/yr, or kW with --per-capita)");
  e->add_option("--population", en.population, "country,year,value CSV (persons)");
  e->add_option("--year", en.years, "Year to analyse (repeatable)");
  e->add_flag("--per-capita", en.per_capita, "Energy values are already kW per person");
  e->add_flag("--fixture", en.fixture, "Use the embedded 22-country table");
  e->add_option("--export-fixture", en.export_fixture, "Write the fixture CSVs to this directory");
  e->add_option("--out", en.out, "Output directory");

  std::string manifest;
  auto* v = app.add_subcommand("verify", "Re-hash the inputs and outputs listed in a manifest");
  v->add_option("manifest", manifest, "manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    std::ostringstream o, r;
    const int code = app.exit(ex, o, r);
    out << o.str();
    err << r.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*s) return run_simulate(sim, out, err);
    if (*f) return run_fp(fp, out, err);
    if (*i) return run_fit_income(fit, out, err);
    if (*e) return run_energy(en, out, err);
    return run_verify(manifest, out, err);
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace ineq::cli
