#include "tumorfa/cli.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "tumorfa/config.hpp"
#include "tumorfa/diagnostics.hpp"
#include "tumorfa/io.hpp"
#include "tumorfa/simgen.hpp"
#include "tumorfa/summary.hpp"

namespace tumorfa {

namespace {

constexpr const char* kRunConfigFile = "run_config.txt";

fs::path chain_dir(const fs::path& run, int k) { return run / ("chain_" + std::to_string(k)); }

std::vector<fs::path> list_chains(const fs::path& run) {
  std::vector<std::pair<int, fs::path>> found;
  for (const auto& entry : fs::directory_iterator(run)) {
    const auto name = entry.path().filename().string();
    if (!entry.is_directory() || name.rfind("chain_", 0) != 0) continue;
    try {
      found.emplace_back(std::stoi(name.substr(6)), entry.path());
    } catch (const std::exception&) {
    }
  }
  if (found.empty()) throw std::runtime_error("no chain_* directories under " + run.string());
  std::sort(found.begin(), found.end());
  std::vector<fs::path> out;
  for (auto& [k, p] : found) out.push_back(p);
  return out;
}

std::vector<Trace> load_traces(const fs::path& run) {
  std::vector<Trace> traces;
  for (const auto& dir : list_chains(run)) traces.push_back(read_trace(dir));
  return traces;
}

std::string run_info(const RunConfig& cfg, const std::vector<Trace>& traces) {
  nlohmann::json j;
  j["chains"] = traces.size();
  j["seed"] = cfg.mcmc.seed;
  j["iterations"] = cfg.mcmc.iterations;
  j["burn_in"] = cfg.mcmc.burn_in;
  j["thin"] = cfg.mcmc.thin;
  j["hyperparams"] = {{"r", cfg.hyperparams.r},     {"alpha", cfg.hyperparams.alpha}, {"a", cfg.hyperparams.a},
                      {"a0", cfg.hyperparams.a0},   {"a00", cfg.hyperparams.a00},     {"b00", cfg.hyperparams.b00},
                      {"c_max", cfg.hyperparams.c_max}};
  j["hyperparams_hash"] = traces.front().meta.hyperparams_hash;
  j["data_hash"] = traces.front().meta.data_hash;
  int failures = 0;
  for (const auto& t : traces) failures += t.meta.rj_failures;
  j["rj_failures"] = failures;
  return j.dump();
}

void summarize_run(const RunConfig& cfg, const CountData& data,
                   const std::vector<Trace>& traces, const fs::path& out_dir, std::ostream& out) {
  const FitSummary summary = summarize(merge_traces(traces));
  write_summary(summary, data, out_dir, run_info(cfg, traces));
  out << "C* = " << summary.C_star << " (posterior " << summary.posterior_C.at(summary.C_star) << ", "
      << summary.samples_at_C_star << " samples), p0* = " << summary.p0_star << "\n"
      << "summary written to " << out_dir.string() << "\n";
}

struct FitFlags {
  std::string config;
  std::optional<std::string> data, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> chains, iterations, burn_in, thin, c_max;
  bool paper = false, pdac = false;
};

RunConfig resolve_fit_config(const FitFlags& f) {
  RunConfig cfg;
  cfg.mode = RunMode::kFit;
  if (!f.config.empty()) apply_config_file(cfg, f.config);
  if (f.paper) cfg.hyperparams = Hyperparams::simulation_preset();
  if (f.pdac) cfg.hyperparams = Hyperparams::pdac_preset();
  if (f.data) cfg.data_path = *f.data;
  if (f.out) cfg.output_dir = *f.out;
  if (f.seed) cfg.mcmc.seed = *f.seed;
  if (f.chains) cfg.chains = *f.chains;
  if (f.iterations) cfg.mcmc.iterations = *f.iterations;
  if (f.burn_in) cfg.mcmc.burn_in = *f.burn_in;
  if (f.thin) cfg.mcmc.thin = *f.thin;
  if (f.c_max) cfg.hyperparams.c_max = *f.c_max;
  cfg.validate();
  return cfg;
}

int run_fit(const FitFlags& flags, std::ostream& out) {
  const RunConfig cfg = resolve_fit_config(flags);
  const CountData data = read_counts(cfg.data_path);
  const fs::path run = cfg.output_dir;
  fs::create_directories(run);
  {
    std::ofstream f(run / kRunConfigFile);
    f << format_config(cfg);
    if (!f) throw std::runtime_error("cannot write " + (run / kRunConfigFile).string());
  }
  out << "fitting " << data.num_snvs() << " SNVs x " << data.num_samples() << " samples with " << cfg.chains
      << " chain(s)\n";

  std::vector<Trace> traces(cfg.chains);
  std::vector<std::exception_ptr> errors(cfg.chains);
  std::vector<std::thread> workers;
  for (int k = 0; k < cfg.chains; ++k) {
    workers.emplace_back([&, k] {
      try {
        McmcConfig mc = cfg.mcmc;
        mc.seed = cfg.mcmc.seed + static_cast<std::uint64_t>(k);
        traces[k] = run_chain(data, cfg.hyperparams, mc);
        write_trace(traces[k], chain_dir(run, k));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  summarize_run(cfg, data, traces, run, out);
  return 0;
}

struct SummarizeFlags {
  std::string run;
  std::optional<std::string> data, out;
};

RunConfig stored_config(const fs::path& run) {
  RunConfig cfg;
  const auto path = run / kRunConfigFile;
  if (fs::exists(path)) apply_config_file(cfg, path);
  return cfg;
}

int run_summarize(const SummarizeFlags& f, std::ostream& out) {
  if (!fs::is_directory(f.run)) throw std::runtime_error("run directory not found: " + f.run);
  RunConfig cfg = stored_config(f.run);
  if (f.data) cfg.data_path = *f.data;
  if (cfg.data_path.empty()) throw std::runtime_error("no data file recorded for this run; pass --data");
  if (!fs::is_regular_file(cfg.data_path)) throw std::runtime_error("data file not found: " + cfg.data_path);
  const CountData data = read_counts(cfg.data_path);
  const auto traces = load_traces(f.run);
  summarize_run(cfg, data, traces, f.out.value_or(f.run), out);
  return 0;
}

int run_diagnose(const std::string& run, const std::optional<std::string>& out_dir, std::ostream& out) {
  if (!fs::is_directory(run)) throw std::runtime_error("run directory not found: " + run);
  const fs::path dest = out_dir.value_or(run);
  fs::create_directories(dest);
  const auto chains = list_chains(run);
  std::ofstream acc(dest / "acceptance.csv"), stats(dest / "diagnostics.csv"), tr(dest / "trace.csv");
  if (!acc || !stats || !tr) throw std::runtime_error("cannot write diagnostics under " + dest.string());
  acc << "chain,iterations,row_accept_rate,theta_accept_rate,p0_accept_rate,rj_attempts,rj_accepts,rj_failures\n";
  stats << "chain,quantity,mean,sd,ess,geweke_z\n";
  tr << "chain,iteration,C,log_joint,test_loglik,p0\n";
  tr.precision(17);
  for (std::size_t k = 0; k < chains.size(); ++k) {
    const Trace trace = read_trace(chains[k]);
    const ChainDiagnostics d = diagnose(trace);
    acc << k << ',' << d.iterations << ',' << d.row_accept_rate << ',' << d.theta_accept_rate << ','
        << d.p0_accept_rate << ',' << d.rj_attempts << ',' << d.rj_accepts << ',' << d.rj_failures << '\n';
    for (const auto& s : d.series) {
      stats << k << ',' << s.name << ',' << s.mean << ',' << s.sd << ',' << s.ess << ',' << s.geweke << '\n';
    }
    for (const auto& r : trace.scalars) {
      tr << k << ',' << r.iteration << ',' << r.C << ',' << r.log_joint << ',' << r.test_loglik << ',' << r.p0
         << '\n';
    }
    out << "chain " << k << ": row acceptance " << d.row_accept_rate << ", theta acceptance "
        << d.theta_accept_rate << ", RJ " << d.rj_accepts << "/" << d.rj_attempts << "\n";
  }
  out << "diagnostics written to " << dest.string() << "\n";
  return 0;
}

struct SimFlags {
  std::string out;
  std::uint64_t seed = 1;
  std::optional<std::size_t> snvs, samples;
  std::optional<std::int64_t> depth;
  std::optional<double> p0;
  std::string noise = "none";
  double noise_shape1 = 3.0, noise_shape2 = 297.0;
  bool paper = false;
};

int run_simulate(const SimFlags& f, std::ostream& out) {
  SimulationOptions opts;  // defaults are the simulation-study settings
  if (f.snvs) opts.S = *f.snvs;
  if (f.samples) opts.T = *f.samples;
  if (f.depth) opts.depth = *f.depth;
  if (f.p0) opts.p0 = *f.p0;
  opts.snv_noise = f.noise == "snv";
  opts.noise_shape1 = f.noise_shape1;
  opts.noise_shape2 = f.noise_shape2;
  if (opts.S < 1 || opts.T < 1) throw std::invalid_argument("need at least one SNV and one sample");
  if (opts.depth < 0) throw std::invalid_argument("depth must be non-negative");

  Rng rng(f.seed);
  const SimTruth truth = make_paper_truth(opts, rng);
  const CountData data = simulate_counts(truth, rng);
  const fs::path dir = f.out;
  fs::create_directories(dir);
  write_counts(data, dir / "counts.tsv");
  write_truth(truth, dir / "truth.json");
  out << "wrote " << (dir / "counts.tsv").string() << " (" << opts.S << " SNVs x " << opts.T << " samples)\n";
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian feature allocation for tumor haplotypes"};
  app.name("tumorfa");
  app.require_subcommand(1);

  SimFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a nested-haplotype dataset");
  simulate->add_option("-o,--out", sim.out, "Output directory")->required();
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--snvs", sim.snvs, "Number of SNVs (default 100)");
  simulate->add_option("--samples", sim.samples, "Number of samples (default 30)");
  simulate->add_option("--depth", sim.depth, "Read depth per cell (default 50)");
  simulate->add_option("--p0", sim.p0, "Background error rate (default 0.01)");
  simulate->add_option("--noise", sim.noise, "Background model: none or snv")
      ->check(CLI::IsMember({"none", "snv"}));
  simulate->add_option("--noise-shape1", sim.noise_shape1, "Beta shape 1 of the per-SNV rate");
  simulate->add_option("--noise-shape2", sim.noise_shape2, "Beta shape 2 of the per-SNV rate");
  simulate->add_flag("--paper-config", sim.paper, "Simulation-study settings (the defaults)");

  FitFlags fit;
  auto* fitcmd = app.add_subcommand("fit", "Run MCMC chains and summarize");
  fitcmd->add_option("-d,--data", fit.data, "Count table (TSV)");
  fitcmd->add_option("-o,--out", fit.out, "Run directory");
  fitcmd->add_option("--config", fit.config, "Config file of key = value lines");
  fitcmd->add_option("--seed", fit.seed, "Seed of chain 0; chain k uses seed + k");
  fitcmd->add_option("--chains", fit.chains, "Number of chains");
  fitcmd->add_option("--iterations", fit.iterations, "Iterations per chain");
  fitcmd->add_option("--burn-in", fit.burn_in, "Discarded iterations");
  fitcmd->add_option("--thin", fit.thin, "Keep every thin-th state");
  fitcmd->add_option("--c-max", fit.c_max, "Largest number of haplotypes");
  auto* paper = fitcmd->add_flag("--paper-config", fit.paper, "Simulation-study hyperparameters");
  fitcmd->add_flag("--pdac-config", fit.pdac, "Pancreatic-cancer hyperparameters")->excludes(paper);

  SummarizeFlags sum;
  auto* sumcmd = app.add_subcommand("summarize", "Recompute the summary from stored chains");
  sumcmd->add_option("-r,--run", sum.run, "Run directory written by fit")->required();
  sumcmd->add_option("-d,--data", sum.data, "Count table (default: the one recorded by fit)");
  sumcmd->add_option("-o,--out", sum.out, "Output directory (default: the run directory)");

  std::string diag_run;
  std::optional<std::string> diag_out;
  auto* diagcmd = app.add_subcommand("diagnose", "Acceptance rates, ESS and Geweke statistics");
  diagcmd->add_option("-r,--run", diag_run, "Run directory written by fit")->required();
  diagcmd->add_option("-o,--out", diag_out, "Output directory (default: the run directory)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return 2;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim, out);
    if (fitcmd->parsed()) return run_fit(fit, out);
    if (sumcmd->parsed()) return run_summarize(sum, out);
    if (diagcmd->parsed()) return run_diagnose(diag_run, diag_out, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace tumorfa
