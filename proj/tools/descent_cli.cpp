#include "descent/harness/config.hpp"
#include "descent/harness/gradcheck.hpp"
#include "descent/harness/runner.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace harness = descent::harness;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct GlobalOptions {
  std::string out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

void on_sigint(int) { harness::interrupt_flag() = true; }

harness::ExperimentConfig load(const std::string& path, const GlobalOptions& g) {
  auto cfg = harness::parse_config(path);
  if (g.seed) cfg.run.seed = *g.seed;
  if (!g.quiet) {
    for (const auto& d : cfg.defaults_applied) std::cerr << path << ": default " << d << '\n';
  }
  return cfg;
}

// Writes to --out when given, stdout otherwise.
template <class Fn>
void emit(const GlobalOptions& g, Fn&& write) {
  if (g.out.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(g.out, std::ios::binary);
  if (!out) throw descent::ValidationError("cannot write output file: " + g.out);
  write(out);
}

int cmd_run(const std::string& path, const GlobalOptions& g) {
  auto cfg = load(path, g);
  if (!g.out.empty()) cfg.output.trace = g.out;
  const auto trace = harness::run_trajectory(cfg);
  if (cfg.output.trace.empty()) harness::write_trace(std::cout, trace);
  if (!g.quiet) {
    std::cerr << "stop_reason=" << harness::to_string(trace.stop_reason) << " steps=" << trace.steps
              << " f=" << trace.f_final << " grad_norm=" << trace.grad_norm_final << '\n';
    if (!trace.diagnostic.empty()) std::cerr << "diagnostic: " << trace.diagnostic << '\n';
  }
  return trace.stop_reason == harness::StopReason::Diverged ? kExitNumerical : kExitOk;
}

int cmd_compare(const std::vector<std::string>& paths, bool independent, const GlobalOptions& g) {
  std::vector<harness::ExperimentConfig> configs;
  for (const auto& p : paths) {
    auto cfg = load(p, g);
    cfg.output.trace.clear();
    configs.push_back(std::move(cfg));
  }
  const auto rows = harness::compare(configs, !independent);
  emit(g, [&](std::ostream& out) { harness::write_comparison(out, rows); });
  for (const auto& r : rows) {
    if (r.stop_reason == harness::StopReason::Diverged) return kExitNumerical;
  }
  return kExitOk;
}

int cmd_gradcheck(std::size_t points, std::uint64_t seed, const GlobalOptions& g) {
  descent::RngStream rng(seed);
  bool all_passed = true;
  emit(g, [&](std::ostream& out) {
    out << "name,points,max_relative_error,worst_coordinate,status\n";
    for (const auto& c : harness::shipped_gradient_cases(seed)) {
      const auto r = harness::gradcheck(c.name, *c.objective, points, rng, c.sampler);
      all_passed = all_passed && r.passed;
      out << r.name << ',' << r.points << ',' << harness::detail::fmt_double(r.max_relative_error) << ','
          << r.worst_coordinate << ',' << (r.passed ? "pass" : "FAIL") << '\n';
    }
  });
  return all_passed ? kExitOk : kExitNumerical;
}

int cmd_spl(const std::string& path, const GlobalOptions& g) {
  const auto cfg = load(path, g);
  const auto report = harness::run_spl(cfg);
  emit(g, [&](std::ostream& out) { harness::write_spl_report(out, report); });
  if (!g.quiet) {
    std::cerr << "selected " << static_cast<std::size_t>(report.selection.sum()) << " of " << report.selection.size()
              << " examples; parameters";
    for (Eigen::Index i = 0; i < report.params.size(); ++i) std::cerr << ' ' << report.params[i];
    std::cerr << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"descent: first-order optimizer experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Override the run seed")->type_name("U64");
  app.add_option("--out", g.out, "Output path (trace for run, CSV table otherwise)");
  app.add_flag("--quiet,-q", g.quiet, "Do not echo defaults or summaries");

  std::string run_path;
  auto* run = app.add_subcommand("run", "Run one optimizer trajectory");
  run->add_option("config", run_path)->required()->check(CLI::ExistingFile);

  std::vector<std::string> compare_paths;
  bool independent = false;
  auto* compare = app.add_subcommand("compare", "Run several configs and tabulate the results");
  compare->add_option("configs", compare_paths)->required()->check(CLI::ExistingFile);
  compare->add_flag("--independent", independent, "Allow configs with different objectives or seeds");

  std::size_t points = 100;
  std::uint64_t gc_seed = 0;
  auto* gradcheck = app.add_subcommand("gradcheck", "Check every analytic gradient against finite differences");
  gradcheck->add_option("--points", points, "Sampled points per gradient")->check(CLI::PositiveNumber);
  auto* gc_seed_opt = gradcheck->add_option("--seed", gc_seed, "Sampling seed");

  std::string spl_path;
  auto* spl = app.add_subcommand("spl", "Self-paced training on an erm objective");
  spl->add_option("config", spl_path)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  if (seed_opt->count() > 0) g.seed = seed;
  std::signal(SIGINT, on_sigint);

  try {
    if (*run) return cmd_run(run_path, g);
    if (*compare) return cmd_compare(compare_paths, independent, g);
    if (*gradcheck) return cmd_gradcheck(points, gc_seed_opt->count() > 0 ? gc_seed : seed, g);
    if (*spl) return cmd_spl(spl_path, g);
  } catch (const descent::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const descent::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}
