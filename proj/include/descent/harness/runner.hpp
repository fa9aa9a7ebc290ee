#ifndef DESCENT_HARNESS_RUNNER_HPP
#define DESCENT_HARNESS_RUNNER_HPP

#include "descent/core.hpp"
#include "descent/erm.hpp"
#include "descent/harness/config.hpp"
#include "descent/harness/trace.hpp"
#include "descent/linesearch.hpp"
#include "descent/objectives.hpp"
#include "descent/optimizer.hpp"
#include "descent/sampling.hpp"
#include "descent/spl.hpp"

#include <atomic>
#include <chrono>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace descent::harness {

/// Set from a signal handler to stop runs at the next step boundary.
inline std::atomic<bool>& interrupt_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

/// f(x) + (lambda / 2) ||x||^2 around another objective.
class L2Augmented final : public Objective {
 public:
  L2Augmented(std::shared_ptr<const Objective> base, double lambda) : base_(std::move(base)), lambda_(lambda) {}
  std::size_t dim() const override { return base_->dim(); }
  double value(const Vector& x) const override { return base_->value(x) + 0.5 * lambda_ * x.squaredNorm(); }
  Vector gradient(const Vector& x) const override { return base_->gradient(x) + lambda_ * x; }
  std::pair<double, Vector> value_and_gradient(const Vector& x) const override {
    auto [f, g] = base_->value_and_gradient(x);
    return {f + 0.5 * lambda_ * x.squaredNorm(), g + lambda_ * x};
  }
  bool has_hessian() const override { return base_->has_hessian(); }
  Matrix hessian(const Vector& x) const override {
    Matrix h = base_->hessian(x);
    h.diagonal().array() += lambda_;
    return h;
  }

 private:
  std::shared_ptr<const Objective> base_;
  double lambda_;
};

struct Problem {
  std::shared_ptr<const Objective> objective;  // includes the optimizer's lambda_l2 term
  std::shared_ptr<const ErmObjective> erm;     // set for erm objectives
  Vector x0;
};

inline Problem build_problem(const ObjectiveSpec& spec, double lambda_l2 = 0) {
  Problem p;
  std::shared_ptr<const Objective> base;
  if (spec.name == "quadratic") {
    base = std::make_shared<QuadraticForm>(spec.a, spec.b);
  } else if (spec.name == "rosenbrock") {
    base = std::make_shared<Rosenbrock>(spec.rosen_a, spec.rosen_b);
  } else if (spec.name == "hyperbolic") {
    base = std::make_shared<HyperbolicSaddle>();
  } else if (spec.name == "monkey") {
    base = std::make_shared<MonkeySaddle>();
  } else if (spec.name == "erm") {
    auto erm = std::make_shared<ErmObjective>(spec.model, load_dataset(spec.dataset), spec.loss, spec.lambda,
                                              std::nullopt, spec.intercept);
    p.erm = erm;
    base = erm;
  } else {
    throw ValidationError("unknown objective '" + spec.name + "'");
  }
  p.x0 = spec.x0.size() > 0 ? spec.x0 : Vector::Zero(static_cast<Eigen::Index>(base->dim()));
  if (static_cast<std::size_t>(p.x0.size()) != base->dim()) {
    throw ValidationError(descent::detail::concat("x0 has ", p.x0.size(), " entries, objective dimension is ",
                                                  base->dim()));
  }
  p.objective = lambda_l2 > 0 ? std::make_shared<L2Augmented>(base, lambda_l2) : base;
  return p;
}

/// Runs one optimizer trajectory. Always returns a trace with a stop reason;
/// a numerical breakdown ends the run as `diverged` with a diagnostic.
/// The trace is written to cfg.output.trace when that path is set.
inline Trace run_trajectory(const ExperimentConfig& cfg) {
  const auto& oc = cfg.optimizer;
  const Problem problem = build_problem(cfg.objective, oc.hp.lambda_l2);
  const Objective& f = *problem.objective;

  HyperParams hp = oc.hp;
  hp.lambda_l2 = 0;  // already inside the objective
  Optimizer opt(oc.algorithm, hp, oc.box);

  const RngStream root(cfg.run.seed);
  RngStream sampling = root.split(1);
  RngStream noise = root.split(2);
  std::optional<BatchSampler> sampler;
  if (oc.gradient == GradientMode::Minibatch) sampler.emplace(problem.erm->size(), oc.batch_size, root.split(3));

  auto sampled_gradient = [&](const Vector& at) -> Vector {
    Vector g;
    switch (oc.gradient) {
      case GradientMode::Full:
        g = f.gradient(at);
        break;
      case GradientMode::Minibatch:
        g = problem.erm->subset_gradient(at, sampler->next()) + oc.hp.lambda_l2 * at;
        break;
      case GradientMode::Stochastic:
        g = stochastic_gradient(*problem.erm, at, sampling) + oc.hp.lambda_l2 * at;
        break;
    }
    if (oc.noise_sigma > 0) g += oc.noise_sigma * noise.normal_vector(g.size());
    return g;
  };

  Trace trace;
  Vector x = problem.x0;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&]() -> std::int64_t {
    if (!cfg.output.timing) return 0;
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
  };
  double step_min = 0;
  double step_max = 0;
  for (std::size_t k = 0;; ++k) {
    double fx = std::numeric_limits<double>::quiet_NaN();
    Vector g;
    std::string failure;
    try {
      if (x.allFinite()) std::tie(fx, g) = f.value_and_gradient(x);
    } catch (const NumericalError& e) {
      failure = e.what();
    }
    const double gnorm = g.size() > 0 ? g.norm() : std::numeric_limits<double>::quiet_NaN();
    const bool finite = std::isfinite(fx) && std::isfinite(gnorm);

    std::optional<StopReason> stop;
    if (!finite) {
      stop = StopReason::Diverged;
      trace.diagnostic = failure.empty() ? descent::detail::concat("non-finite objective value at step ", k) : failure;
    } else if (gnorm <= cfg.run.grad_tol ||
               (cfg.run.f_tol && cfg.objective.f_star && fx - *cfg.objective.f_star <= *cfg.run.f_tol)) {
      stop = StopReason::Tolerance;
    } else if (k >= cfg.run.max_steps) {
      stop = StopReason::Budget;
    } else if (interrupt_flag().load()) {
      stop = StopReason::UserInterrupt;
    }

    if (stop || k % cfg.output.log_every == 0) {
      trace.records.push_back({k, fx, gnorm, step_min, step_max, elapsed()});
    }
    if (cfg.output.dump_every > 0 && (stop || k % cfg.output.dump_every == 0)) {
      trace.iterates.push_back({k, x});
    }
    if (stop) {
      trace.stop_reason = *stop;
      trace.steps = k;
      trace.x_final = x;
      trace.f_final = fx;
      trace.grad_norm_final = gnorm;
      break;
    }

    try {
      if (oc.line_search) {
        const Vector d = -g;
        const double eta = backtracking_search(f, x, d, oc.ls);
        x += eta * d;
        step_min = step_max = eta;
      } else {
        x = opt.step(x, sampled_gradient);
        const Vector& eff = opt.last_diagnostics().effective_step;
        step_min = eff.minCoeff();
        step_max = eff.maxCoeff();
      }
    } catch (const NumericalError& e) {
      trace.records.push_back({k + 1, std::numeric_limits<double>::quiet_NaN(),
                               std::numeric_limits<double>::quiet_NaN(), step_min, step_max, elapsed()});
      trace.stop_reason = StopReason::Diverged;
      trace.diagnostic = e.what();
      trace.steps = k + 1;
      trace.x_final = x;
      trace.f_final = std::numeric_limits<double>::quiet_NaN();
      trace.grad_norm_final = std::numeric_limits<double>::quiet_NaN();
      break;
    }
  }
  // commas would break the terminal record
  std::replace(trace.diagnostic.begin(), trace.diagnostic.end(), ',', ';');
  std::replace(trace.diagnostic.begin(), trace.diagnostic.end(), '\n', ' ');
  if (!cfg.output.trace.empty()) save_trace(cfg.output.trace, trace);
  return trace;
}

struct ComparisonRow {
  std::string label;
  Algorithm algorithm;
  std::optional<std::size_t> steps_to_tolerance;
  double final_f;
  double final_grad_norm;
  StopReason stop_reason;
};

/// Runs every config. With `shared_objective`, all configs must describe the
/// same objective (same [objective] section) and the same seed.
inline std::vector<ComparisonRow> compare(const std::vector<ExperimentConfig>& configs, bool shared_objective) {
  if (configs.empty()) throw ValidationError("compare: no configurations");
  if (shared_objective) {
    for (const auto& c : configs) {
      if (c.objective.raw != configs.front().objective.raw) {
        throw ValidationError("compare: " + c.label + " names a different objective than " + configs.front().label);
      }
      if (c.run.seed != configs.front().run.seed) {
        throw ValidationError("compare: " + c.label + " uses a different seed than " + configs.front().label);
      }
    }
  }
  std::vector<ComparisonRow> rows;
  rows.reserve(configs.size());
  for (const auto& c : configs) {
    const Trace t = run_trajectory(c);
    rows.push_back({c.label, c.optimizer.algorithm, t.steps_to_tolerance(), t.f_final, t.grad_norm_final,
                    t.stop_reason});
  }
  return rows;
}

inline void write_comparison(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "label,optimizer,steps_to_tol,final_f,final_grad_norm,stop_reason\n";
  for (const auto& r : rows) {
    out << r.label << ',' << to_string(r.algorithm) << ',';
    if (r.steps_to_tolerance) out << *r.steps_to_tolerance;
    out << ',' << detail::fmt_double(r.final_f) << ',' << detail::fmt_double(r.final_grad_norm) << ','
        << to_string(r.stop_reason) << '\n';
  }
}

struct SplRoundRecord {
  std::size_t round;
  double k;  // K used for this round's selection
  std::size_t selected_before;
  std::size_t selected_after;
  double weighted_objective;
  double full_objective;
};

struct SplReport {
  std::vector<SplRoundRecord> rounds;
  Vector params;
  Vector selection;
};

/// Self-paced training driven by a config: [optimizer] is the inner fit,
/// [spl] holds C, K, the anneal factor, round count and inner steps.
inline SplReport run_spl(const ExperimentConfig& cfg) {
  const Problem problem = build_problem(cfg.objective);
  if (!problem.erm) throw ValidationError("spl needs an erm objective");
  const ErmObjective& obj = *problem.erm;
  InnerOptimizer inner{cfg.optimizer.algorithm, cfg.optimizer.hp};
  SplState state = spl_init(obj, problem.x0, cfg.spl.c, cfg.spl.k, cfg.spl.anneal);
  Vector x = problem.x0;
  SplReport report;
  for (std::size_t r = 0; r < cfg.spl.rounds; ++r) {
    const double k = state.k;
    const std::size_t before = state.selected();
    auto res = spl_round(obj, x, state, inner, cfg.spl.inner_steps);
    x = res.params;
    state = res.state;
    report.rounds.push_back({r + 1, k, before, state.selected(), obj.with_weights(state.v).value(x), obj.value(x)});
  }
  report.params = x;
  report.selection = state.v;
  return report;
}

inline void write_spl_report(std::ostream& out, const SplReport& report) {
  out << "round,k,selected_before,selected_after,weighted_objective,full_objective\n";
  for (const auto& r : report.rounds) {
    out << r.round << ',' << detail::fmt_double(r.k) << ',' << r.selected_before << ',' << r.selected_after << ','
        << detail::fmt_double(r.weighted_objective) << ',' << detail::fmt_double(r.full_objective) << '\n';
  }
}

}  // namespace descent::harness

#endif  // DESCENT_HARNESS_RUNNER_HPP
