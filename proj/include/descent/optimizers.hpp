#ifndef DESCENT_OPTIMIZERS_HPP
#define DESCENT_OPTIMIZERS_HPP

#include "descent/core.hpp"

#include <array>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace descent {

enum class Algorithm {
  Gd,
  Momentum,
  Nag,
  Adagrad,
  Adadelta,
  Rmsprop,
  Adam,
  Adamax,
  Nadam,
  Amsgrad,
  Padam,
  Sgdw,
  Adamw,
};

inline constexpr std::array<std::pair<Algorithm, std::string_view>, 13> kAlgorithmNames{{
    {Algorithm::Gd, "gd"},
    {Algorithm::Momentum, "momentum"},
    {Algorithm::Nag, "nag"},
    {Algorithm::Adagrad, "adagrad"},
    {Algorithm::Adadelta, "adadelta"},
    {Algorithm::Rmsprop, "rmsprop"},
    {Algorithm::Adam, "adam"},
    {Algorithm::Adamax, "adamax"},
    {Algorithm::Nadam, "nadam"},
    {Algorithm::Amsgrad, "amsgrad"},
    {Algorithm::Padam, "padam"},
    {Algorithm::Sgdw, "sgdw"},
    {Algorithm::Adamw, "adamw"},
}};

inline std::string_view to_string(Algorithm a) {
  for (auto [alg, name] : kAlgorithmNames) {
    if (alg == a) return name;
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (auto [alg, n] : kAlgorithmNames) {
    if (n == name) return alg;
  }
  return std::nullopt;
}

/// Per-step schedule indexed by the 1-based step counter t.
using Schedule = std::function<double(std::size_t)>;

struct HyperParams {
  double eta = 0.01;
  double beta = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double rho = 0.9;
  double epsilon = 1e-8;
  double lambda_decay = 0;  // decoupled weight decay (SGDW, AdamW)
  double lambda_l2 = 0;     // L2 penalty folded into the gradient by Optimizer
  double p = 0.125;         // Padam exponent

  Schedule eta_schedule;       // empty: constant eta
  Schedule delta_schedule;     // empty: constant 1
  Schedule momentum_schedule;  // Nadam mu_t; empty: constant beta1

  double eta_at(std::size_t t) const { return eta_schedule ? eta_schedule(std::max<std::size_t>(t, 1)) : eta; }
  double delta_at(std::size_t t) const {
    return delta_schedule ? delta_schedule(std::max<std::size_t>(t, 1)) : 1.0;
  }
  double mu_at(std::size_t t) const {
    return momentum_schedule ? momentum_schedule(std::max<std::size_t>(t, 1)) : beta1;
  }

  /// Library defaults for an algorithm: eta and epsilon vary per method,
  /// the decay rates do not.
  static HyperParams defaults(Algorithm a) {
    HyperParams hp;
    switch (a) {
      case Algorithm::Gd:
      case Algorithm::Momentum:
      case Algorithm::Nag:
      case Algorithm::Sgdw:
      case Algorithm::Adagrad:
        hp.eta = 0.01;
        break;
      case Algorithm::Adadelta:
        hp.eta = 1.0;  // unused
        hp.epsilon = 1e-6;
        break;
      case Algorithm::Rmsprop:
      case Algorithm::Adam:
      case Algorithm::Amsgrad:
      case Algorithm::Adamw:
        hp.eta = 0.001;
        break;
      case Algorithm::Adamax:
      case Algorithm::Nadam:
        hp.eta = 0.002;
        break;
      case Algorithm::Padam:
        hp.eta = 0.1;
        break;
    }
    return hp;
  }

  static bool algorithm_uses_eta(Algorithm a) { return a != Algorithm::Adadelta; }

  /// Every range violation relevant to `a`, in a stable order.
  std::vector<std::string> violations(Algorithm a) const {
    std::vector<std::string> out;
    auto unit = [&](double v, const char* name) {
      if (!(v >= 0 && v < 1)) out.push_back(detail::concat(name, " = ", v, " must lie in [0, 1)"));
    };
    if (algorithm_uses_eta(a) && !(eta > 0 && std::isfinite(eta))) {
      out.push_back(detail::concat("eta = ", eta, " must be positive"));
    }
    if (!(epsilon > 0)) out.push_back(detail::concat("epsilon = ", epsilon, " must be positive"));
    if (!(lambda_decay >= 0)) out.push_back(detail::concat("lambda_decay = ", lambda_decay, " must be >= 0"));
    if (!(lambda_l2 >= 0)) out.push_back(detail::concat("lambda_l2 = ", lambda_l2, " must be >= 0"));
    switch (a) {
      case Algorithm::Momentum:
      case Algorithm::Sgdw:
        unit(beta, "beta");
        break;
      case Algorithm::Adadelta:
      case Algorithm::Rmsprop:
        unit(rho, "rho");
        break;
      case Algorithm::Adam:
      case Algorithm::Adamax:
      case Algorithm::Nadam:
      case Algorithm::Amsgrad:
      case Algorithm::Adamw:
        unit(beta1, "beta1");
        unit(beta2, "beta2");
        break;
      case Algorithm::Padam:
        unit(beta1, "beta1");
        unit(beta2, "beta2");
        if (!(p >= 0 && p <= 0.5)) out.push_back(detail::concat("p = ", p, " must lie in [0, 1/2]"));
        break;
      default:
        break;
    }
    return out;
  }

  void validate(Algorithm a) const {
    const auto v = violations(a);
    if (v.empty()) return;
    std::string msg = detail::concat("invalid hyperparameters for ", to_string(a), ":");
    for (const auto& s : v) msg += "\n  " + s;
    throw ValidationError(msg);
  }
};

/// Optimal momentum step size and decay for curvature in [m, M]:
/// eta = (2 / (sqrt M + sqrt m))^2, beta = ((sqrt M - sqrt m) / (sqrt M + sqrt m))^2.
struct MomentumParams {
  double eta;
  double beta;
};

inline MomentumParams optimal_momentum_params(double m, double big_m) {
  if (!(m > 0) || !(m <= big_m)) {
    throw ValidationError(detail::concat("optimal_momentum_params: need 0 < m <= M, got m=", m, " M=", big_m));
  }
  const double sm = std::sqrt(m);
  const double sb = std::sqrt(big_m);
  const double eta = 2 / (sb + sm);
  const double beta = (sb - sm) / (sb + sm);
  return {eta * eta, beta * beta};
}

/// Axis-aligned feasible set. Projection is componentwise clamping.
struct FeasibleBox {
  Vector lower;
  Vector upper;

  static FeasibleBox unbounded(Eigen::Index n) {
    const double inf = std::numeric_limits<double>::infinity();
    return {Vector::Constant(n, -inf), Vector::Constant(n, inf)};
  }

  void validate(Eigen::Index n) const {
    if (lower.size() != n || upper.size() != n) {
      throw ValidationError(detail::concat("feasible box has dimension ", lower.size(), "/", upper.size(),
                                           ", expected ", n));
    }
    if ((lower.array() > upper.array()).any()) throw ValidationError("feasible box: lower > upper");
  }

  Vector project(const Vector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
};

/// Per-algorithm accumulators. Fields an algorithm does not use keep their
/// zero initialization.
struct OptimizerState {
  Algorithm algorithm = Algorithm::Gd;
  std::size_t t = 0;
  Vector m;          // momentum buffer / first moment
  Vector v;          // squared-gradient statistic
  Vector v_hat_max;  // AMSGrad / Padam running max of v
  Vector u;          // AdaMax infinity-norm statistic
  Vector u_peak;     // AdaMax: |g_i| of the current maximizer of beta2^(t-i) |g_i|
  std::vector<std::size_t> u_peak_step;  // its step index i (0: none yet)
  Vector delta_acc;  // AdaDelta E[dx^2]
  double nesterov_t = 1;
  Vector lookahead;  // NAG y_k
  Vector x_prev;     // NAG x_{k-1}
  double mu_product = 1;  // Nadam prod_{i<=t} mu_i

  static OptimizerState fresh(Algorithm a, Eigen::Index n) {
    OptimizerState s;
    s.algorithm = a;
    s.m = Vector::Zero(n);
    s.v = Vector::Zero(n);
    s.v_hat_max = Vector::Zero(n);
    s.u = Vector::Zero(n);
    s.u_peak = Vector::Zero(n);
    s.u_peak_step.assign(static_cast<std::size_t>(n), 0);
    s.delta_acc = Vector::Zero(n);
    s.lookahead = Vector::Zero(n);
    s.x_prev = Vector::Zero(n);
    return s;
  }

  Eigen::Index dim() const { return m.size(); }
};

namespace detail {

inline void check_step_inputs(const OptimizerState& s, const Vector& x, const Vector& g) {
  if (x.size() != s.dim() || g.size() != s.dim()) {
    throw ValidationError(concat("optimizer state has dimension ", s.dim(), ", got x ", x.size(), " and g ",
                                 g.size()));
  }
  if (!g.allFinite()) throw NumericalError("non-finite gradient passed to optimizer step");
}

/// Shared AdaDelta/RMSprop kernel: updates E[g^2] and returns the step
/// numerator / sqrt(E[g^2] + eps) * g.
inline Vector rms_scaled_step(Vector& mean_sq, const Vector& g, double rho, double eps, const Vector& numerator) {
  mean_sq = rho * mean_sq + (1 - rho) * g.cwiseAbs2();
  return numerator.cwiseQuotient((mean_sq.array() + eps).sqrt().matrix()).cwiseProduct(g);
}

inline void update_moments(OptimizerState& s, const Vector& g, double beta1, double beta2) {
  s.m = beta1 * s.m + (1 - beta1) * g;
  s.v = beta2 * s.v + (1 - beta2) * g.cwiseAbs2();
}

inline Vector bias_corrected(const Vector& moment, double beta, std::size_t t) {
  return moment / (1 - std::pow(beta, static_cast<double>(t)));
}

}  // namespace detail

/// x - eta * g
inline Vector gd_step(OptimizerState& s, const Vector& x, const Vector& g, const HyperParams& hp) {
  detail::check_step_inputs(s, x, g);
  ++s.t;
  return x - hp.eta_at(s.t) * g;
}

/// Z <- g + beta Z;  x - eta Z
inline Vector momentum_step(OptimizerState& s, const Vector& x, const Vector& g, const HyperParams& hp) {
  detail::check_step_inputs(s, x, g);
  ++s.t;
  s.m = g + hp.beta * s.m;
  return x - hp.eta_at(s.t) * s.m;
}

/// t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2
inline double nesterov_next(double t_k) { return (1 + std::sqrt(1 + 4 * t_k * t_k)) / 2; }

/// Nesterov's accelerated gradient. The gradient is evaluated at the
/// lookahead point y_k kept in the state, so this takes a gradient callable
/// rather than a precomputed gradient:
///   x_k = y_k - eta grad f(y_k)
///   y_{k+1} = x_k + ((t_k - 1) / t_{k+1}) (x_k - x_{k-1})
/// `x` seeds y_1 = x_0 on the first call and is otherwise ignored.
template <class GradFn>
  requires(!std::derived_from<std::remove_cvref_t<GradFn>, Objective>)
Vector nag_step(OptimizerState& s, const Vector& x, GradFn&& grad, const HyperParams& hp) {
  if (x.size() != s.dim()) throw ValidationError("nag_step: dimension mismatch");
  if (s.t == 0) {
    s.lookahead = x;
    s.x_prev = x;
    s.nesterov_t = 1;
  }
  ++s.t;
  const Vector g = grad(static_cast<const Vector&>(s.lookahead));
  if (!g.allFinite()) throw NumericalError("non-finite gradient passed to optimizer step");
  const Vector xk = s.lookahead - hp.eta_at(s.t) * g;
  const double t_next = nesterov_next(s.nesterov_t);
  s.lookahead = xk + ((s.nesterov_t - 1) / t_next) * (xk - s.x_prev);
  s.x_prev = xk;
  s.nesterov_t = t_next;
  return xk;
}

inline Vector nag_step(OptimizerState& s, const Vector& x, const Objective& f, const HyperParams& hp) {
  return nag_step(s, x, [&f](const Vector& y) { return f.gradient(y); }, hp);
}

/// v <- v + g^2 (the diagonal of G);  x - eta / sqrt(v + eps) * g
inline Vector adagrad_step(OptimizerState& s, const Vector& x, const Vector& g, const HyperParams& hp) {
  detail::check_step_inputs(s, x, g);
  ++s.t;
  s.v += g.cwiseAbs2();
  return x - hp.eta_at(s.t) * g.cwiseQuotient((s.v.array() + hp.epsilon).sqrt().matrix());
}

/// AdaDelta. No learning rate: the numerator is RMS[dx]_{t-1}.
inline Vector adadelta_step(OptimizerState& s, const Vector& x, const Vector& g, const HyperParams& hp) {
  detail::check_step_inputs(s, x, g);
  ++s.t;
  const Vector numerator = (s.delta_acc.array() + hp.epsilon).sqrt().matrix();
  const Vector dx = detail::rms_scaled_step(s.v, g, hp.rho, hp.epsilon, numerator);
  s.delta_acc = hp.rho * s.delta_acc + (1 - hp.rho) * dx.cwiseAbs2();
  return x - dx;
}

/// RMSprop: the AdaDelta kernel with eta in place of RMS[dx]_{t-1}.
inline Vector rmsprop_step(OptimizerState& s, const Vector& x, const Vector& g, const HyperParams& hp) {
  detail::check_step_inputs(s, x, g);
  ++s.t;
  const Vector numerator = Vector::Constant(g.size(), hp.eta_at(s.t));
  return x - detail::rms_scaled_step(s.v, g, hp.rho, hp.epsilon, numerator);
}

inline Vector adam_step(OptimizerState& s, const Vector& x, const Vector& g, const HyperParams& hp) {
  detail::check_step_inputs(s, x, g);
  ++s.t;
  detail::update_moments(s, g, hp.beta1, hp.beta2);
  const Vector m_hat = detail::bias_corrected(s.m, hp.beta1, s.t);
  const Vector v_hat = detail::bias_corrected(s.v, hp.beta2, s.t);
  return x - hp.eta_at(s.t) * m_hat.cwiseQuotient((v_hat.array().sqrt() + hp.epsilon).matrix());
}

/// AdaMax: u_t = max_i beta2^(t-i) |g_i|, i.e. u <- max(beta2 u, |g|);
/// x - eta / (1 - beta1^t) * m / u.
/// u is evaluated from the stored maximizer rather than by repeated
/// multiplication, so it equals the unrolled max bit for bit.
/// Coordinates with u = 0 (no gradient seen yet) do not move.
inline Vector adamax_step(OptimizerState& s, const Vector& x, const Vector& g, const HyperParams& hp) {
  detail::check_step_inputs(s, x, g);
  ++s.t;
  s.m = hp.beta1 * s.m + (1 - hp.beta1) * g;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    auto& peak_step = s.u_peak_step[static_cast<std::size_t>(i)];
    const double decayed =
        peak_step == 0 ? 0.0 : std::pow(hp.beta2, static_cast<double>(s.t - peak_step)) * s.u_peak[i];
    if (std::abs(g[i]) > decayed) {
      s.u_peak[i] = std::abs(g[i]);
      peak_step = s.t;
      s.u[i] = s.u_peak[i];
    } else {
      s.u[i] = decayed;
    }
  }
  const double scale = hp.eta_at(s.t) / (1 - std::pow(hp.beta1, static_cast<double>(s.t)));
  Vector out = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (s.u[i] > 0) out[i] -= scale * s.m[i] / s.u[i];
  }
  return out;
}

/// Nadam look-ahead moment
///   m_bar = mu_{t+1} m_t / (1 - prod_{i<=t+1} mu_i) + (1 - mu_t) g_t / (1 - prod_{i<=t} mu_i).
/// Without bias correction this is mu_{t+1} m_t + (1 - mu_t) g_t, i.e.
/// (1 - beta1) g_t + beta1 m_t for a constant schedule.
inline Vector nadam_moment(const Vector& m, const Vector& g, double mu_t, double mu_next, double prod_t,
                           bool bias_correction = true) {
  if (!bias_correction) return mu_next * m + (1 - mu_t) * g;
  const double next_denom = 1 - prod_t * mu_next;
  const double cur_denom = 1 - prod_t;
  return (mu_next / next_denom) * m + ((1 - mu_t) / cur_denom) * g;
}

inline Vector nadam_step(OptimizerState& s, const Vector& x, const Vector& g, const HyperParams& hp) {
  detail::check_step_inputs(s, x, g);
  ++s.t;
  const double mu_t = hp.mu_at(s.t);
  const double mu_next = hp.mu_at(s.t + 1);
  s.mu_product *= mu_t;
  s.m = mu_t * s.m + (1 - mu_t) * g;
  s.v = hp.beta2 * s.v + (1 - hp.beta2) * g.cwiseAbs2();
  const Vector m_bar = nadam_moment(s.m, g, mu_t, mu_next, s.mu_product);
  const Vector v_hat = detail::bias_corrected(s.v, hp.beta2, s.t);
  return x - hp.eta_at(s.t) * m_bar.cwiseQuotient((v_hat.array().sqrt() + hp.epsilon).matrix());
}

namespace detail {

inline Vector project_if(const std::optional<FeasibleBox>& box, Vector x) {
  if (!box) return x;
  box->validate(x.size());
  return box->project(x);
}

}  // namespace detail

/// AMSGrad: v_hat_max <- max(v_hat_max, v);  Proj(x - eta_t m_hat / (sqrt(v_hat_max) + eps)).
inline Vector amsgrad_step(OptimizerState& s, const Vector& x, const Vector& g, const HyperParams& hp,
                           const std::optional<FeasibleBox>& box = std::nullopt) {
  detail::check_step_inputs(s, x, g);
  ++s.t;
  detail::update_moments(s, g, hp.beta1, hp.beta2);
  s.v_hat_max = s.v_hat_max.cwiseMax(s.v);
  const Vector m_hat = detail::bias_corrected(s.m, hp.beta1, s.t);
  return detail::project_if(
      box, x - hp.eta_at(s.t) * m_hat.cwiseQuotient((s.v_hat_max.array().sqrt() + hp.epsilon).matrix()));
}

/// Padam: AMSGrad statistics with denominator v_hat_max^p + eps, p in [0, 1/2].
inline Vector padam_step(OptimizerState& s, const Vector& x, const Vector& g, const HyperParams& hp,
                         const std::optional<FeasibleBox>& box = std::nullopt) {
  if (!(hp.p >= 0 && hp.p <= 0.5)) {
    throw ValidationError(detail::concat("padam: p = ", hp.p, " must lie in [0, 1/2]"));
  }
  detail::check_step_inputs(s, x, g);
  ++s.t;
  detail::update_moments(s, g, hp.beta1, hp.beta2);
  s.v_hat_max = s.v_hat_max.cwiseMax(s.v);
  const Vector m_hat = detail::bias_corrected(s.m, hp.beta1, s.t);
  const Vector denom = (s.v_hat_max.array().pow(hp.p) + hp.epsilon).matrix();
  return detail::project_if(box, x - hp.eta_at(s.t) * m_hat.cwiseQuotient(denom));
}

/// SGDW: momentum on the raw gradient, decay applied to x directly:
///   x - eta Z - delta_t eta lambda x
inline Vector sgdw_step(OptimizerState& s, const Vector& x, const Vector& g, const HyperParams& hp) {
  detail::check_step_inputs(s, x, g);
  ++s.t;
  s.m = g + hp.beta * s.m;
  const double eta = hp.eta_at(s.t);
  return x - eta * s.m - hp.delta_at(s.t) * eta * hp.lambda_decay * x;
}

/// AdamW: x - delta_t (eta m_hat / (sqrt(v_hat) + eps) + lambda x)
inline Vector adamw_step(OptimizerState& s, const Vector& x, const Vector& g, const HyperParams& hp) {
  detail::check_step_inputs(s, x, g);
  ++s.t;
  detail::update_moments(s, g, hp.beta1, hp.beta2);
  const Vector m_hat = detail::bias_corrected(s.m, hp.beta1, s.t);
  const Vector v_hat = detail::bias_corrected(s.v, hp.beta2, s.t);
  const Vector adaptive = hp.eta_at(s.t) * m_hat.cwiseQuotient((v_hat.array().sqrt() + hp.epsilon).matrix());
  return x - hp.delta_at(s.t) * (adaptive + hp.lambda_decay * x);
}

struct StepDiagnostics {
  Vector effective_step;  // per-coordinate multiplier on the (moment of the) gradient
  Vector gamma;           // inverse-step change between consecutive states
  double regret_running = 0;
};

/// Per-coordinate sqrt(v_hat) (or its analogue) for the inverse step size
/// sqrt(v_hat_t) / eta_t. Methods without a gradient statistic use 1.
inline Vector inverse_step_numerator(const OptimizerState& s, const HyperParams& hp) {
  const auto n = s.dim();
  switch (s.algorithm) {
    case Algorithm::Adagrad:
    case Algorithm::Adadelta:
    case Algorithm::Rmsprop:
      return s.v.cwiseSqrt();
    case Algorithm::Adam:
    case Algorithm::Adamw:
    case Algorithm::Nadam:
      if (s.t == 0) return Vector::Zero(n);
      return detail::bias_corrected(s.v, hp.beta2, s.t).cwiseSqrt();
    case Algorithm::Adamax:
      return s.u;
    case Algorithm::Amsgrad:
      return s.v_hat_max.cwiseSqrt();
    case Algorithm::Padam:
      if (s.t == 0) return Vector::Zero(n);
      return s.v_hat_max.array().pow(hp.p).matrix();
    default:
      return Vector::Ones(n);
  }
}

/// Per-coordinate step multiplier actually applied by the transition prev -> next.
inline Vector effective_step(const OptimizerState& prev, const OptimizerState& next, const HyperParams& hp) {
  const auto n = next.dim();
  const double eta = hp.eta_at(next.t);
  switch (next.algorithm) {
    case Algorithm::Adagrad:
    case Algorithm::Rmsprop:
      return (eta / (next.v.array() + hp.epsilon).sqrt()).matrix();
    case Algorithm::Adadelta:
      return ((prev.delta_acc.array() + hp.epsilon).sqrt() / (next.v.array() + hp.epsilon).sqrt()).matrix();
    case Algorithm::Adam:
    case Algorithm::Nadam:
    case Algorithm::Adamw: {
      const double scale = next.algorithm == Algorithm::Adamw ? hp.delta_at(next.t) : 1.0;
      const Vector v_hat = detail::bias_corrected(next.v, hp.beta2, std::max<std::size_t>(next.t, 1));
      return (scale * eta / (v_hat.array().sqrt() + hp.epsilon)).matrix();
    }
    case Algorithm::Adamax: {
      const double scale = eta / (1 - std::pow(hp.beta1, static_cast<double>(std::max<std::size_t>(next.t, 1))));
      Vector out(n);
      for (Eigen::Index i = 0; i < n; ++i) out[i] = next.u[i] > 0 ? scale / next.u[i] : 0.0;
      return out;
    }
    case Algorithm::Amsgrad:
      return (eta / (next.v_hat_max.array().sqrt() + hp.epsilon)).matrix();
    case Algorithm::Padam:
      return (eta / (next.v_hat_max.array().pow(hp.p) + hp.epsilon)).matrix();
    default:
      return Vector::Constant(n, eta);
  }
}

/// Gamma_{t+1} = sqrt(v_hat_{t+1}) / eta_{t+1} - sqrt(v_hat_t) / eta_t, and the
/// running regret sum_t [f_t(x_t) - f_t(x*)] when both values are supplied.
inline StepDiagnostics step_diagnostics(const OptimizerState& prev, const OptimizerState& next,
                                        const HyperParams& hp, std::optional<double> f_t_value = std::nullopt,
                                        std::optional<double> f_star_value = std::nullopt,
                                        double regret_so_far = 0) {
  if (prev.algorithm != next.algorithm || prev.dim() != next.dim()) {
    throw ValidationError("step_diagnostics: states belong to different runs");
  }
  if (next.t != prev.t + 1) throw ValidationError("step_diagnostics: states are not consecutive");
  const double eta_now = hp.algorithm_uses_eta(next.algorithm) ? hp.eta_at(next.t) : 1.0;
  const double eta_before = hp.algorithm_uses_eta(next.algorithm) ? hp.eta_at(prev.t) : 1.0;
  StepDiagnostics d;
  d.effective_step = effective_step(prev, next, hp);
  d.gamma = inverse_step_numerator(next, hp) / eta_now - inverse_step_numerator(prev, hp) / eta_before;
  d.regret_running = regret_so_far;
  if (f_t_value && f_star_value) d.regret_running += *f_t_value - *f_star_value;
  return d;
}

}  // namespace descent

#endif  // DESCENT_OPTIMIZERS_HPP
