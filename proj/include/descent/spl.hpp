#ifndef DESCENT_SPL_HPP
#define DESCENT_SPL_HPP

#include "descent/core.hpp"
#include "descent/erm.hpp"
#include "descent/optimizer.hpp"

#include <vector>

namespace descent {

/// Self-paced selection: v_i = 1 iff C * loss_i - 1/K < 0, i.e. loss_i < 1/(C K).
/// Ties at the threshold are excluded. This is the minimizer over v in {0,1}^N
/// of sum_i v_i (C loss_i - 1/K).
inline Vector spl_weights(const Vector& per_example_losses, double c, double k) {
  if (!(c > 0)) throw ValidationError("spl_weights: C must be positive");
  if (!(k > 0)) throw ValidationError("spl_weights: K must be positive");
  Vector v(per_example_losses.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double loss = per_example_losses[i];
    if (!(loss >= 0)) throw ValidationError(detail::concat("spl_weights: loss ", i, " is negative or NaN"));
    v[i] = c * loss - 1 / k < 0 ? 1.0 : 0.0;
  }
  return v;
}

struct SplState {
  double k = 1;               // self-paced weight K
  double c = 1;               // loss scale C
  double anneal_factor = 1.3; // K is divided by this after every round
  Vector v;                   // current binary selection
  std::size_t rounds = 0;

  std::size_t selected() const { return static_cast<std::size_t>(v.sum()); }
};

/// Starting state whose selection comes from the losses at the initial
/// parameters, so the first fit already ignores examples above the threshold.
inline SplState spl_init(const ErmObjective& obj, const Vector& x0, double c, double k,
                         double anneal_factor = 1.3) {
  if (!(anneal_factor > 1)) throw ValidationError("spl: anneal factor must exceed 1");
  SplState s{k, c, anneal_factor, spl_weights(obj.per_example_losses(x0), c, k), 0};
  return s;
}

/// Inner fitting routine: one optimizer configuration, restarted each round.
struct InnerOptimizer {
  Algorithm algorithm = Algorithm::Gd;
  HyperParams hp = HyperParams::defaults(Algorithm::Gd);
};

struct SplRoundResult {
  Vector params;
  SplState state;
  Vector losses;  // per-example losses after the fit
};

/// One alternation: fit on the v-weighted objective, recompute losses,
/// reselect, anneal K.
inline SplRoundResult spl_round(const ErmObjective& obj, const Vector& params, SplState state,
                                const InnerOptimizer& inner, std::size_t inner_steps) {
  if (static_cast<std::size_t>(state.v.size()) != obj.size()) {
    throw ValidationError("spl_round: selection vector does not match the dataset");
  }
  if (state.v.sum() == 0 && obj.size() > 0) {
    warn("spl_round: no example selected; fitting the regularizer only");
  }
  const ErmObjective weighted = obj.with_weights(state.v);
  Optimizer opt(inner.algorithm, inner.hp);
  Vector x = params;
  for (std::size_t i = 0; i < inner_steps; ++i) {
    x = opt.step(x, weighted);
    if (!x.allFinite()) throw NumericalError("spl_round: inner optimizer diverged");
  }
  Vector losses = obj.per_example_losses(x);
  state.v = spl_weights(losses, state.c, state.k);
  state.k /= state.anneal_factor;
  ++state.rounds;
  return {std::move(x), std::move(state), std::move(losses)};
}

}  // namespace descent

#endif  // DESCENT_SPL_HPP
