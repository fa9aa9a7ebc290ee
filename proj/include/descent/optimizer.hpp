#ifndef DESCENT_OPTIMIZER_HPP
#define DESCENT_OPTIMIZER_HPP

#include "descent/core.hpp"
#include "descent/optimizers.hpp"

#include <concepts>
#include <optional>
#include <type_traits>
#include <utility>

namespace descent {

/// Runtime-selected optimizer: one state, one algorithm, one stepping call.
///
/// `step` takes a gradient callable so NAG can evaluate at its lookahead
/// point; every other algorithm calls it once at x. When lambda_l2 > 0 the
/// L2 term lambda_l2 * x is added to every gradient.
class Optimizer {
 public:
  Optimizer(Algorithm algorithm, HyperParams hp, std::optional<FeasibleBox> box = std::nullopt)
      : algorithm_(algorithm), hp_(std::move(hp)), box_(std::move(box)) {
    hp_.validate(algorithm_);
  }

  Algorithm algorithm() const { return algorithm_; }
  const HyperParams& hyper_params() const { return hp_; }
  const OptimizerState& state() const { return state_; }
  const StepDiagnostics& last_diagnostics() const { return diagnostics_; }

  void reset() { initialized_ = false; }

  template <class GradFn>
    requires(!std::derived_from<std::remove_cvref_t<GradFn>, Objective> &&
             std::invocable<GradFn&, const Vector&>)
  Vector step(const Vector& x, GradFn&& grad) {
    if (!initialized_) {
      state_ = OptimizerState::fresh(algorithm_, x.size());
      if (box_) box_->validate(x.size());
      initialized_ = true;
    }
    const OptimizerState prev = state_;
    auto full_grad = [&](const Vector& at) -> Vector {
      Vector g = grad(at);
      if (hp_.lambda_l2 > 0) g += hp_.lambda_l2 * at;
      return g;
    };
    Vector next;
    if (algorithm_ == Algorithm::Nag) {
      next = nag_step(state_, x, full_grad, hp_);
    } else {
      next = step_with_gradient(x, full_grad(x));
    }
    diagnostics_ = step_diagnostics(prev, state_, hp_);
    return next;
  }

  Vector step(const Vector& x, const Objective& f) {
    return step(x, [&f](const Vector& at) { return f.gradient(at); });
  }

 private:
  Vector step_with_gradient(const Vector& x, const Vector& g) {
    switch (algorithm_) {
      case Algorithm::Gd: return gd_step(state_, x, g, hp_);
      case Algorithm::Momentum: return momentum_step(state_, x, g, hp_);
      case Algorithm::Adagrad: return adagrad_step(state_, x, g, hp_);
      case Algorithm::Adadelta: return adadelta_step(state_, x, g, hp_);
      case Algorithm::Rmsprop: return rmsprop_step(state_, x, g, hp_);
      case Algorithm::Adam: return adam_step(state_, x, g, hp_);
      case Algorithm::Adamax: return adamax_step(state_, x, g, hp_);
      case Algorithm::Nadam: return nadam_step(state_, x, g, hp_);
      case Algorithm::Amsgrad: return amsgrad_step(state_, x, g, hp_, box_);
      case Algorithm::Padam: return padam_step(state_, x, g, hp_, box_);
      case Algorithm::Sgdw: return sgdw_step(state_, x, g, hp_);
      case Algorithm::Adamw: return adamw_step(state_, x, g, hp_);
      case Algorithm::Nag: break;
    }
    throw ValidationError("step_with_gradient: NAG needs a gradient callable");
  }

  Algorithm algorithm_;
  HyperParams hp_;
  std::optional<FeasibleBox> box_;
  OptimizerState state_;
  StepDiagnostics diagnostics_;
  bool initialized_ = false;
};

}  // namespace descent

#endif  // DESCENT_OPTIMIZER_HPP
