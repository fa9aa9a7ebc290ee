#ifndef DESCENT_LINESEARCH_HPP
#define DESCENT_LINESEARCH_HPP

#include "descent/core.hpp"

#include <cmath>
#include <vector>

namespace descent {

/// Backtracking parameters: alpha in (0, 0.5), beta in (0, 1).
struct LineSearchParams {
  double alpha = 0.3;
  double beta = 0.5;
  double eta_init = 1.0;

  void validate() const {
    std::string errors;
    if (!(alpha > 0 && alpha < 0.5)) errors += detail::concat(" alpha=", alpha, " not in (0, 0.5);");
    if (!(beta > 0 && beta < 1)) errors += detail::concat(" beta=", beta, " not in (0, 1);");
    if (!(eta_init > 0)) errors += detail::concat(" eta_init=", eta_init, " not positive;");
    if (!errors.empty()) throw ValidationError("line search parameters:" + errors);
  }
};

inline constexpr int kMaxBacktracks = 200;

/// Largest eta in {eta_init * beta^k} with
///   f(x + eta d) < f(x) + alpha eta grad f(x)^T d.
inline double backtracking_search(const Objective& f, const Vector& x, const Vector& direction,
                                  const LineSearchParams& params = {}) {
  params.validate();
  auto [fx, g] = f.value_and_gradient(x);
  const double slope = g.dot(direction);
  if (!(slope < 0)) {
    throw ValidationError(detail::concat("backtracking_search: not a descent direction (grad^T d = ", slope, ")"));
  }
  double eta = params.eta_init;
  for (int k = 0; k <= kMaxBacktracks; ++k) {
    const double trial = f.value(x + eta * direction);
    if (trial < fx + params.alpha * eta * slope) return eta;
    eta *= params.beta;
  }
  throw NumericalError(detail::concat("backtracking_search: no acceptable step after ", kMaxBacktracks,
                                      " reductions"));
}

/// Golden-section minimization of eta -> f(x + eta d) over [0, eta_max],
/// to 1e-8 in eta. Assumes unimodality along the ray. A minimizer at the
/// eta = 0 boundary means no descent along d and is reported as an error.
inline double exact_search(const Objective& f, const Vector& x, const Vector& direction, double eta_max,
                           double tol = 1e-8) {
  if (!(eta_max > 0) || !std::isfinite(eta_max)) {
    throw ValidationError(detail::concat("exact_search: invalid bracket (0, ", eta_max, ")"));
  }
  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  auto phi = [&](double eta) { return f.value(x + eta * direction); };
  double lo = 0;
  double hi = eta_max;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = phi(c);
  double fd = phi(d);
  while (hi - lo > tol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = phi(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = phi(d);
    }
  }
  const double eta = 0.5 * (lo + hi);
  if (eta <= tol) throw NumericalError("exact_search: minimizer at eta = 0, direction does not descend");
  return eta;
}

namespace detail {

inline Eigen::LLT<Matrix> factor_hessian(const Objective& f, const Vector& x) {
  if (!f.has_hessian()) throw ValidationError("Newton step needs an objective with a Hessian");
  Eigen::LLT<Matrix> llt(f.hessian(x));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("Hessian factorization broke down: Hessian is not positive definite at x");
  }
  return llt;
}

}  // namespace detail

/// Newton direction -H^{-1} grad f, from a Cholesky solve (no inverse is formed).
inline Vector newton_step(const Objective& f, const Vector& x) {
  const auto llt = detail::factor_hessian(f, x);
  return -llt.solve(f.gradient(x));
}

/// Newton decrement lambda(x) = (grad^T H^{-1} grad)^{1/2}.
inline double newton_decrement(const Objective& f, const Vector& x) {
  const auto llt = detail::factor_hessian(f, x);
  const Vector g = f.gradient(x);
  return std::sqrt(std::max(0.0, g.dot(llt.solve(g))));
}

struct NewtonResult {
  Vector x_star;
  std::vector<double> decrement_history;  // lambda^2 / 2 at every visited iterate
  std::size_t iterations = 0;
  bool converged = false;
};

/// Damped Newton: Newton direction, backtracking step, stop when lambda^2/2 <= eps.
inline NewtonResult newton_solve(const Objective& f, const Vector& x0, double eps,
                                 const LineSearchParams& ls = {}, std::size_t max_iterations = 100) {
  NewtonResult result{x0, {}, 0, false};
  Vector& x = result.x_star;
  while (true) {
    const auto llt = detail::factor_hessian(f, x);
    const Vector g = f.gradient(x);
    const Vector step = -llt.solve(g);
    const double half_sq = 0.5 * std::max(0.0, -g.dot(step));
    result.decrement_history.push_back(half_sq);
    if (half_sq <= eps) {
      result.converged = true;
      break;
    }
    if (result.iterations >= max_iterations) break;
    const double eta = backtracking_search(f, x, step, ls);
    x += eta * step;
    ++result.iterations;
  }
  return result;
}

}  // namespace descent

#endif  // DESCENT_LINESEARCH_HPP
