#ifndef DESCENT_OBJECTIVES_HPP
#define DESCENT_OBJECTIVES_HPP

#include "descent/core.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>

namespace descent {

/// f(x) = 1/2 x^T A x + b^T x with A symmetric.
class QuadraticForm final : public Objective {
 public:
  explicit QuadraticForm(const Matrix& a) : QuadraticForm(a, Vector::Zero(a.rows())) {}

  QuadraticForm(const Matrix& a, Vector b) : a_(symmetrized(a, "quadratic form matrix")), b_(std::move(b)) {
    if (b_.size() != a_.rows()) {
      throw ValidationError(detail::concat("quadratic form: b has size ", b_.size(), ", A is ", a_.rows(),
                                           "x", a_.cols()));
    }
  }

  static QuadraticForm diagonal(const Vector& d) { return QuadraticForm(Matrix(d.asDiagonal())); }

  std::size_t dim() const override { return static_cast<std::size_t>(a_.rows()); }
  double value(const Vector& x) const override {
    check_dim(x);
    return 0.5 * x.dot(a_ * x) + b_.dot(x);
  }
  Vector gradient(const Vector& x) const override {
    check_dim(x);
    return a_ * x + b_;
  }
  bool has_hessian() const override { return true; }
  Matrix hessian(const Vector& x) const override {
    check_dim(x);
    return a_;
  }

  const Matrix& matrix() const { return a_; }
  const Vector& linear() const { return b_; }

 private:
  Matrix a_;
  Vector b_;
};

/// x^2 - y^2: a strict (first-order) saddle at the origin.
class HyperbolicSaddle final : public Objective {
 public:
  std::size_t dim() const override { return 2; }
  double value(const Vector& x) const override {
    check_dim(x);
    return x[0] * x[0] - x[1] * x[1];
  }
  Vector gradient(const Vector& x) const override {
    check_dim(x);
    return Vector{{2 * x[0], -2 * x[1]}};
  }
  bool has_hessian() const override { return true; }
  Matrix hessian(const Vector& x) const override {
    check_dim(x);
    return Matrix{{2, 0}, {0, -2}};
  }
  static constexpr int order = 1;
};

/// Monkey saddle x1^3 - 3 x2^2 x1: zero Hessian at the origin, second order.
class MonkeySaddle final : public Objective {
 public:
  std::size_t dim() const override { return 2; }
  double value(const Vector& x) const override {
    check_dim(x);
    return x[0] * x[0] * x[0] - 3 * x[1] * x[1] * x[0];
  }
  Vector gradient(const Vector& x) const override {
    check_dim(x);
    return Vector{{3 * x[0] * x[0] - 3 * x[1] * x[1], -6 * x[0] * x[1]}};
  }
  bool has_hessian() const override { return true; }
  Matrix hessian(const Vector& x) const override {
    check_dim(x);
    return Matrix{{6 * x[0], -6 * x[1]}, {-6 * x[1], -6 * x[0]}};
  }
  static constexpr int order = 2;
};

/// (a - x1)^2 + b (x2 - x1^2)^2, minimum 0 at (a, a^2).
class Rosenbrock final : public Objective {
 public:
  explicit Rosenbrock(double a = 1, double b = 100) : a_(a), b_(b) {
    if (!(b > 0)) throw ValidationError("rosenbrock: b must be positive");
  }
  std::size_t dim() const override { return 2; }
  double value(const Vector& x) const override {
    check_dim(x);
    const double u = a_ - x[0];
    const double w = x[1] - x[0] * x[0];
    return u * u + b_ * w * w;
  }
  Vector gradient(const Vector& x) const override {
    check_dim(x);
    const double w = x[1] - x[0] * x[0];
    return Vector{{-2 * (a_ - x[0]) - 4 * b_ * x[0] * w, 2 * b_ * w}};
  }
  bool has_hessian() const override { return true; }
  Matrix hessian(const Vector& x) const override {
    check_dim(x);
    const double h00 = 2 - 4 * b_ * (x[1] - x[0] * x[0]) + 8 * b_ * x[0] * x[0];
    const double h01 = -4 * b_ * x[0];
    return Matrix{{h00, h01}, {h01, 2 * b_}};
  }
  Vector minimizer() const { return Vector{{a_, a_ * a_}}; }

 private:
  double a_;
  double b_;
};

inline Rosenbrock rosenbrock(double a, double b) { return Rosenbrock(a, b); }

/// Axis-aligned sampling region for the witnesses. Defaults to [-1, 1]^n.
struct SamplingBox {
  double lower = -1;
  double upper = 1;
};

struct ConvexityWitness {
  double alpha = 0;
  std::size_t samples = 0;
  std::optional<std::pair<Vector, Vector>> violated_pair;
  double violation = 0;

  bool violated() const { return violated_pair.has_value(); }
};

/// Searches random pairs (x, y) in the box for a violation of
///   f(y) >= f(x) + grad f(x)^T (y - x) + alpha/2 ||y - x||^2
/// beyond 1e-9. alpha = 0 tests plain convexity. A clean result is evidence,
/// not proof.
inline ConvexityWitness strong_convexity_witness(const Objective& f, double alpha, std::size_t trials,
                                                 RngStream& rng, SamplingBox box = {}) {
  if (trials < 1) throw ValidationError("strong_convexity_witness: trials must be >= 1");
  const auto n = static_cast<Eigen::Index>(f.dim());
  ConvexityWitness w{alpha, 0, std::nullopt, 0};
  for (std::size_t k = 0; k < trials; ++k) {
    const Vector x = rng.uniform_vector(n, box.lower, box.upper);
    const Vector y = rng.uniform_vector(n, box.lower, box.upper);
    auto [fx, gx] = f.value_and_gradient(x);
    const double bound = fx + gx.dot(y - x) + 0.5 * alpha * (y - x).squaredNorm();
    const double gap = bound - f.value(y);
    ++w.samples;
    if (gap > 1e-9) {
      w.violated_pair = std::make_pair(x, y);
      w.violation = gap;
      break;
    }
  }
  return w;
}

/// Polyak-Lojasiewicz check at x: f(x) - q* <= ||grad f(x)||^2 / (2 alpha).
inline bool pl_gap_bound(const Objective& f, double q_star, double alpha, const Vector& x) {
  if (!(alpha > 0)) throw ValidationError("pl_gap_bound: alpha must be positive");
  auto [fx, g] = f.value_and_gradient(x);
  return fx - q_star <= g.squaredNorm() / (2 * alpha);
}

/// Checks f(x') >= f(x_s) - c ||x' - x_s||^(n+1) at random x' in the ball of
/// the given radius around the critical point x_s. The big-O constant of the
/// saddle-order definition is the explicit parameter c.
inline bool saddle_order_witness(const Objective& f, const Vector& x_saddle, int order, double c,
                                 double radius, std::size_t samples, RngStream& rng) {
  if (order < 1) throw ValidationError("saddle_order_witness: order must be >= 1");
  if (!(c > 0)) throw ValidationError("saddle_order_witness: c must be positive");
  if (!(radius > 0)) throw ValidationError("saddle_order_witness: radius must be positive");
  const Vector g = f.gradient(x_saddle);
  if (g.norm() > 1e-8) {
    throw ValidationError(detail::concat("saddle_order_witness: ||grad f|| = ", g.norm(),
                                         " at the candidate, not a critical point"));
  }
  const double f0 = f.value(x_saddle);
  const auto n = x_saddle.size();
  for (std::size_t k = 0; k < samples; ++k) {
    Vector dir = rng.normal_vector(n);
    const double norm = dir.norm();
    if (norm == 0) continue;
    const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
    const Vector xp = x_saddle + (r / norm) * dir;
    const double dist = (xp - x_saddle).norm();
    if (f.value(xp) < f0 - c * std::pow(dist, order + 1)) return false;
  }
  return true;
}

}  // namespace descent

#endif  // DESCENT_OBJECTIVES_HPP
