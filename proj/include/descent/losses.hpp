#ifndef DESCENT_LOSSES_HPP
#define DESCENT_LOSSES_HPP

#include "descent/core.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace descent {

/// Probabilities are clamped to [kProbabilityClamp, 1 - kProbabilityClamp]
/// inside every logarithm. A confident wrong prediction therefore costs
/// -log(kProbabilityClamp) ~ 27.6 instead of infinity.
inline constexpr double kProbabilityClamp = 1e-12;

/// Tolerance on sum(p) = 1 for probability vectors.
inline constexpr double kSimplexTolerance = 1e-9;

/// Loss value and gradient with respect to the predictions.
struct LossValue {
  double value = 0;
  Vector grad;
};

/// Categorical loss value; grad has the shape of the prediction matrix (N x C).
struct MatrixLossValue {
  double value = 0;
  Matrix grad;
};

namespace detail {

inline double clamp_probability(double p) {
  return std::clamp(p, kProbabilityClamp, 1 - kProbabilityClamp);
}

inline void check_pair(std::span<const double> y, std::span<const double> pred, const char* name) {
  if (y.empty()) throw ValidationError(concat(name, ": empty batch"));
  if (y.size() != pred.size()) {
    throw ValidationError(concat(name, ": ", y.size(), " targets but ", pred.size(), " predictions"));
  }
}

template <class Row>
void check_probability_vector(const Row& p, const char* name) {
  double sum = 0;
  for (Eigen::Index c = 0; c < p.size(); ++c) {
    if (!(p[c] >= 0) || !std::isfinite(p[c])) {
      throw ValidationError(concat(name, ": probability entries must be finite and nonnegative"));
    }
    sum += p[c];
  }
  if (std::abs(sum - 1) > kSimplexTolerance) {
    throw ValidationError(concat(name, ": probabilities sum to ", sum, ", expected 1"));
  }
}

inline double sign(double v) { return static_cast<double>((v > 0) - (v < 0)); }

}  // namespace detail

/// Mean squared error.
inline LossValue mse(std::span<const double> y, std::span<const double> pred) {
  detail::check_pair(y, pred, "mse");
  const double n = static_cast<double>(y.size());
  LossValue out{0, Vector(static_cast<Eigen::Index>(y.size()))};
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - pred[i];
    out.value += r * r;
    out.grad[static_cast<Eigen::Index>(i)] = -2 * r / n;
  }
  out.value /= n;
  return out;
}

/// Mean absolute error. The subgradient at a zero residual is 0.
inline LossValue mae(std::span<const double> y, std::span<const double> pred) {
  detail::check_pair(y, pred, "mae");
  const double n = static_cast<double>(y.size());
  LossValue out{0, Vector(static_cast<Eigen::Index>(y.size()))};
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - pred[i];
    out.value += std::abs(r);
    out.grad[static_cast<Eigen::Index>(i)] = -detail::sign(r) / n;
  }
  out.value /= n;
  return out;
}

/// Mean squared logarithmic error with the +1 padding inside the logs.
/// Every target and prediction must exceed -1.
inline LossValue msle(std::span<const double> y, std::span<const double> pred) {
  detail::check_pair(y, pred, "msle");
  const double n = static_cast<double>(y.size());
  LossValue out{0, Vector(static_cast<Eigen::Index>(y.size()))};
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] > -1) || !(pred[i] > -1)) {
      throw ValidationError(detail::concat("msle: inputs must be > -1, got y=", y[i], " pred=", pred[i],
                                           " at index ", i));
    }
    const double r = std::log1p(y[i]) - std::log1p(pred[i]);
    out.value += r * r;
    out.grad[static_cast<Eigen::Index>(i)] = -2 * r / ((1 + pred[i]) * n);
  }
  out.value /= n;
  return out;
}

/// Binary cross-entropy, -(1/N) sum [y log p + (1 - y) log(1 - p)], on clamped p.
/// Targets must be exactly 0 or 1.
inline LossValue bce(std::span<const double> y, std::span<const double> pred) {
  detail::check_pair(y, pred, "bce");
  const double n = static_cast<double>(y.size());
  LossValue out{0, Vector(static_cast<Eigen::Index>(y.size()))};
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) {
      throw ValidationError(detail::concat("bce: target at index ", i, " is ", y[i], ", expected 0 or 1"));
    }
    if (!(pred[i] >= 0 && pred[i] <= 1)) {
      throw ValidationError(detail::concat("bce: prediction at index ", i, " outside [0, 1]"));
    }
    const double p = detail::clamp_probability(pred[i]);
    out.value -= y[i] * std::log(p) + (1 - y[i]) * std::log(1 - p);
    out.grad[static_cast<Eigen::Index>(i)] = (-y[i] / p + (1 - y[i]) / (1 - p)) / n;
  }
  out.value /= n;
  return out;
}

/// Categorical cross-entropy. `classes[i]` is the target class of row i of
/// `probs` (N x C); one-hot expansion is implicit.
inline MatrixLossValue cce(std::span<const std::size_t> classes, const Matrix& probs) {
  if (classes.empty()) throw ValidationError("cce: empty batch");
  if (static_cast<std::size_t>(probs.rows()) != classes.size()) {
    throw ValidationError(
        detail::concat("cce: ", classes.size(), " targets but ", probs.rows(), " prediction rows"));
  }
  const double n = static_cast<double>(classes.size());
  MatrixLossValue out{0, Matrix::Zero(probs.rows(), probs.cols())};
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    detail::check_probability_vector(probs.row(i), "cce");
    const auto c = static_cast<Eigen::Index>(classes[static_cast<std::size_t>(i)]);
    if (c >= probs.cols()) {
      throw ValidationError(detail::concat("cce: class ", c, " out of range for ", probs.cols(), " classes"));
    }
    const double p = detail::clamp_probability(probs(i, c));
    out.value -= std::log(p);
    out.grad(i, c) = -1 / (p * n);
  }
  out.value /= n;
  return out;
}

/// Discrete Kullback-Leibler divergence D(p || q) = sum p_c log(p_c / q_c),
/// with 0 log(0 / q) = 0 and q_c clamped below where p_c > 0.
inline double kl_divergence(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) {
    throw ValidationError(detail::concat("kl_divergence: dimension mismatch ", p.size(), " vs ", q.size()));
  }
  detail::check_probability_vector(p, "kl_divergence(p)");
  detail::check_probability_vector(q, "kl_divergence(q)");
  double d = 0;
  for (Eigen::Index c = 0; c < p.size(); ++c) {
    if (p[c] == 0) continue;
    if (p[c] == q[c]) continue;  // exact zero for D(p || p)
    d += p[c] * std::log(p[c] / std::max(q[c], kProbabilityClamp));
  }
  return d;
}

/// d D(p || q) / d q_c = -p_c / q_c (q clamped as in kl_divergence).
inline Vector kl_divergence_gradient(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) {
    throw ValidationError(detail::concat("kl_divergence: dimension mismatch ", p.size(), " vs ", q.size()));
  }
  Vector g(p.size());
  for (Eigen::Index c = 0; c < p.size(); ++c) g[c] = p[c] == 0 ? 0.0 : -p[c] / std::max(q[c], kProbabilityClamp);
  return g;
}

struct RegularizerValue {
  double value = 0;
  Vector grad;
};

/// (lambda / 2) ||x||^2 and its gradient lambda x.
inline RegularizerValue l2_regularizer(const Vector& x, double lambda) {
  if (!(lambda >= 0)) throw ValidationError("l2_regularizer: lambda must be >= 0");
  return {0.5 * lambda * x.squaredNorm(), lambda * x};
}

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace descent

#endif  // DESCENT_LOSSES_HPP
