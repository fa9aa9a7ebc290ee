#ifndef DESCENT_HARNESS_GRADCHECK_HPP
#define DESCENT_HARNESS_GRADCHECK_HPP

#include "descent/core.hpp"
#include "descent/erm.hpp"
#include "descent/losses.hpp"
#include "descent/objectives.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace descent::harness {

inline constexpr double kGradcheckTolerance = 1e-6;

struct GradcheckResult {
  std::string name;
  std::size_t points = 0;
  double max_relative_error = 0;
  Vector worst_point;
  Eigen::Index worst_coordinate = -1;
  bool passed = true;
};

using PointSampler = std::function<Vector(RngStream&)>;

/// Compares the analytic gradient with central differences at `points`
/// sampled points; the error metric is ||g - g_fd|| / max(1, ||g_fd||).
inline GradcheckResult gradcheck(const std::string& name, const Objective& f, std::size_t points, RngStream& rng,
                                 const PointSampler& sample, double tolerance = kGradcheckTolerance,
                                 double h = kDefaultGradientStep) {
  GradcheckResult res;
  res.name = name;
  for (std::size_t k = 0; k < points; ++k) {
    const Vector x = sample(rng);
    const Vector g = f.gradient(x);
    const Vector fd = finite_diff_gradient(f, x, h);
    const double err = relative_error(g, fd);
    ++res.points;
    if (err > res.max_relative_error || res.worst_coordinate < 0) {
      res.max_relative_error = err;
      res.worst_point = x;
      (g - fd).cwiseAbs().maxCoeff(&res.worst_coordinate);
    }
  }
  res.passed = res.max_relative_error <= tolerance;
  return res;
}

inline PointSampler box_sampler(Eigen::Index n, double lo = -1, double hi = 1) {
  return [=](RngStream& rng) { return rng.uniform_vector(n, lo, hi); };
}

struct GradcheckCase {
  std::string name;
  std::shared_ptr<const Objective> objective;
  PointSampler sampler;
};

namespace detail {

// Probability vector through a softmax of unconstrained logits, so
// finite-difference probes stay on the simplex.
inline Vector softmax(const Vector& z) {
  const Vector e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

// J^T w for the softmax Jacobian J = diag(p) - p p^T.
inline Vector softmax_pullback(const Vector& p, const Vector& w) { return p.cwiseProduct(w) - p * p.dot(w); }

using LossFn = LossValue (*)(std::span<const double>, std::span<const double>);

inline std::shared_ptr<const Objective> loss_over_predictions(LossFn loss, Vector targets) {
  const auto n = static_cast<std::size_t>(targets.size());
  return std::make_shared<FunctionObjective>(
      n, [loss, targets](const Vector& pred) { return loss(as_span(targets), as_span(pred)).value; },
      [loss, targets](const Vector& pred) { return loss(as_span(targets), as_span(pred)).grad; });
}

inline Dataset random_dataset(RngStream& rng, std::size_t n, std::size_t d,
                              const std::function<double(const Vector&, RngStream&)>& label) {
  Dataset ds{Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d)),
             Vector(static_cast<Eigen::Index>(n))};
  for (std::size_t i = 0; i < n; ++i) {
    const Vector row = rng.normal_vector(static_cast<Eigen::Index>(d));
    ds.features.row(static_cast<Eigen::Index>(i)) = row.transpose();
    ds.targets[static_cast<Eigen::Index>(i)] = label(row, rng);
  }
  return ds;
}

}  // namespace detail

/// Every analytic gradient shipped with the library, each with a sampler for
/// interior points (away from clamps and the MAE kink).
inline std::vector<GradcheckCase> shipped_gradient_cases(std::uint64_t seed = 0) {
  RngStream rng(seed);
  std::vector<GradcheckCase> cases;

  // Losses, as functions of the predictions.
  constexpr Eigen::Index kBatch = 5;
  {
    const Vector y = rng.uniform_vector(kBatch, -2, 2);
    cases.push_back({"loss/mse", detail::loss_over_predictions(&mse, y), box_sampler(kBatch, -3, 3)});
  }
  {
    // Targets in [2, 3], predictions in [-1, 1]: residuals never cross zero.
    const Vector y = rng.uniform_vector(kBatch, 2, 3);
    cases.push_back({"loss/mae", detail::loss_over_predictions(&mae, y), box_sampler(kBatch, -1, 1)});
  }
  {
    const Vector y = rng.uniform_vector(kBatch, 0, 5);
    cases.push_back({"loss/msle", detail::loss_over_predictions(&msle, y), box_sampler(kBatch, -0.5, 5)});
  }
  {
    Vector y(kBatch);
    for (Eigen::Index i = 0; i < kBatch; ++i) y[i] = static_cast<double>(rng.uniform_index(2));
    cases.push_back({"loss/bce", detail::loss_over_predictions(&bce, y), box_sampler(kBatch, 0.05, 0.95)});
  }
  {
    constexpr Eigen::Index kClasses = 4;
    const std::size_t cls = rng.uniform_index(kClasses);
    auto f = std::make_shared<FunctionObjective>(
        kClasses,
        [cls](const Vector& z) {
          const std::size_t c[1] = {cls};
          return cce(c, detail::softmax(z).transpose()).value;
        },
        [cls](const Vector& z) {
          const std::size_t c[1] = {cls};
          const Vector p = detail::softmax(z);
          const Vector dp = cce(c, p.transpose()).grad.row(0).transpose();
          return detail::softmax_pullback(p, dp);
        });
    cases.push_back({"loss/cce", f, box_sampler(kClasses, -2, 2)});
  }
  {
    constexpr Eigen::Index kDim = 5;
    Vector p = detail::softmax(rng.normal_vector(kDim));
    auto f = std::make_shared<FunctionObjective>(
        kDim, [p](const Vector& z) { return kl_divergence(p, detail::softmax(z)); },
        [p](const Vector& z) {
          const Vector q = detail::softmax(z);
          return detail::softmax_pullback(q, kl_divergence_gradient(p, q));
        });
    cases.push_back({"loss/kl", f, box_sampler(kDim, -2, 2)});
  }
  {
    constexpr double kLambda = 0.7;
    auto f = std::make_shared<FunctionObjective>(
        4, [](const Vector& x) { return l2_regularizer(x, kLambda).value; },
        [](const Vector& x) { return l2_regularizer(x, kLambda).grad; });
    cases.push_back({"loss/l2", f, box_sampler(4, -3, 3)});
  }

  // Benchmarks.
  cases.push_back({"objective/quadratic-diag", std::make_shared<QuadraticForm>(QuadraticForm::diagonal(Vector{{1.0, 100.0}})),
                   box_sampler(2)});
  {
    Matrix b(3, 3);
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = rng.uniform(-1, 1);
    cases.push_back({"objective/quadratic-dense",
                     std::make_shared<QuadraticForm>(b.transpose() * b + Matrix::Identity(3, 3), Vector{{1.0, -2.0, 0.5}}),
                     box_sampler(3)});
  }
  cases.push_back({"objective/rosenbrock", std::make_shared<Rosenbrock>(1, 100), box_sampler(2, -2, 2)});
  cases.push_back({"objective/hyperbolic-saddle", std::make_shared<HyperbolicSaddle>(), box_sampler(2)});
  cases.push_back({"objective/monkey-saddle", std::make_shared<MonkeySaddle>(), box_sampler(2)});

  // Model families.
  auto linear = detail::random_dataset(rng, 30, 3, [](const Vector& x, RngStream& r) {
    return 1.5 * x[0] - 2 * x[1] + 0.5 + 0.1 * r.normal();
  });
  cases.push_back({"model/linear-mse",
                   std::make_shared<ErmObjective>(Model::LinearRegression, linear, LossKind::Mse, 0.1),
                   box_sampler(4, -2, 2)});
  auto one_feature = detail::random_dataset(rng, 10, 1, [](const Vector& x, RngStream&) { return 3 * x[0] - 1; });
  cases.push_back({"model/linear-1-feature",
                   std::make_shared<ErmObjective>(Model::LinearRegression, one_feature, LossKind::Mse),
                   box_sampler(2, -2, 2)});
  auto binary = detail::random_dataset(rng, 30, 2, [](const Vector& x, RngStream&) {
    return x[0] + 0.5 * x[1] > 0 ? 1.0 : 0.0;
  });
  cases.push_back({"model/logistic-bce",
                   std::make_shared<ErmObjective>(Model::LogisticRegression, binary, LossKind::Bce, 0.05),
                   box_sampler(3, -2, 2)});
  auto multi = detail::random_dataset(rng, 30, 2, [](const Vector& x, RngStream&) {
    return x[0] > 0.5 ? 2.0 : (x[1] > 0 ? 1.0 : 0.0);
  });
  cases.push_back({"model/softmax-cce",
                   std::make_shared<ErmObjective>(Model::Softmax, multi, LossKind::Cce, 0.05),
                   box_sampler(9, -2, 2)});
  return cases;
}

}  // namespace descent::harness

#endif  // DESCENT_HARNESS_GRADCHECK_HPP
