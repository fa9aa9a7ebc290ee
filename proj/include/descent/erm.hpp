#ifndef DESCENT_ERM_HPP
#define DESCENT_ERM_HPP

#include "descent/core.hpp"
#include "descent/losses.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace descent {

/// Dense dataset. Targets are reals for regression and class indices
/// (stored as exact integers) for classification.
struct Dataset {
  Matrix features;  // N x d
  Vector targets;   // N

  std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t num_features() const { return static_cast<std::size_t>(features.cols()); }
};

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::string buf(s);
  std::size_t used = 0;
  try {
    const double v = std::stod(buf, &used);
    if (used != buf.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// Reads comma-separated rows: features first, target last. A first row that
/// does not parse as numbers is treated as a header and skipped.
inline Dataset parse_dataset(std::istream& in, const std::string& source = "<stream>") {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_commas(line);
    std::vector<double> row;
    row.reserve(cells.size());
    bool numeric = true;
    for (auto cell : cells) {
      auto v = detail::parse_double(cell);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw ValidationError(detail::concat(source, ":", line_no, ": non-numeric value"));
    }
    first = false;
    if (row.size() < 2) {
      throw ValidationError(detail::concat(source, ":", line_no, ": need at least one feature and a target"));
    }
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw ValidationError(
          detail::concat(source, ":", line_no, ": expected ", width, " columns, got ", row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError(detail::concat(source, ": no data rows"));
  Dataset ds{Matrix(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width - 1)),
             Vector(static_cast<Eigen::Index>(rows.size()))};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j + 1 < width; ++j) ds.features(r, static_cast<Eigen::Index>(j)) = rows[i][j];
    ds.targets[r] = rows[i][width - 1];
  }
  return ds;
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset file: " + path);
  return parse_dataset(in, path);
}

enum class Model { LinearRegression, LogisticRegression, Softmax };
enum class LossKind { Mse, Mae, Msle, Bce, Cce };

inline const char* to_string(Model m) {
  switch (m) {
    case Model::LinearRegression: return "linear";
    case Model::LogisticRegression: return "logistic";
    case Model::Softmax: return "softmax";
  }
  return "?";
}

inline const char* to_string(LossKind k) {
  switch (k) {
    case LossKind::Mse: return "mse";
    case LossKind::Mae: return "mae";
    case LossKind::Msle: return "msle";
    case LossKind::Bce: return "bce";
    case LossKind::Cce: return "cce";
  }
  return "?";
}

/// Weighted, L2-regularized empirical risk
///   L(x) = (1/N) sum_i v_i loss_i(x) + (lambda/2) ||x||^2
/// over a linear, logistic or softmax model. Parameters are laid out as
/// [w_1 .. w_d, bias] per output; softmax stacks one such block per class.
class ErmObjective final : public Objective {
 public:
  ErmObjective(Model model, Dataset data, LossKind loss, double lambda = 0,
               std::optional<Vector> weights = std::nullopt, bool intercept = true)
      : model_(model), data_(std::move(data)), loss_(loss), lambda_(lambda), intercept_(intercept) {
    if (data_.size() == 0) throw ValidationError("erm: empty dataset");
    if (data_.targets.size() != data_.features.rows()) {
      throw ValidationError("erm: feature rows and targets differ in length");
    }
    if (!(lambda_ >= 0)) throw ValidationError("erm: regularization lambda must be >= 0");
    check_model_loss();
    if (model_ == Model::LogisticRegression) {
      for (Eigen::Index i = 0; i < data_.targets.size(); ++i) {
        const double t = data_.targets[i];
        if (t != 0.0 && t != 1.0) {
          throw ValidationError(detail::concat("erm: logistic target at row ", i, " is ", t, ", expected 0/1"));
        }
      }
    }
    if (model_ == Model::Softmax) {
      double max_class = 0;
      for (Eigen::Index i = 0; i < data_.targets.size(); ++i) {
        const double t = data_.targets[i];
        if (t < 0 || t != std::floor(t)) {
          throw ValidationError(detail::concat("erm: class label at row ", i, " is not a nonnegative integer"));
        }
        max_class = std::max(max_class, t);
      }
      classes_ = static_cast<std::size_t>(max_class) + 1;
      if (classes_ < 2) classes_ = 2;
    }
    set_weights(std::move(weights));
  }

  std::size_t dim() const override { return outputs() * block(); }
  std::size_t size() const { return data_.size(); }
  std::size_t num_classes() const { return classes_; }
  Model model() const { return model_; }
  LossKind loss() const { return loss_; }
  double lambda() const { return lambda_; }
  const Dataset& data() const { return data_; }
  const Vector& weights() const { return weights_; }

  /// Replaces the per-example weights; nullopt restores all ones.
  void set_weights(std::optional<Vector> weights) {
    if (weights) {
      if (static_cast<std::size_t>(weights->size()) != size()) {
        throw ValidationError(detail::concat("erm: ", weights->size(), " weights for ", size(), " examples"));
      }
      if ((weights->array() < 0).any() || !weights->allFinite()) {
        throw ValidationError("erm: example weights must be finite and nonnegative");
      }
      weights_ = std::move(*weights);
    } else {
      weights_ = Vector::Ones(static_cast<Eigen::Index>(size()));
    }
  }

  ErmObjective with_weights(Vector weights) const {
    ErmObjective copy = *this;
    copy.set_weights(std::move(weights));
    return copy;
  }

  double value(const Vector& x) const override {
    check_dim(x);
    double total = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      const double w = weights_[static_cast<Eigen::Index>(i)];
      if (w != 0) total += w * example_loss(x, i);
    }
    return total / static_cast<double>(size()) + 0.5 * lambda_ * x.squaredNorm();
  }

  Vector gradient(const Vector& x) const override { return value_and_gradient(x).second; }

  std::pair<double, Vector> value_and_gradient(const Vector& x) const override {
    check_dim(x);
    double total = 0;
    Vector g = Vector::Zero(x.size());
    for (std::size_t i = 0; i < size(); ++i) {
      const double w = weights_[static_cast<Eigen::Index>(i)];
      if (w == 0) continue;
      total += w * accumulate_example(x, i, w, g);
    }
    const double n = static_cast<double>(size());
    g /= n;
    g += lambda_ * x;
    return {total / n + 0.5 * lambda_ * x.squaredNorm(), g};
  }

  /// Unweighted per-example losses (the quantities self-paced weighting thresholds).
  Vector per_example_losses(const Vector& x) const {
    check_dim(x);
    Vector out(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) out[static_cast<Eigen::Index>(i)] = example_loss(x, i);
    return out;
  }

  /// Gradient of the weighted mean loss restricted to `indices` (each example
  /// counted with its weight, averaged over the subset) plus the regularizer.
  Vector subset_gradient(const Vector& x, std::span<const std::size_t> indices) const {
    check_dim(x);
    if (indices.empty()) throw ValidationError("erm: empty index subset");
    Vector g = Vector::Zero(x.size());
    for (auto i : indices) {
      if (i >= size()) throw ValidationError(detail::concat("erm: example index ", i, " out of range"));
      const double w = weights_[static_cast<Eigen::Index>(i)];
      if (w != 0) accumulate_example(x, i, w, g);
    }
    g /= static_cast<double>(indices.size());
    g += lambda_ * x;
    return g;
  }

  /// Gradient of example i's (unweighted) loss, without the regularizer.
  Vector example_gradient(const Vector& x, std::size_t i) const {
    check_dim(x);
    Vector g = Vector::Zero(x.size());
    accumulate_example(x, i, 1.0, g);
    return g;
  }

  bool has_hessian() const override {
    return loss_ == LossKind::Mse || loss_ == LossKind::Bce || loss_ == LossKind::Cce;
  }

  Matrix hessian(const Vector& x) const override {
    check_dim(x);
    if (!has_hessian()) return Objective::hessian(x);
    const auto p = static_cast<Eigen::Index>(dim());
    Matrix h = Matrix::Zero(p, p);
    const auto b = static_cast<Eigen::Index>(block());
    for (std::size_t i = 0; i < size(); ++i) {
      const double w = weights_[static_cast<Eigen::Index>(i)];
      if (w == 0) continue;
      const Vector z = augmented(i);
      switch (model_) {
        case Model::LinearRegression:
          h.noalias() += 2 * w * z * z.transpose();
          break;
        case Model::LogisticRegression: {
          const double s = sigmoid(z.dot(x));
          h.noalias() += w * s * (1 - s) * z * z.transpose();
          break;
        }
        case Model::Softmax: {
          const Vector pr = softmax_probs(x, z);
          const Matrix zz = z * z.transpose();
          for (Eigen::Index a = 0; a < pr.size(); ++a) {
            for (Eigen::Index c = 0; c < pr.size(); ++c) {
              const double coef = (a == c ? pr[a] : 0.0) - pr[a] * pr[c];
              h.block(a * b, c * b, b, b) += w * coef * zz;
            }
          }
          break;
        }
      }
    }
    h /= static_cast<double>(size());
    h.diagonal().array() += lambda_;
    return h;
  }

  /// Model output for one feature row: a real for regression, P(y=1) for
  /// logistic, the class-probability vector for softmax.
  Vector predict_row(const Vector& x, std::size_t i) const {
    const Vector z = augmented(i);
    switch (model_) {
      case Model::LinearRegression: return Vector::Constant(1, z.dot(x));
      case Model::LogisticRegression: return Vector::Constant(1, sigmoid(z.dot(x)));
      case Model::Softmax: return softmax_probs(x, z);
    }
    return {};
  }

  /// Fraction of examples classified correctly (classification models only).
  double accuracy(const Vector& x) const {
    if (model_ == Model::LinearRegression) throw ValidationError("erm: accuracy needs a classifier");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      const Vector out = predict_row(x, i);
      double label;
      if (model_ == Model::LogisticRegression) {
        label = out[0] >= 0.5 ? 1.0 : 0.0;
      } else {
        Eigen::Index arg;
        out.maxCoeff(&arg);
        label = static_cast<double>(arg);
      }
      hits += label == data_.targets[static_cast<Eigen::Index>(i)];
    }
    return static_cast<double>(hits) / static_cast<double>(size());
  }

  static double sigmoid(double a) {
    if (a >= 0) return 1 / (1 + std::exp(-a));
    const double e = std::exp(a);
    return e / (1 + e);
  }

 private:
  std::size_t block() const { return data_.num_features() + (intercept_ ? 1 : 0); }
  std::size_t outputs() const { return model_ == Model::Softmax ? classes_ : 1; }

  Vector augmented(std::size_t i) const {
    const auto d = static_cast<Eigen::Index>(data_.num_features());
    Vector z(static_cast<Eigen::Index>(block()));
    z.head(d) = data_.features.row(static_cast<Eigen::Index>(i)).transpose();
    if (intercept_) z[d] = 1;
    return z;
  }

  Vector softmax_probs(const Vector& x, const Vector& z) const {
    const auto b = static_cast<Eigen::Index>(block());
    Vector logits(static_cast<Eigen::Index>(classes_));
    for (Eigen::Index c = 0; c < logits.size(); ++c) logits[c] = x.segment(c * b, b).dot(z);
    const double mx = logits.maxCoeff();
    Vector e = (logits.array() - mx).exp();
    return e / e.sum();
  }

  void check_model_loss() const {
    const bool ok = (model_ == Model::LinearRegression &&
                     (loss_ == LossKind::Mse || loss_ == LossKind::Mae || loss_ == LossKind::Msle)) ||
                    (model_ == Model::LogisticRegression && loss_ == LossKind::Bce) ||
                    (model_ == Model::Softmax && loss_ == LossKind::Cce);
    if (!ok) {
      throw ValidationError(detail::concat("erm: loss ", to_string(loss_), " does not apply to model ",
                                           to_string(model_)));
    }
  }

  double example_loss(const Vector& x, std::size_t i) const {
    Vector scratch = Vector::Zero(x.size());
    return accumulate_example(x, i, 0.0, scratch);
  }

  // Returns example i's loss; adds weight * d loss_i / dx into g.
  double accumulate_example(const Vector& x, std::size_t i, double weight, Vector& g) const {
    const Vector z = augmented(i);
    const double y = data_.targets[static_cast<Eigen::Index>(i)];
    switch (model_) {
      case Model::LinearRegression: {
        const double pred = z.dot(x);
        const double yy[1] = {y};
        const double pp[1] = {pred};
        LossValue l;
        switch (loss_) {
          case LossKind::Mse: l = mse(yy, pp); break;
          case LossKind::Mae: l = mae(yy, pp); break;
          default: l = msle(yy, pp); break;
        }
        if (weight != 0) g.noalias() += weight * l.grad[0] * z;
        return l.value;
      }
      case Model::LogisticRegression: {
        const double s = sigmoid(z.dot(x));
        const double yy[1] = {y};
        const double pp[1] = {s};
        const LossValue l = bce(yy, pp);
        // Chain rule through the sigmoid, on clamped probabilities.
        if (weight != 0) {
          const double pc = std::clamp(s, kProbabilityClamp, 1 - kProbabilityClamp);
          g.noalias() += weight * l.grad[0] * pc * (1 - pc) * z;
        }
        return l.value;
      }
      case Model::Softmax: {
        const Vector pr = softmax_probs(x, z);
        const std::size_t cls[1] = {static_cast<std::size_t>(y)};
        const MatrixLossValue l = cce(cls, pr.transpose());
        if (weight != 0) {
          const auto b = static_cast<Eigen::Index>(block());
          // d/dlogit_a of -log p_y is p_a - [a == y] (for an unclamped p_y).
          for (Eigen::Index a = 0; a < pr.size(); ++a) {
            const double dl = pr[a] - (a == static_cast<Eigen::Index>(y) ? 1.0 : 0.0);
            g.segment(a * b, b).noalias() += weight * dl * z;
          }
        }
        return l.value;
      }
    }
    return 0;
  }

  Model model_;
  Dataset data_;
  LossKind loss_;
  double lambda_;
  bool intercept_;
  std::size_t classes_ = 0;
  Vector weights_;
};

inline ErmObjective erm_objective(Model model, Dataset data, LossKind loss, double lambda = 0,
                                  std::optional<Vector> weights = std::nullopt) {
  return ErmObjective(model, std::move(data), loss, lambda, std::move(weights));
}

}  // namespace descent

#endif  // DESCENT_ERM_HPP
