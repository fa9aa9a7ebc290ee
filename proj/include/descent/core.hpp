#ifndef DESCENT_CORE_HPP
#define DESCENT_CORE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace descent {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: out-of-range hyperparameters, dimension mismatches, invalid inputs.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown: non-finite values, failed factorizations, exhausted searches.
class NumericalError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::function<void(const std::string&)>& warning_sink() {
  static std::function<void(const std::string&)> sink = [](const std::string& msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return sink;
}

template <class... Args>
std::string concat(Args&&... args) {
  std::ostringstream os;
  (os << ... << std::forward<Args>(args));
  return os.str();
}

}  // namespace detail

/// Replaces the process-wide warning sink. Passing an empty function silences warnings.
inline void set_warning_sink(std::function<void(const std::string&)> sink) {
  detail::warning_sink() = std::move(sink);
}

inline void warn(const std::string& msg) {
  if (auto& sink = detail::warning_sink()) sink(msg);
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

/// ||a - reference|| / max(1, ||reference||)
inline double relative_error(const Vector& a, const Vector& reference) {
  return (a - reference).norm() / std::max(1.0, reference.norm());
}

/// Symmetrizes a square matrix in place as (A + A^T) / 2, warning when the
/// relative asymmetry exceeds 1e-12.
inline Matrix symmetrized(const Matrix& a, const std::string& what = "matrix") {
  if (a.rows() != a.cols()) {
    throw ValidationError(detail::concat(what, " must be square, got ", a.rows(), "x", a.cols()));
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    warn(detail::concat(what, " is not symmetric (max |A - A^T| = ", asym, "); symmetrizing"));
  }
  return 0.5 * (a + a.transpose());
}

/// Differentiable objective f: R^n -> R.
///
/// Implementations must be safe to evaluate concurrently from several threads;
/// none of the shipped objectives mutate on evaluation.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;

  virtual bool has_hessian() const { return false; }
  virtual Matrix hessian(const Vector& x) const {
    (void)x;
    throw ValidationError("objective does not provide a Hessian");
  }

  virtual std::pair<double, Vector> value_and_gradient(const Vector& x) const {
    return {value(x), gradient(x)};
  }

 protected:
  void check_dim(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != dim()) {
      throw ValidationError(
          detail::concat("dimension mismatch: objective expects ", dim(), ", got ", x.size()));
    }
  }
};

/// Objective assembled from callables. The Hessian callable is optional.
class FunctionObjective final : public Objective {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;
  using HessianFn = std::function<Matrix(const Vector&)>;

  FunctionObjective(std::size_t n, ValueFn f, GradientFn g, HessianFn h = {})
      : n_(n), f_(std::move(f)), g_(std::move(g)), h_(std::move(h)) {}

  std::size_t dim() const override { return n_; }
  double value(const Vector& x) const override {
    check_dim(x);
    return f_(x);
  }
  Vector gradient(const Vector& x) const override {
    check_dim(x);
    return g_(x);
  }
  bool has_hessian() const override { return static_cast<bool>(h_); }
  Matrix hessian(const Vector& x) const override {
    check_dim(x);
    if (!h_) return Objective::hessian(x);
    return h_(x);
  }

 private:
  std::size_t n_;
  ValueFn f_;
  GradientFn g_;
  HessianFn h_;
};

inline constexpr double kDefaultGradientStep = 1e-5;
inline constexpr double kDefaultHessianStep = 1e-4;

namespace detail {

inline double checked_eval(const Objective& f, const Vector& x, Eigen::Index coord) {
  const double v = f.value(x);
  if (!std::isfinite(v)) {
    throw NumericalError(concat("non-finite objective value while differencing coordinate ", coord));
  }
  return v;
}

}  // namespace detail

/// Central-difference gradient: g_i = (f(x + h e_i) - f(x - h e_i)) / 2h.
inline Vector finite_diff_gradient(const Objective& f, const Vector& x,
                                   double h = kDefaultGradientStep) {
  if (!(h > 0)) throw ValidationError("finite difference step must be positive");
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = detail::checked_eval(f, probe, i);
    probe[i] = x[i] - h;
    const double fm = detail::checked_eval(f, probe, i);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

/// Central second differences, symmetrized as (H + H^T) / 2.
inline Matrix finite_diff_hessian(const Objective& f, const Vector& x,
                                  double h = kDefaultHessianStep) {
  if (!(h > 0)) throw ValidationError("finite difference step must be positive");
  const Eigen::Index n = x.size();
  Matrix hess(n, n);
  Vector probe = x;
  const double f0 = detail::checked_eval(f, x, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    probe[i] = x[i] + h;
    const double fp = detail::checked_eval(f, probe, i);
    probe[i] = x[i] - h;
    const double fm = detail::checked_eval(f, probe, i);
    probe[i] = x[i];
    hess(i, i) = (fp - 2 * f0 + fm) / (h * h);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      auto at = [&](double si, double sj) {
        probe[i] = x[i] + si * h;
        probe[j] = x[j] + sj * h;
        const double v = detail::checked_eval(f, probe, i);
        probe[i] = x[i];
        probe[j] = x[j];
        return v;
      };
      const double hij = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h * h);
      hess(i, j) = hij;
      hess(j, i) = hij;
    }
  }
  return 0.5 * (hess + hess.transpose());
}

/// Deterministic random stream on top of mt19937_64.
///
/// The standard library distributions are implementation-defined, so uniform
/// and normal draws are derived from the raw 64-bit engine output here. That
/// keeps sequences identical across compilers and platforms.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), unbiased by rejection.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw ValidationError("uniform_index needs n >= 1");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return r % n;
  }

  /// Standard normal via the Marsaglia polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2 * uniform() - 1;
      v = 2 * uniform() - 1;
      s = u * u + v * v;
    } while (s >= 1 || s == 0);
    const double factor = std::sqrt(-2 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  Vector normal_vector(Eigen::Index n) {
    Vector out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = normal();
    return out;
  }

  Vector uniform_vector(Eigen::Index n, double lo, double hi) {
    Vector out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = uniform(lo, hi);
    return out;
  }

  /// Independent sub-stream at a fixed offset from this stream's seed.
  /// Derived from the seed only, never from the current position.
  RngStream split(std::uint64_t offset) const { return RngStream(mix(seed_ + offset * kGolden)); }

  template <class It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      std::iter_swap(first + (i - 1), first + uniform_index(i));
    }
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0;
  bool has_spare_ = false;
};

inline RngStream seeded_rng(std::uint64_t seed) { return RngStream(seed); }

}  // namespace descent

#endif  // DESCENT_CORE_HPP
