#ifndef DESCENT_HARNESS_CONFIG_HPP
#define DESCENT_HARNESS_CONFIG_HPP

#include "descent/core.hpp"
#include "descent/erm.hpp"
#include "descent/linesearch.hpp"
#include "descent/optimizers.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace descent::harness {

enum class GradientMode { Full, Minibatch, Stochastic };

struct ObjectiveSpec {
  std::string name = "quadratic";  // quadratic | rosenbrock | hyperbolic | monkey | erm
  Matrix a;                        // quadratic matrix
  Vector b;                        // quadratic linear term
  double rosen_a = 1;
  double rosen_b = 100;
  std::string dataset;
  Model model = Model::LinearRegression;
  LossKind loss = LossKind::Mse;
  double lambda = 0;
  bool intercept = true;
  Vector x0;
  std::optional<double> f_star;
  std::map<std::string, std::string> raw;  // section as written, for shared-objective checks
};

struct OptimizerSpec {
  Algorithm algorithm = Algorithm::Gd;
  HyperParams hp = HyperParams::defaults(Algorithm::Gd);
  std::optional<FeasibleBox> box;
  GradientMode gradient = GradientMode::Full;
  std::size_t batch_size = 1;
  bool line_search = false;
  LineSearchParams ls;
  double noise_sigma = 0;  // additive Gaussian perturbation of every gradient
};

struct RunSpec {
  std::size_t max_steps = 10000;
  double grad_tol = 1e-8;
  std::optional<double> f_tol;  // stop when f - f_star <= f_tol (needs f_star)
  std::uint64_t seed = 0;
};

struct OutputSpec {
  std::string trace;
  std::size_t log_every = 1;
  std::size_t dump_every = 0;  // 0: no iterate dump
  bool timing = false;         // false: elapsed_ns column is written as 0
};

struct SplSpec {
  double c = 1;
  double k = 1;
  double anneal = 1.3;
  std::size_t rounds = 25;
  std::size_t inner_steps = 200;
};

struct ExperimentConfig {
  std::string label;
  ObjectiveSpec objective;
  OptimizerSpec optimizer;
  RunSpec run;
  OutputSpec output;
  SplSpec spl;
  std::vector<std::string> defaults_applied;
};

namespace detail {

using descent::detail::concat;
using descent::detail::parse_double;
using descent::detail::split_commas;
using descent::detail::trim;

inline std::optional<Vector> parse_vector(const std::string& s) {
  const auto cells = split_commas(s);
  Vector v(static_cast<Eigen::Index>(cells.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto d = parse_double(cells[i]);
    if (!d) {
      const auto t = trim(cells[i]);
      if (t == "inf" || t == "+inf") {
        d = std::numeric_limits<double>::infinity();
      } else if (t == "-inf") {
        d = -std::numeric_limits<double>::infinity();
      } else {
        return std::nullopt;
      }
    }
    v[static_cast<Eigen::Index>(i)] = *d;
  }
  return v;
}

// Rows separated by ';', entries by ','.
inline std::optional<Matrix> parse_matrix(const std::string& s) {
  std::vector<Vector> rows;
  std::stringstream ss(s);
  std::string row;
  while (std::getline(ss, row, ';')) {
    auto v = parse_vector(row);
    if (!v) return std::nullopt;
    rows.push_back(*v);
  }
  if (rows.empty()) return std::nullopt;
  Matrix m(static_cast<Eigen::Index>(rows.size()), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) return std::nullopt;
    m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  return m;
}

/// Collects every problem in a config instead of stopping at the first.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void set_section(const std::string& name, const boost::property_tree::ptree* tree) {
    section_ = name;
    tree_ = tree;
  }

  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

  std::optional<std::string> text(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return std::string(trim(tree_->get<std::string>(key)));
  }

  void number(const std::string& key, double& out) {
    if (auto t = text(key)) {
      if (auto d = parse_double(*t)) {
        out = *d;
      } else {
        error(key, "expected a number, got '" + *t + "'");
      }
    }
  }

  void count(const std::string& key, std::size_t& out) {
    if (auto t = text(key)) {
      auto d = parse_double(*t);
      if (!d || *d < 0 || *d != std::floor(*d)) {
        error(key, "expected a nonnegative integer, got '" + *t + "'");
      } else {
        out = static_cast<std::size_t>(*d);
      }
    }
  }

  void seed(const std::string& key, std::uint64_t& out) {
    if (auto t = text(key)) {
      try {
        std::size_t used = 0;
        out = std::stoull(*t, &used);
        if (used != t->size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        error(key, "expected an unsigned 64-bit integer, got '" + *t + "'");
      }
    }
  }

  void flag(const std::string& key, bool& out) {
    if (auto t = text(key)) {
      if (*t == "true" || *t == "1" || *t == "yes") {
        out = true;
      } else if (*t == "false" || *t == "0" || *t == "no") {
        out = false;
      } else {
        error(key, "expected true/false, got '" + *t + "'");
      }
    }
  }

  void vector(const std::string& key, Vector& out) {
    if (auto t = text(key)) {
      if (auto v = parse_vector(*t)) {
        out = *v;
      } else {
        error(key, "expected a comma-separated list of numbers");
      }
    }
  }

  void error(const std::string& key, const std::string& msg) {
    errors_.push_back(concat("[", section_, "] ", key, ": ", msg));
  }

 private:
  std::vector<std::string>& errors_;
  std::string section_;
  const boost::property_tree::ptree* tree_ = nullptr;
};

inline const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"objective",
       {"name", "diag", "matrix", "b", "a", "rosen_b", "dataset", "model", "loss", "lambda", "intercept", "x0",
        "f_star"}},
      {"optimizer",
       {"name", "eta", "beta", "beta1", "beta2", "rho", "epsilon", "lambda_decay", "lambda_l2", "p", "delta",
        "box_lower", "box_upper", "gradient", "batch_size", "line_search", "ls_alpha", "ls_beta", "ls_eta_init",
        "noise_sigma", "optimal_momentum"}},
      {"run", {"max_steps", "grad_tol", "f_tol", "seed"}},
      {"output", {"trace", "log_every", "dump_every", "timing"}},
      {"spl", {"c", "k", "anneal", "rounds", "inner_steps"}},
  };
  return keys;
}

}  // namespace detail

/// Parses and validates a config. Throws ValidationError listing every
/// violation found.
inline ExperimentConfig parse_config_stream(std::istream& in, const std::string& source = "<config>") {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  std::vector<std::string> errors;
  ExperimentConfig cfg;
  cfg.label = source;
  const auto& allowed = detail::allowed_keys();
  for (const auto& [section, body] : tree) {
    auto it = allowed.find(section);
    if (it == allowed.end()) {
      if (body.empty()) {
        errors.push_back(detail::concat("key '", section, "' outside any section"));
      } else {
        errors.push_back(detail::concat("unknown section [", section, "]"));
      }
      continue;
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) errors.push_back(detail::concat("[", section, "] unknown key '", key, "'"));
    }
  }

  detail::Reader r(errors);
  auto section = [&](const char* name) -> const pt::ptree* {
    auto it = tree.find(name);
    return it == tree.not_found() ? nullptr : &it->second;
  };
  auto note = [&](const std::string& s) { cfg.defaults_applied.push_back(s); };

  // [objective]
  const pt::ptree* obj = section("objective");
  if (!obj) errors.push_back("missing section [objective]");
  r.set_section("objective", obj);
  auto& os = cfg.objective;
  if (obj) {
    for (const auto& [k, v] : *obj) os.raw[k] = v.data();
  }
  if (auto name = r.text("name")) {
    os.name = *name;
  } else if (obj) {
    r.error("name", "required");
  }
  static const std::set<std::string> known_objectives{"quadratic", "rosenbrock", "hyperbolic", "monkey", "erm"};
  if (!known_objectives.count(os.name)) r.error("name", "unknown objective '" + os.name + "'");
  Eigen::Index dim = 2;
  if (os.name == "quadratic") {
    if (auto m = r.text("matrix")) {
      if (auto a = detail::parse_matrix(*m); a && a->rows() == a->cols()) {
        os.a = *a;
      } else {
        r.error("matrix", "expected a square matrix written as rows 'a,b;c,d'");
      }
    } else {
      Vector d = Vector{{1.0, 100.0}};
      if (!r.has("diag")) note("objective.diag = 1, 100");
      r.vector("diag", d);
      os.a = Matrix(d.asDiagonal());
    }
    dim = os.a.rows();
    os.b = Vector::Zero(dim);
    if (r.has("b")) {
      r.vector("b", os.b);
      if (os.b.size() != dim) r.error("b", "length does not match the matrix");
    }
    if (os.b.isZero() && !r.has("f_star")) os.f_star = 0.0;
  } else if (os.name == "rosenbrock") {
    r.number("a", os.rosen_a);
    r.number("rosen_b", os.rosen_b);
    if (!(os.rosen_b > 0)) r.error("rosen_b", "must be positive");
    if (!r.has("f_star")) os.f_star = 0.0;
  } else if (os.name == "erm") {
    if (auto p = r.text("dataset")) {
      os.dataset = *p;
    } else {
      r.error("dataset", "required for erm objectives");
    }
    if (auto m = r.text("model")) {
      if (*m == "linear") {
        os.model = Model::LinearRegression;
      } else if (*m == "logistic") {
        os.model = Model::LogisticRegression;
      } else if (*m == "softmax") {
        os.model = Model::Softmax;
      } else {
        r.error("model", "expected linear, logistic or softmax");
      }
    } else {
      note("objective.model = linear");
    }
    static const std::map<std::string, LossKind> losses{{"mse", LossKind::Mse},
                                                        {"mae", LossKind::Mae},
                                                        {"msle", LossKind::Msle},
                                                        {"bce", LossKind::Bce},
                                                        {"cce", LossKind::Cce}};
    if (auto l = r.text("loss")) {
      if (auto it = losses.find(*l); it != losses.end()) {
        os.loss = it->second;
      } else {
        r.error("loss", "expected mse, mae, msle, bce or cce");
      }
    } else {
      os.loss = os.model == Model::LogisticRegression ? LossKind::Bce
                : os.model == Model::Softmax           ? LossKind::Cce
                                                       : LossKind::Mse;
      note(std::string("objective.loss = ") + to_string(os.loss));
    }
    r.number("lambda", os.lambda);
    if (!(os.lambda >= 0)) r.error("lambda", "must be >= 0");
    r.flag("intercept", os.intercept);
    dim = 0;  // known after loading the dataset
  }
  if (r.has("f_star")) {
    double f = 0;
    r.number("f_star", f);
    os.f_star = f;
  }
  if (r.has("x0")) {
    r.vector("x0", os.x0);
    if (dim > 0 && os.x0.size() != dim) r.error("x0", detail::concat("expected ", dim, " entries"));
  } else if (dim > 0) {
    if (os.name == "rosenbrock") {
      os.x0 = Vector{{-1.2, 1.0}};
      note("objective.x0 = -1.2, 1");
    } else if (os.name == "hyperbolic" || os.name == "monkey") {
      os.x0 = Vector{{1e-3, 0.0}};
      note("objective.x0 = 0.001, 0");
    } else {
      os.x0 = Vector::Ones(dim);
      note("objective.x0 = ones");
    }
  }

  // [optimizer]
  const pt::ptree* opt = section("optimizer");
  if (!opt) errors.push_back("missing section [optimizer]");
  r.set_section("optimizer", opt);
  auto& op = cfg.optimizer;
  if (auto name = r.text("name")) {
    if (auto a = parse_algorithm(*name)) {
      op.algorithm = *a;
    } else {
      r.error("name", "unknown optimizer '" + *name + "'");
    }
  } else if (opt) {
    r.error("name", "required");
  }
  op.hp = HyperParams::defaults(op.algorithm);
  struct Field {
    const char* key;
    double* target;
  };
  const Field fields[] = {{"eta", &op.hp.eta},       {"beta", &op.hp.beta},
                          {"beta1", &op.hp.beta1},   {"beta2", &op.hp.beta2},
                          {"rho", &op.hp.rho},       {"epsilon", &op.hp.epsilon},
                          {"lambda_decay", &op.hp.lambda_decay}, {"lambda_l2", &op.hp.lambda_l2},
                          {"p", &op.hp.p}};
  for (const auto& f : fields) {
    if (r.has(f.key)) {
      r.number(f.key, *f.target);
    } else {
      note(detail::concat("optimizer.", f.key, " = ", *f.target));
    }
  }
  if (r.has("optimal_momentum")) {
    Vector mm;
    r.vector("optimal_momentum", mm);
    if (mm.size() != 2) {
      r.error("optimal_momentum", "expected 'm, M'");
    } else {
      try {
        const auto p = optimal_momentum_params(mm[0], mm[1]);
        op.hp.eta = p.eta;
        op.hp.beta = p.beta;
      } catch (const ValidationError& e) {
        r.error("optimal_momentum", e.what());
      }
    }
  }
  if (r.has("delta")) {
    double delta = 1;
    r.number("delta", delta);
    if (!(delta > 0)) {
      r.error("delta", "must be positive");
    } else {
      op.hp.delta_schedule = [delta](std::size_t) { return delta; };
    }
  }
  for (auto& v : op.hp.violations(op.algorithm)) errors.push_back("[optimizer] " + v);
  if (r.has("box_lower") || r.has("box_upper")) {
    const Eigen::Index n = os.x0.size();
    FeasibleBox box = FeasibleBox::unbounded(n);
    r.vector("box_lower", box.lower);
    r.vector("box_upper", box.upper);
    if (n > 0 && (box.lower.size() != n || box.upper.size() != n)) {
      r.error("box_lower", "box bounds must match the parameter dimension");
    } else if ((box.lower.array() > box.upper.array()).any()) {
      r.error("box_lower", "lower bound exceeds upper bound");
    }
    op.box = box;
  }
  if (auto g = r.text("gradient")) {
    if (*g == "full") {
      op.gradient = GradientMode::Full;
    } else if (*g == "minibatch") {
      op.gradient = GradientMode::Minibatch;
    } else if (*g == "stochastic") {
      op.gradient = GradientMode::Stochastic;
    } else {
      r.error("gradient", "expected full, minibatch or stochastic");
    }
  }
  r.count("batch_size", op.batch_size);
  if (op.gradient != GradientMode::Full && os.name != "erm") {
    r.error("gradient", "sampled gradients need an erm objective");
  }
  if (op.gradient == GradientMode::Minibatch && op.batch_size < 1) r.error("batch_size", "must be >= 1");
  r.flag("line_search", op.line_search);
  r.number("ls_alpha", op.ls.alpha);
  r.number("ls_beta", op.ls.beta);
  r.number("ls_eta_init", op.ls.eta_init);
  if (!(op.ls.alpha > 0 && op.ls.alpha < 0.5)) r.error("ls_alpha", "must lie in (0, 0.5)");
  if (!(op.ls.beta > 0 && op.ls.beta < 1)) r.error("ls_beta", "must lie in (0, 1)");
  if (!(op.ls.eta_init > 0)) r.error("ls_eta_init", "must be positive");
  if (op.line_search && (op.algorithm != Algorithm::Gd || op.gradient != GradientMode::Full)) {
    r.error("line_search", "backtracking is available for gd with full gradients only");
  }
  r.number("noise_sigma", op.noise_sigma);
  if (!(op.noise_sigma >= 0)) r.error("noise_sigma", "must be >= 0");

  // [run]
  r.set_section("run", section("run"));
  r.count("max_steps", cfg.run.max_steps);
  r.number("grad_tol", cfg.run.grad_tol);
  if (!(cfg.run.grad_tol >= 0)) r.error("grad_tol", "must be >= 0");
  if (r.has("f_tol")) {
    double f = 0;
    r.number("f_tol", f);
    cfg.run.f_tol = f;
    if (!os.f_star) r.error("f_tol", "needs objective.f_star");
  }
  r.seed("seed", cfg.run.seed);

  // [output]
  r.set_section("output", section("output"));
  if (auto t = r.text("trace")) cfg.output.trace = *t;
  r.count("log_every", cfg.output.log_every);
  if (cfg.output.log_every < 1) r.error("log_every", "must be >= 1");
  r.count("dump_every", cfg.output.dump_every);
  r.flag("timing", cfg.output.timing);

  // [spl]
  r.set_section("spl", section("spl"));
  r.number("c", cfg.spl.c);
  r.number("k", cfg.spl.k);
  r.number("anneal", cfg.spl.anneal);
  r.count("rounds", cfg.spl.rounds);
  r.count("inner_steps", cfg.spl.inner_steps);
  if (!(cfg.spl.c > 0)) r.error("c", "must be positive");
  if (!(cfg.spl.k > 0)) r.error("k", "must be positive");
  if (!(cfg.spl.anneal > 1)) r.error("anneal", "must exceed 1");

  if (!errors.empty()) {
    std::string msg = source + ": invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ValidationError(msg);
  }
  return cfg;
}

inline ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  return parse_config_stream(in, path);
}

}  // namespace descent::harness

#endif  // DESCENT_HARNESS_CONFIG_HPP
