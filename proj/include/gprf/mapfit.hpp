#pragma once

#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gprf/common.hpp"
#include "gprf/full_gp.hpp"
#include "gprf/objective.hpp"

namespace gprf {

// Independent Gaussian prior on latent locations, centered at the observed
// (noisy) positions with per-coordinate standard deviations.
struct LocationPrior {
  Matrix X_obs;
  Vector sigma_obs;

  void validate(Index n, Index d) const {
    if (X_obs.rows() != n || X_obs.cols() != d)
      throw ValidationError("location prior: X_obs shape mismatch");
    if (sigma_obs.size() != d)
      throw ValidationError("location prior: sigma_obs must have one entry per coordinate");
    for (Index c = 0; c < d; ++c)
      if (!(sigma_obs(c) > 0.0))
        throw ValidationError("location prior: sigma_obs must be > 0");
  }
};

struct FitConfig {
  bool optimize_X = true;
  bool optimize_theta = false;  // all hyperparameters, in log space
  int max_iters = 200;
  double grad_tol = 1e-5;       // infinity norm of the packed gradient
  double wall_clock_budget_s = std::numeric_limits<double>::infinity();
  int trajectory_stride = 1;
  int workers = 1;
  // Map the last coordinate through softplus so it stays nonnegative
  // (event depths).
  bool depth_softplus = false;
  // Record objective-evaluation counts instead of seconds in the
  // trajectory, for bit-reproducible outputs. Budgets still use real time.
  bool deterministic_clock = false;
  // Trajectory timestamps count from here (e.g. process start); the wall
  // budget always counts from fit entry. Unset means fit entry.
  std::optional<std::chrono::steady_clock::time_point> clock_epoch;
  int lbfgs_memory = 10;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
};

struct TrajectoryRecord {
  int step = 0;
  double wall_time_s = 0.0;
  double objective = 0.0;
  double grad_norm = 0.0;
  // NaN when the true locations are unknown.
  double mean_location_error = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
};

struct FitResult {
  Matrix X_hat;
  Hyperparams theta_hat;
  Trajectory trajectory;
  int iterations = 0;
  double final_objective = 0.0;
  double final_grad_norm = 0.0;
  bool converged = false;
  bool budget_exhausted = false;
  std::string stop_reason;
};

inline double mean_location_error(const Matrix& X_hat, const Matrix& X_true) {
  if (X_hat.rows() != X_true.rows() || X_hat.cols() != X_true.cols())
    throw ValidationError("mean_location_error: shape mismatch");
  double total = 0.0;
  for (Index i = 0; i < X_hat.rows(); ++i)
    total += (X_hat.row(i) - X_true.row(i)).norm();
  return total / static_cast<double>(X_hat.rows());
}

// log N(X_obs | X, diag(sigma^2)) and its gradient w.r.t. X, added in place.
inline double add_location_prior(const Matrix& X, const LocationPrior& prior,
                                 Matrix* grad_X) {
  double value = 0.0;
  for (Index c = 0; c < X.cols(); ++c) {
    const double sigma = prior.sigma_obs(c);
    const double inv_var = 1.0 / (sigma * sigma);
    for (Index i = 0; i < X.rows(); ++i) {
      const double r = X(i, c) - prior.X_obs(i, c);
      value += -0.5 * r * r * inv_var - std::log(sigma) - 0.5 * kLogTwoPi;
      if (grad_X) (*grad_X)(i, c) += -r * inv_var;
    }
  }
  return value;
}

// Objective evaluated at a candidate (X, kernel-with-updated-hyperparams).
using ModelObjective =
    std::function<ObjectiveReport(const Matrix& X, const KernelSpec& spec)>;

struct FitProblem {
  ModelObjective objective;
  KernelSpec kernel;
  Matrix X0;
  LocationPrior prior;
  const Matrix* X_true = nullptr;  // optional, for trajectory error tracking
};

inline ModelObjective make_gprf_objective(Partition partition, EdgeSet edges,
                                          Matrix Y, int workers) {
  return [partition = std::move(partition), edges = std::move(edges),
          Y = std::move(Y), workers](const Matrix& X, const KernelSpec& spec) {
    GprfModel model{spec, partition, edges, X, Y};
    return gprf_gradient(model, workers);
  };
}

inline ModelObjective make_full_gp_objective(Matrix Y) {
  return [Y = std::move(Y)](const Matrix& X, const KernelSpec& spec) {
    return full_gradient(make_full_gp(spec, X, Y));
  };
}

// MAP objective: surrogate log-likelihood plus location prior.
inline ObjectiveReport map_objective(const GprfModel& model,
                                     const LocationPrior& prior,
                                     int workers = 1) {
  prior.validate(model.X.rows(), model.X.cols());
  ObjectiveReport report = gprf_gradient(model, workers);
  report.value += add_location_prior(model.X, prior, &report.grad_X);
  return report;
}

namespace detail {

inline double softplus(double v) {
  return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
}
inline double softplus_inverse(double x) {
  const double clamped = std::max(x, 1e-8);
  // log(e^x - 1), stable form
  return clamped + std::log1p(-std::exp(-clamped));
}
inline double sigmoid(double v) {
  return v > 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
}

// Flattens the active optimization variables: X row-major first (last
// coordinate optionally through softplus), then log hyperparameters.
class VariablePacker {
 public:
  VariablePacker(const FitConfig& config, Index n, Index d, int num_hypers)
      : opt_x_(config.optimize_X), opt_theta_(config.optimize_theta),
        softplus_last_(config.depth_softplus), n_(n), d_(d), H_(num_hypers) {
    if (!opt_x_ && !opt_theta_)
      throw ValidationError("fit: nothing to optimize (both flags off)");
  }

  Index size() const { return (opt_x_ ? n_ * d_ : 0) + (opt_theta_ ? H_ : 0); }

  Vector pack(const Matrix& X, const Hyperparams& hp) const {
    Vector v(size());
    Index k = 0;
    if (opt_x_) {
      for (Index i = 0; i < n_; ++i)
        for (Index c = 0; c < d_; ++c) {
          const double x = X(i, c);
          v(k++) = (softplus_last_ && c == d_ - 1) ? softplus_inverse(x) : x;
        }
    }
    if (opt_theta_) {
      v(k++) = std::log(hp.signal_variance);
      for (double l : hp.lengthscales) v(k++) = std::log(l);
      if (!(hp.noise_variance > 0.0))
        throw ValidationError("fit: optimizing theta requires noise_variance > 0");
      v(k++) = std::log(hp.noise_variance);
    }
    return v;
  }

  void unpack(const Vector& v, Matrix& X, Hyperparams& hp) const {
    Index k = 0;
    if (opt_x_) {
      for (Index i = 0; i < n_; ++i)
        for (Index c = 0; c < d_; ++c) {
          const double raw = v(k++);
          X(i, c) = (softplus_last_ && c == d_ - 1) ? softplus(raw) : raw;
        }
    }
    if (opt_theta_) {
      hp.signal_variance = std::exp(v(k++));
      for (double& l : hp.lengthscales) l = std::exp(v(k++));
      hp.noise_variance = std::exp(v(k++));
    }
  }

  // grad_X is w.r.t. real coordinates, grad_theta already w.r.t. logs.
  Vector pack_gradient(const Vector& v, const Matrix& grad_X,
                       const Vector& grad_theta) const {
    Vector g(size());
    Index k = 0;
    if (opt_x_) {
      for (Index i = 0; i < n_; ++i)
        for (Index c = 0; c < d_; ++c) {
          double gx = grad_X(i, c);
          if (softplus_last_ && c == d_ - 1) gx *= sigmoid(v(k));
          g(k++) = gx;
        }
    }
    if (opt_theta_)
      for (Index h = 0; h < H_; ++h) g(k++) = grad_theta(h);
    return g;
  }

 private:
  bool opt_x_, opt_theta_, softplus_last_;
  Index n_, d_;
  int H_;
};

struct EvalPoint {
  bool ok = false;
  double value = -std::numeric_limits<double>::infinity();  // ascent objective
  Vector grad;  // packed ascent gradient
};

}  // namespace detail

// L-BFGS ascent on the MAP objective with a strong-Wolfe cubic line search.
// Stops on gradient tolerance, iteration cap, or wall-clock budget. Objective
// evaluation failures back the line search off; five consecutive failures
// abort with the last good iterate.
inline FitResult fit(const FitProblem& problem, const FitConfig& config) {
  const Index n = problem.X0.rows();
  const Index d = problem.X0.cols();
  problem.prior.validate(n, d);
  const int H = problem.kernel.hyperparams.count();
  detail::VariablePacker packer(config, n, d, H);

  const auto t_start = std::chrono::steady_clock::now();
  const auto t_epoch = config.clock_epoch.value_or(t_start);
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start).count();
  };
  auto epoch_time = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_epoch).count();
  };

  Matrix X = problem.X0;
  Hyperparams hp = problem.kernel.hyperparams;
  long eval_count = 0;
  int consecutive_failures = 0;
  bool aborted_on_failures = false;

  auto evaluate = [&](const Vector& v) {
    detail::EvalPoint p;
    packer.unpack(v, X, hp);
    KernelSpec spec = problem.kernel;
    spec.hyperparams = hp;
    ++eval_count;
    try {
      ObjectiveReport report = problem.objective(X, spec);
      report.value += add_location_prior(X, problem.prior, &report.grad_X);
      if (!std::isfinite(report.value)) throw NumericalError("non-finite objective");
      p.ok = true;
      p.value = report.value;
      p.grad = packer.pack_gradient(v, report.grad_X, report.grad_theta);
      consecutive_failures = 0;
    } catch (const NumericalError&) {
      ++consecutive_failures;
      if (consecutive_failures >= 5) aborted_on_failures = true;
    }
    return p;
  };

  FitResult result;
  result.theta_hat = hp;

  Vector v = packer.pack(X, hp);
  detail::EvalPoint current = evaluate(v);
  if (!current.ok)
    throw NumericalError("fit: objective evaluation failed at the initial point");

  auto record = [&](int step) {
    TrajectoryRecord rec;
    rec.step = step;
    rec.wall_time_s =
        config.deterministic_clock ? static_cast<double>(eval_count) : epoch_time();
    rec.objective = current.value;
    rec.grad_norm = current.grad.cwiseAbs().maxCoeff();
    if (problem.X_true) {
      packer.unpack(v, X, hp);
      rec.mean_location_error = mean_location_error(X, *problem.X_true);
    }
    result.trajectory.records.push_back(rec);
  };
  record(0);

  // L-BFGS history
  std::deque<std::pair<Vector, Vector>> history;  // (s, y)
  const double c1 = config.wolfe_c1, c2 = config.wolfe_c2;

  auto two_loop = [&](const Vector& g) {
    Vector q = -g;  // descent on -objective == ascent direction
    std::vector<double> alpha(history.size());
    for (int k = static_cast<int>(history.size()) - 1; k >= 0; --k) {
      const auto& [s, y] = history[static_cast<size_t>(k)];
      const double rho = 1.0 / y.dot(s);
      alpha[static_cast<size_t>(k)] = rho * s.dot(q);
      q -= alpha[static_cast<size_t>(k)] * y;
    }
    if (!history.empty()) {
      const auto& [s, y] = history.back();
      q *= s.dot(y) / y.dot(y);
    }
    for (size_t k = 0; k < history.size(); ++k) {
      const auto& [s, y] = history[k];
      const double rho = 1.0 / y.dot(s);
      const double beta = rho * y.dot(q);
      q += (alpha[k] - beta) * s;
    }
    return q;
  };

  int iter = 0;
  for (; iter < config.max_iters; ++iter) {
    const double gnorm = current.grad.cwiseAbs().maxCoeff();
    if (gnorm <= config.grad_tol) {
      result.converged = true;
      result.stop_reason = "gradient tolerance reached";
      break;
    }
    if (elapsed() > config.wall_clock_budget_s) {
      result.budget_exhausted = true;
      result.stop_reason = "wall-clock budget exhausted";
      break;
    }

    // Internally we minimize F = -value; phi(a) = F(v + a p).
    Vector dir = two_loop(current.grad);
    double dphi0 = -current.grad.dot(dir);
    if (!(dphi0 < 0.0)) {  // not a descent direction; reset
      history.clear();
      dir = current.grad;
      dphi0 = -current.grad.dot(dir);
    }
    const double phi0 = -current.value;

    // Strong-Wolfe search: bracket by doubling, then zoom with bisection.
    double alpha_prev = 0.0, phi_prev = phi0;
    double alpha = history.empty()
                       ? std::min(1.0, 1.0 / std::max(1.0, gnorm))
                       : 1.0;
    detail::EvalPoint best;     // accepted point
    double best_alpha = 0.0;
    bool accepted = false;

    auto try_alpha = [&](double a, detail::EvalPoint& p) {
      p = evaluate(v + a * dir);
      return p.ok;
    };

    double zoom_lo = -1.0, zoom_hi = -1.0, phi_lo = 0.0;
    for (int ls = 0; ls < 20 && !aborted_on_failures; ++ls) {
      detail::EvalPoint trial;
      const bool ok = try_alpha(alpha, trial);
      const double phi = ok ? -trial.value : std::numeric_limits<double>::infinity();
      if (!ok || phi > phi0 + c1 * alpha * dphi0 || (ls > 0 && phi >= phi_prev)) {
        zoom_lo = alpha_prev;
        phi_lo = phi_prev;
        zoom_hi = alpha;
        break;
      }
      const double dphi = -trial.grad.dot(dir);
      if (std::abs(dphi) <= -c2 * dphi0) {
        best = trial;
        best_alpha = alpha;
        accepted = true;
        break;
      }
      if (dphi >= 0.0) {
        zoom_lo = alpha;
        phi_lo = phi;
        zoom_hi = alpha_prev;
        break;
      }
      alpha_prev = alpha;
      phi_prev = phi;
      alpha *= 2.0;
    }

    if (!accepted && !aborted_on_failures && zoom_hi >= 0.0) {
      for (int z = 0; z < 30 && !aborted_on_failures; ++z) {
        const double a = 0.5 * (zoom_lo + zoom_hi);
        detail::EvalPoint trial;
        const bool ok = try_alpha(a, trial);
        const double phi = ok ? -trial.value : std::numeric_limits<double>::infinity();
        if (!ok || phi > phi0 + c1 * a * dphi0 || phi >= phi_lo) {
          zoom_hi = a;
        } else {
          const double dphi = -trial.grad.dot(dir);
          if (std::abs(dphi) <= -c2 * dphi0) {
            best = trial;
            best_alpha = a;
            accepted = true;
            break;
          }
          if (dphi * (zoom_hi - zoom_lo) >= 0.0) zoom_hi = zoom_lo;
          zoom_lo = a;
          phi_lo = phi;
          if (trial.value > current.value) {  // keep strict-ascent fallback
            best = trial;
            best_alpha = a;
          }
        }
        if (std::abs(zoom_hi - zoom_lo) < 1e-14 * std::max(1.0, std::abs(zoom_lo))) break;
      }
      // Fall back to any strictly improving point found during zoom.
      if (!accepted && best_alpha > 0.0 && best.ok && best.value > current.value)
        accepted = true;
    }

    if (aborted_on_failures) {
      result.stop_reason = "aborted after repeated objective evaluation failures";
      break;
    }
    if (!accepted) {
      result.stop_reason = "line search found no acceptable step";
      break;
    }

    const Vector v_new = v + best_alpha * dir;
    const Vector s = v_new - v;
    const Vector yv = best.grad - current.grad;  // ascent-gradient difference
    // For minimizing F = -value, y_F = -(yv); curvature s.y_F > 0 <=> s.yv < 0.
    const Vector y_F = -yv;
    if (s.dot(y_F) > 1e-12 * s.norm() * y_F.norm()) {
      history.emplace_back(s, y_F);
      if (static_cast<int>(history.size()) > config.lbfgs_memory)
        history.pop_front();
    }
    v = v_new;
    current = best;

    if ((iter + 1) % config.trajectory_stride == 0) record(iter + 1);
  }

  if (result.stop_reason.empty())
    result.stop_reason = iter >= config.max_iters ? "iteration cap reached"
                                                  : "stopped";
  if (result.trajectory.records.empty() ||
      result.trajectory.records.back().step != iter)
    record(iter);

  packer.unpack(v, X, hp);
  result.X_hat = X;
  result.theta_hat = hp;
  result.iterations = iter;
  result.final_objective = current.value;
  result.final_grad_norm = current.grad.cwiseAbs().maxCoeff();
  return result;
}

inline FitResult fit(const GprfModel& model, const LocationPrior& prior,
                     const FitConfig& config, const Matrix* X_true = nullptr) {
  validate_model(model);
  FitProblem problem;
  problem.objective = make_gprf_objective(model.partition, model.edges, model.Y,
                                          config.workers);
  problem.kernel = model.kernel;
  problem.X0 = model.X;
  problem.prior = prior;
  problem.X_true = X_true;
  return fit(problem, config);
}

inline FitResult fit_full_gp(const KernelSpec& kernel, const Matrix& X0,
                             const Matrix& Y, const LocationPrior& prior,
                             const FitConfig& config,
                             const Matrix* X_true = nullptr) {
  FitProblem problem;
  problem.objective = make_full_gp_objective(Y);
  problem.kernel = kernel;
  problem.X0 = X0;
  problem.prior = prior;
  problem.X_true = X_true;
  return fit(problem, config);
}

}  // namespace gprf
