#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wam/adam.hpp"
#include "wam/errors.hpp"
#include "wam/grid.hpp"
#include "wam/rng.hpp"

namespace wam {

// One joint multi-pixel fitting problem: a design matrix per pixel over a
// shared sample (year) axis. Designs carry their intercept column
// explicitly, so coefficient row i is [intercept, slopes...] for pixel i.
// A zero weight drops that (pixel, sample) from the data term only; TV
// regularization always sees all predictions.
struct JointDesign {
  std::vector<Eigen::MatrixXd> X;  // per pixel: n_samples x n_coeffs
  Eigen::MatrixXd y;               // n_pixels x n_samples
  Eigen::MatrixXd weight;          // n_pixels x n_samples, entries in {0, 1}

  Eigen::Index n_pixels() const { return y.rows(); }
  Eigen::Index n_samples() const { return y.cols(); }
  Eigen::Index n_coeffs() const { return X.empty() ? 0 : X.front().cols(); }

  static JointDesign make(std::vector<Eigen::MatrixXd> X, Eigen::MatrixXd y) {
    JointDesign d;
    d.weight = Eigen::MatrixXd::Ones(y.rows(), y.cols());
    d.X = std::move(X);
    d.y = std::move(y);
    return d;
  }

  void validate() const {
    if (static_cast<Eigen::Index>(X.size()) != y.rows())
      throw NumericError("JointDesign: one design per pixel required");
    for (const auto& Xi : X)
      if (Xi.rows() != y.cols() || Xi.cols() != n_coeffs())
        throw NumericError("JointDesign: design shape mismatch");
    if (weight.rows() != y.rows() || weight.cols() != y.cols())
      throw NumericError("JointDesign: weight shape mismatch");
  }
};

namespace detail {

/// Predictions for all pixels: row i = X[i] * coeffs.row(i).
inline Eigen::MatrixXd predictions(const JointDesign& d, const Eigen::MatrixXd& coeffs) {
  Eigen::MatrixXd pred(d.n_pixels(), d.n_samples());
  for (Eigen::Index i = 0; i < d.n_pixels(); ++i)
    pred.row(i) = (d.X[i] * coeffs.row(i).transpose()).transpose();
  return pred;
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) rearranged so large |z| cannot overflow
inline double bce_term(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::fabs(z)));
}

inline void check_shapes(const JointDesign& d, const Eigen::MatrixXd& coeffs) {
  d.validate();
  if (coeffs.rows() != d.n_pixels() || coeffs.cols() != d.n_coeffs())
    throw NumericError("coefficient matrix shape mismatch");
}

}  // namespace detail

/// Joint onset objective: mean over pixels of the per-pixel weighted MSE,
/// plus lambda times the total absolute difference between neighboring
/// pixels' predictions, summed over samples.
inline double onset_loss(const JointDesign& d, const Eigen::MatrixXd& coeffs,
                         const Adjacency& adj, double lambda) {
  detail::check_shapes(d, coeffs);
  const Eigen::MatrixXd pred = detail::predictions(d, coeffs);
  double mse = 0.0;
  for (Eigen::Index i = 0; i < d.n_pixels(); ++i) {
    const double b = d.weight.row(i).sum();
    if (b == 0.0) continue;
    double s = 0.0;
    for (Eigen::Index t = 0; t < d.n_samples(); ++t) {
      const double r = pred(i, t) - d.y(i, t);
      s += d.weight(i, t) * r * r;
    }
    mse += s / b;
  }
  mse /= static_cast<double>(d.n_pixels());
  double tv = 0.0;
  for (const auto& [i, j] : adj.pairs)
    for (Eigen::Index t = 0; t < d.n_samples(); ++t)
      tv += std::fabs(pred(i, t) - pred(j, t));
  return mse + lambda * tv;
}

/// Analytic gradient of onset_loss w.r.t. every coefficient. The TV term
/// uses the sign subgradient with sign(0) = 0.
inline Eigen::MatrixXd onset_grad(const JointDesign& d, const Eigen::MatrixXd& coeffs,
                                  const Adjacency& adj, double lambda) {
  detail::check_shapes(d, coeffs);
  const Eigen::MatrixXd pred = detail::predictions(d, coeffs);
  Eigen::MatrixXd dpred(d.n_pixels(), d.n_samples());
  for (Eigen::Index i = 0; i < d.n_pixels(); ++i) {
    const double b = d.weight.row(i).sum();
    for (Eigen::Index t = 0; t < d.n_samples(); ++t)
      dpred(i, t) = b == 0.0 ? 0.0
                             : 2.0 * d.weight(i, t) * (pred(i, t) - d.y(i, t)) /
                                   (b * static_cast<double>(d.n_pixels()));
  }
  if (lambda != 0.0) {
    for (const auto& [i, j] : adj.pairs) {
      for (Eigen::Index t = 0; t < d.n_samples(); ++t) {
        const double diff = pred(i, t) - pred(j, t);
        const double s = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
        dpred(i, t) += lambda * s;
        dpred(j, t) -= lambda * s;
      }
    }
  }
  Eigen::MatrixXd grad(d.n_pixels(), d.n_coeffs());
  for (Eigen::Index i = 0; i < d.n_pixels(); ++i)
    grad.row(i) = (d.X[i].transpose() * dpred.row(i).transpose()).transpose();
  return grad;
}

/// Joint dry-spell objective: mean over pixels of the per-pixel weighted
/// binary cross entropy, plus lambda times the squared difference between
/// neighboring pixels' coefficient vectors.
inline double dryspell_loss(const JointDesign& d, const Eigen::MatrixXd& thetas,
                            const Adjacency& adj, double lambda) {
  detail::check_shapes(d, thetas);
  for (Eigen::Index i = 0; i < d.n_pixels(); ++i)
    for (Eigen::Index t = 0; t < d.n_samples(); ++t)
      if (d.y(i, t) != 0.0 && d.y(i, t) != 1.0)
        throw NumericError("dryspell_loss: label outside {0,1}");
  const Eigen::MatrixXd z = detail::predictions(d, thetas);
  double bce = 0.0;
  for (Eigen::Index i = 0; i < d.n_pixels(); ++i) {
    const double b = d.weight.row(i).sum();
    if (b == 0.0) continue;
    double s = 0.0;
    for (Eigen::Index t = 0; t < d.n_samples(); ++t)
      s += d.weight(i, t) * detail::bce_term(z(i, t), d.y(i, t));
    bce += s / b;
  }
  bce /= static_cast<double>(d.n_pixels());
  double tv = 0.0;
  for (const auto& [i, j] : adj.pairs)
    tv += (thetas.row(i) - thetas.row(j)).squaredNorm();
  return bce + lambda * tv;
}

/// Analytic gradient of dryspell_loss (smooth everywhere).
inline Eigen::MatrixXd dryspell_grad(const JointDesign& d, const Eigen::MatrixXd& thetas,
                                     const Adjacency& adj, double lambda) {
  detail::check_shapes(d, thetas);
  const Eigen::MatrixXd z = detail::predictions(d, thetas);
  Eigen::MatrixXd dz(d.n_pixels(), d.n_samples());
  for (Eigen::Index i = 0; i < d.n_pixels(); ++i) {
    const double b = d.weight.row(i).sum();
    for (Eigen::Index t = 0; t < d.n_samples(); ++t)
      dz(i, t) = b == 0.0 ? 0.0
                          : d.weight(i, t) * (detail::sigmoid(z(i, t)) - d.y(i, t)) /
                                (b * static_cast<double>(d.n_pixels()));
  }
  Eigen::MatrixXd grad(d.n_pixels(), d.n_coeffs());
  for (Eigen::Index i = 0; i < d.n_pixels(); ++i)
    grad.row(i) = (d.X[i].transpose() * dz.row(i).transpose()).transpose();
  if (lambda != 0.0) {
    for (const auto& [i, j] : adj.pairs) {
      grad.row(i) += 2.0 * lambda * (thetas.row(i) - thetas.row(j));
      grad.row(j) += 2.0 * lambda * (thetas.row(j) - thetas.row(i));
    }
  }
  return grad;
}

struct FitResult {
  Eigen::MatrixXd coeffs;            // n_pixels x n_coeffs
  std::vector<double> loss_history;  // full objective after each epoch
  int epochs_run = 0;
  bool converged = false;  // early-stopped on the step tolerance
  bool saturated = false;  // coefficients ran far out; separable-data warning
};

namespace detail {

template <typename LossFn, typename GradFn>
FitResult fit_adam(const JointDesign& d, const Adjacency& adj, double lambda,
                   const FitConfig& config, LossFn&& loss_fn, GradFn&& grad_fn) {
  config.validate();
  d.validate();
  const Eigen::Index n = d.n_samples();
  const int batch = config.batch_size <= 0
                        ? static_cast<int>(n)
                        : std::min<int>(config.batch_size, static_cast<int>(n));

  FitResult result;
  result.coeffs = Eigen::MatrixXd::Zero(d.n_pixels(), d.n_coeffs());
  result.loss_history.reserve(config.epochs);
  AdamOptimizer opt(d.n_pixels(), d.n_coeffs(), config);
  SplitMix64 rng = SplitMix64::substream(config.seed, /*tag=*/0x5f17u, 0);

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.lr_at(epoch);
    double max_step = 0.0;
    if (batch == static_cast<int>(n)) {
      max_step = opt.step(result.coeffs, grad_fn(d, result.coeffs, adj, lambda), lr);
    } else {
      rng.shuffle(order);
      for (Eigen::Index start = 0; start < n; start += batch) {
        const Eigen::Index len = std::min<Eigen::Index>(batch, n - start);
        JointDesign sub;
        sub.X.reserve(d.X.size());
        sub.y.resize(d.n_pixels(), len);
        sub.weight.resize(d.n_pixels(), len);
        for (Eigen::Index t = 0; t < len; ++t) {
          sub.y.col(t) = d.y.col(order[start + t]);
          sub.weight.col(t) = d.weight.col(order[start + t]);
        }
        for (const auto& Xi : d.X) {
          Eigen::MatrixXd Xs(len, d.n_coeffs());
          for (Eigen::Index t = 0; t < len; ++t) Xs.row(t) = Xi.row(order[start + t]);
          sub.X.push_back(std::move(Xs));
        }
        max_step = std::max(
            max_step, opt.step(result.coeffs, grad_fn(sub, result.coeffs, adj, lambda), lr));
      }
    }
    const double loss = loss_fn(d, result.coeffs, adj, lambda);
    if (!std::isfinite(loss))
      throw NumericError("fit diverged (non-finite loss) at epoch " +
                         std::to_string(epoch));
    result.loss_history.push_back(loss);
    result.epochs_run = epoch + 1;
    if (config.tolerance > 0.0 && max_step < config.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.saturated = result.coeffs.cwiseAbs().maxCoeff() > 30.0;
  return result;
}

}  // namespace detail

/// Fit the joint TV-regularized linear model with ADAM from zero
/// initialization. Deterministic for a fixed seed.
inline FitResult fit_onset_coeffs(const JointDesign& d, const Adjacency& adj,
                                  double lambda, const FitConfig& config = {}) {
  return detail::fit_adam(
      d, adj, lambda, config,
      [](const JointDesign& dd, const Eigen::MatrixXd& c, const Adjacency& a,
         double l) { return onset_loss(dd, c, a, l); },
      [](const JointDesign& dd, const Eigen::MatrixXd& c, const Adjacency& a,
         double l) { return onset_grad(dd, c, a, l); });
}

/// Fit the joint TV-regularized logistic model. Requires both classes among
/// the weighted training samples.
inline FitResult fit_dryspell_coeffs(const JointDesign& d, const Adjacency& adj,
                                     double lambda, const FitConfig& config = {}) {
  bool saw[2] = {false, false};
  for (Eigen::Index i = 0; i < d.n_pixels(); ++i)
    for (Eigen::Index t = 0; t < d.n_samples(); ++t) {
      if (d.weight(i, t) == 0.0) continue;
      if (d.y(i, t) != 0.0 && d.y(i, t) != 1.0)
        throw NumericError("fit_dryspell_coeffs: label outside {0,1}");
      saw[d.y(i, t) == 1.0 ? 1 : 0] = true;
    }
  if (!saw[0] || !saw[1])
    throw NumericError("fit_dryspell_coeffs: training data contains a single class");
  return detail::fit_adam(
      d, adj, lambda, config,
      [](const JointDesign& dd, const Eigen::MatrixXd& c, const Adjacency& a,
         double l) { return dryspell_loss(dd, c, a, l); },
      [](const JointDesign& dd, const Eigen::MatrixXd& c, const Adjacency& a,
         double l) { return dryspell_grad(dd, c, a, l); });
}

// Dry-spell proportion regressor: y_prop = beta0 + x . beta1.
struct ProportionModel {
  double beta0 = 0.0;
  Eigen::Vector2d beta1 = Eigen::Vector2d::Zero();

  double predict(const Eigen::Vector2d& x) const { return beta0 + beta1.dot(x); }
};

/// Exact OLS via the normal equations. Throws on rank deficiency.
inline ProportionModel fit_proportion(const Eigen::MatrixXd& X,
                                      const Eigen::VectorXd& y) {
  if (X.cols() != 2 || X.rows() != y.size())
    throw NumericError("fit_proportion: expected an n x 2 design");
  if (X.rows() < 3) throw NumericError("fit_proportion: need at least 3 years");
  Eigen::MatrixXd A(X.rows(), 3);
  A.col(0).setOnes();
  A.rightCols(2) = X;
  const Eigen::MatrixXd ata = A.transpose() * A;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ata);
  lu.setThreshold(1e-10);
  if (lu.rank() < 3)
    throw NumericError("fit_proportion: rank-deficient proportion design");
  const Eigen::Vector3d beta = lu.solve(A.transpose() * y);
  ProportionModel m;
  m.beta0 = beta(0);
  m.beta1 = beta.tail<2>();
  return m;
}

struct ThresholdResult {
  double threshold = 0.0;
  std::vector<int> labels;
  int positive_count = 0;
};

/// Adaptive classification cutoff: the order-statistic quantile of the
/// predicted probabilities at level 1 - p_hat. With k = floor((1-p_hat)*P),
/// the threshold is the (k+1)-th smallest probability and a pixel is
/// labeled 1 iff its probability >= threshold; k = P labels everything 0.
/// p_hat is clamped to [0, 1] first.
inline ThresholdResult adaptive_threshold(std::span<const double> probs, double p_hat) {
  const std::size_t n = probs.size();
  if (n == 0) throw NumericError("adaptive_threshold: empty probability set");
  const double p = std::clamp(p_hat, 0.0, 1.0);
  // the nudge keeps exact decimal proportions (e.g. 0.3 of 10) on the
  // intended side of floor despite binary representation error
  const auto k = static_cast<std::size_t>(
      std::floor((1.0 - p) * static_cast<double>(n) + 1e-9));
  ThresholdResult result;
  result.labels.assign(n, 0);
  if (k >= n) {
    result.threshold = std::numeric_limits<double>::infinity();
    return result;
  }
  std::vector<double> sorted(probs.begin(), probs.end());
  std::sort(sorted.begin(), sorted.end());
  result.threshold = sorted[k];
  for (std::size_t i = 0; i < n; ++i) {
    if (probs[i] >= result.threshold) {
      result.labels[i] = 1;
      ++result.positive_count;
    }
  }
  return result;
}

/// Deterministic argmin over a candidate grid; ties go to the smaller
/// value. `validation_metric` returns the score to minimize (e.g. the mean
/// inner-fold validation error).
inline double grid_search_lambda(std::span<const double> candidates,
                                 const std::function<double(double)>& validation_metric) {
  if (candidates.empty()) throw ParseError("grid_search_lambda: empty candidate list");
  std::vector<double> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  double best = sorted.front();
  double best_score = std::numeric_limits<double>::infinity();
  for (double lambda : sorted) {
    const double score = validation_metric(lambda);
    if (score < best_score) {
      best_score = score;
      best = lambda;
    }
  }
  return best;
}

}  // namespace wam
