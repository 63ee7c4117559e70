// Independent reference implementations used only by tests. These stay
// deliberately naive (closed forms and double loops) so they cannot share
// a failure mode with the library code they check.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Ordinary least squares through the normal equations.
inline Eigen::VectorXd ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  return (X.transpose() * X).ldlt().solve(X.transpose() * y);
}

/// Logistic regression by iteratively reweighted least squares
/// (Newton-Raphson). Returns the coefficients after `iters` steps.
inline Eigen::VectorXd irls_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                     int iters = 100) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(X.cols());
  for (int it = 0; it < iters; ++it) {
    const Eigen::VectorXd z = X * theta;
    Eigen::VectorXd p(z.size()), w(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      p(i) = 1.0 / (1.0 + std::exp(-z(i)));
      w(i) = std::max(p(i) * (1.0 - p(i)), 1e-12);
    }
    const Eigen::MatrixXd H = X.transpose() * w.asDiagonal() * X;
    const Eigen::VectorXd g = X.transpose() * (y - p);
    const Eigen::VectorXd step = H.ldlt().solve(g);
    theta += step;
    if (step.cwiseAbs().maxCoeff() < 1e-12) break;
  }
  return theta;
}

/// Central finite-difference gradient of a scalar function of a matrix.
inline Eigen::MatrixXd fd_gradient(
    const std::function<double(const Eigen::MatrixXd&)>& f, const Eigen::MatrixXd& at,
    double h = 1e-7) {
  Eigen::MatrixXd grad(at.rows(), at.cols());
  Eigen::MatrixXd x = at;
  for (Eigen::Index i = 0; i < at.rows(); ++i)
    for (Eigen::Index j = 0; j < at.cols(); ++j) {
      x(i, j) = at(i, j) + h;
      const double up = f(x);
      x(i, j) = at(i, j) - h;
      const double down = f(x);
      x(i, j) = at(i, j);
      grad(i, j) = (up - down) / (2.0 * h);
    }
  return grad;
}

// ---- metric loop oracles over (years x pixels) matrices ----

inline double mae_loop(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& obs) {
  double s = 0.0;
  for (Eigen::Index t = 0; t < pred.rows(); ++t)
    for (Eigen::Index i = 0; i < pred.cols(); ++i) s += std::fabs(pred(t, i) - obs(t, i));
  return s / (pred.rows() * pred.cols());
}

inline std::vector<double> bias_spatial_loop(const Eigen::MatrixXd& pred,
                                             const Eigen::MatrixXd& obs) {
  std::vector<double> out(pred.rows(), 0.0);
  for (Eigen::Index t = 0; t < pred.rows(); ++t) {
    for (Eigen::Index i = 0; i < pred.cols(); ++i) out[t] += pred(t, i) - obs(t, i);
    out[t] /= pred.cols();
  }
  return out;
}

inline std::vector<double> bias_temporal_loop(const Eigen::MatrixXd& pred,
                                              const Eigen::MatrixXd& obs) {
  std::vector<double> out(pred.cols(), 0.0);
  for (Eigen::Index i = 0; i < pred.cols(); ++i) {
    for (Eigen::Index t = 0; t < pred.rows(); ++t) out[i] += pred(t, i) - obs(t, i);
    out[i] /= pred.rows();
  }
  return out;
}

inline double rmse_spatial_first_loop(const Eigen::MatrixXd& pred,
                                      const Eigen::MatrixXd& obs) {
  double acc = 0.0;
  for (Eigen::Index t = 0; t < pred.rows(); ++t) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < pred.cols(); ++i) {
      const double d = pred(t, i) - obs(t, i);
      s += d * d;
    }
    acc += std::sqrt(s / pred.cols());
  }
  return acc / pred.rows();
}

inline double rmse_temporal_first_loop(const Eigen::MatrixXd& pred,
                                       const Eigen::MatrixXd& obs) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < pred.cols(); ++i) {
    double s = 0.0;
    for (Eigen::Index t = 0; t < pred.rows(); ++t) {
      const double d = pred(t, i) - obs(t, i);
      s += d * d;
    }
    acc += std::sqrt(s / pred.rows());
  }
  return acc / pred.cols();
}

inline double pearson_loop(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Pair-counting AUC: the fraction of (positive, negative) pairs ranked
/// correctly, ties worth 1/2.
inline double auc_pairs_loop(const std::vector<double>& probs,
                             const std::vector<int>& labels) {
  double wins = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < probs.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (probs[i] > probs[j]) wins += 1.0;
      else if (probs[i] == probs[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

}  // namespace oracle
