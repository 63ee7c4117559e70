#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "wam/errors.hpp"

namespace wam {

// Training hyperparameters shared by the onset and dry-spell fits.
// batch_size 0 means full batch. With full batches the loop is fully
// deterministic; mini-batches are shuffled from the seed.
struct FitConfig {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int epochs = 2000;
  int batch_size = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;  // early stop when max |param step| over an epoch < tolerance
  bool cosine_decay = true;  // anneal the learning rate to 0 over the epoch budget

  void validate() const;

  double lr_at(int epoch) const {
    if (!cosine_decay || epochs <= 1) return learning_rate;
    const double frac = static_cast<double>(epoch) / (epochs - 1);
    return learning_rate * 0.5 * (1.0 + std::cos(frac * 3.14159265358979323846));
  }
};

inline void FitConfig::validate() const {
  if (!(learning_rate > 0.0) || epochs < 1 || batch_size < 0 ||
      !(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0) ||
      !(epsilon > 0.0) || tolerance < 0.0)
    throw NumericError("FitConfig: rates and counts must be positive");
}

// Plain ADAM with bias correction over a matrix of parameters.
class AdamOptimizer {
 public:
  AdamOptimizer(Eigen::Index rows, Eigen::Index cols, const FitConfig& config)
      : config_(config),
        m_(Eigen::MatrixXd::Zero(rows, cols)),
        v_(Eigen::MatrixXd::Zero(rows, cols)) {}

  /// One update in place; returns the largest absolute parameter step.
  double step(Eigen::MatrixXd& params, const Eigen::MatrixXd& grad, double lr) {
    ++t_;
    m_ = config_.beta1 * m_ + (1.0 - config_.beta1) * grad;
    v_ = config_.beta2 * v_ + (1.0 - config_.beta2) * grad.cwiseProduct(grad);
    const double m_corr = 1.0 - std::pow(config_.beta1, t_);
    const double v_corr = 1.0 - std::pow(config_.beta2, t_);
    const Eigen::MatrixXd delta =
        (lr / m_corr) *
        m_.cwiseQuotient(((v_ / v_corr).cwiseSqrt().array() + config_.epsilon).matrix());
    params -= delta;
    return delta.cwiseAbs().maxCoeff();
  }

 private:
  FitConfig config_;
  Eigen::MatrixXd m_;
  Eigen::MatrixXd v_;
  long t_ = 0;
};

}  // namespace wam
