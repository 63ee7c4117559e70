#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wam/errors.hpp"
#include "wam/stats.hpp"

namespace wam {

// Prediction/observation fields are (n_years x n_pixels) matrices
// throughout: rows index held-out years, columns index pixels.

namespace detail {

inline void check_same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                             const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw NumericError(std::string(who) + ": shape mismatch");
  if (a.size() == 0) throw NumericError(std::string(who) + ": empty input");
}

/// Pearson r of two equal-length vectors, NaN when either is constant.
inline double pearson_or_nan(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double mx = x.mean(), my = y.mean();
  const Eigen::VectorXd dx = x.array() - mx;
  const Eigen::VectorXd dy = y.array() - my;
  const double sxx = dx.squaredNorm(), syy = dy.squaredNorm();
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(dx.dot(dy) / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace detail

inline double mae(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& obs) {
  detail::check_same_shape(pred, obs, "mae");
  return (pred - obs).cwiseAbs().mean();
}

/// Mean over pixels of (prediction - observation), one value per year.
inline Eigen::VectorXd bias_spatial(const Eigen::MatrixXd& pred,
                                    const Eigen::MatrixXd& obs) {
  detail::check_same_shape(pred, obs, "bias_spatial");
  return (pred - obs).rowwise().mean();
}

/// Mean over years of (prediction - observation), one value per pixel.
inline Eigen::VectorXd bias_temporal(const Eigen::MatrixXd& pred,
                                     const Eigen::MatrixXd& obs) {
  detail::check_same_shape(pred, obs, "bias_temporal");
  return (pred - obs).colwise().mean();
}

enum class RmseAveraging { spatial_first, temporal_first };

/// spatial_first: per-year RMS over pixels, averaged over years.
/// temporal_first: per-pixel RMS over years, averaged over pixels.
inline double rmse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& obs,
                   RmseAveraging mode) {
  detail::check_same_shape(pred, obs, "rmse");
  const Eigen::MatrixXd sq = (pred - obs).array().square();
  if (mode == RmseAveraging::spatial_first)
    return sq.rowwise().mean().cwiseSqrt().mean();
  return sq.colwise().mean().cwiseSqrt().mean();
}

// Per-year correlation values; years whose fields are constant are NaN,
// counted, and excluded from the mean.
struct YearlyCorrelation {
  Eigen::VectorXd r;  // per year, NaN = undefined
  double mean = std::numeric_limits<double>::quiet_NaN();
  double max = std::numeric_limits<double>::quiet_NaN();
  int undefined_count = 0;
};

namespace detail {

inline YearlyCorrelation yearly_correlation(const Eigen::MatrixXd& pred,
                                            const Eigen::MatrixXd& obs) {
  YearlyCorrelation out;
  out.r.resize(pred.rows());
  double sum = 0.0;
  int defined = 0;
  for (Eigen::Index t = 0; t < pred.rows(); ++t) {
    const double r = pearson_or_nan(pred.row(t).transpose(), obs.row(t).transpose());
    out.r(t) = r;
    if (std::isnan(r)) {
      ++out.undefined_count;
    } else {
      sum += r;
      ++defined;
      if (std::isnan(out.max) || r > out.max) out.max = r;
    }
  }
  if (defined > 0) out.mean = sum / defined;
  return out;
}

}  // namespace detail

/// Spatial correlation of the raw fields, per year.
inline YearlyCorrelation spatial_correlation(const Eigen::MatrixXd& pred,
                                             const Eigen::MatrixXd& obs) {
  detail::check_same_shape(pred, obs, "spatial_correlation");
  return detail::yearly_correlation(pred, obs);
}

/// Anomaly correlation: each pixel's prediction and observation series is
/// centered by its own temporal mean, then the fields are correlated
/// spatially per year. Removes the fixed north-south onset gradient.
inline YearlyCorrelation anomaly_correlation(const Eigen::MatrixXd& pred,
                                             const Eigen::MatrixXd& obs) {
  detail::check_same_shape(pred, obs, "anomaly_correlation");
  if (pred.rows() < 2) throw NumericError("anomaly_correlation: need >= 2 years");
  const Eigen::MatrixXd pc = pred.rowwise() - pred.colwise().mean();
  const Eigen::MatrixXd oc = obs.rowwise() - obs.colwise().mean();
  return detail::yearly_correlation(pc, oc);
}

// Per-pixel verification over years: correlation with significance, and
// skill of the model MSE against a climatology baseline.
struct TemporalVerification {
  Eigen::VectorXd r;  // per pixel, NaN = undefined
  Eigen::VectorXd p;  // two-sided p-values, NaN where r is undefined
  double mean_r = std::numeric_limits<double>::quiet_NaN();
  double frac_significant_90 = 0.0;  // among defined pixels
  double frac_significant_95 = 0.0;
  double skill = std::numeric_limits<double>::quiet_NaN();  // 1 - MSE/MSE_clim
  int undefined_count = 0;
};

/// `clim` holds the baseline prediction (per fold training-era mean onset)
/// with the same shape as `pred`.
inline TemporalVerification temporal_verification(const Eigen::MatrixXd& pred,
                                                  const Eigen::MatrixXd& obs,
                                                  const Eigen::MatrixXd& clim) {
  detail::check_same_shape(pred, obs, "temporal_verification");
  detail::check_same_shape(pred, clim, "temporal_verification");
  const Eigen::Index n_years = pred.rows(), n_pixels = pred.cols();
  if (n_years < 3) throw NumericError("temporal_verification: need >= 3 years");
  TemporalVerification out;
  out.r.resize(n_pixels);
  out.p.resize(n_pixels);
  double sum_r = 0.0;
  int defined = 0, sig90 = 0, sig95 = 0;
  for (Eigen::Index i = 0; i < n_pixels; ++i) {
    const double r = detail::pearson_or_nan(pred.col(i), obs.col(i));
    out.r(i) = r;
    if (std::isnan(r)) {
      out.p(i) = std::numeric_limits<double>::quiet_NaN();
      ++out.undefined_count;
      continue;
    }
    out.p(i) = pearson_pvalue(r, static_cast<std::size_t>(n_years));
    sum_r += r;
    ++defined;
    if (out.p(i) < 0.10) ++sig90;
    if (out.p(i) < 0.05) ++sig95;
  }
  if (defined > 0) {
    out.mean_r = sum_r / defined;
    out.frac_significant_90 = static_cast<double>(sig90) / defined;
    out.frac_significant_95 = static_cast<double>(sig95) / defined;
  }
  const double mse_model = (pred - obs).squaredNorm() / pred.size();
  const double mse_clim = (clim - obs).squaredNorm() / clim.size();
  if (mse_clim > 0.0) out.skill = 1.0 - mse_model / mse_clim;
  return out;
}

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long support = 0;
  bool degenerate = false;  // some denominator was zero and reported as 0
};

struct ClassificationReport {
  ClassMetrics cls[2];
  double accuracy = 0.0;
  ClassMetrics macro_avg;     // support = total
  ClassMetrics weighted_avg;  // support = total
  long total = 0;

  /// Aligned text table, one row per class plus summary rows.
  std::string table() const {
    char buf[128];
    std::string s = "Class         Precision  Recall  F1-Score  Support\n";
    for (int c = 0; c < 2; ++c) {
      std::snprintf(buf, sizeof(buf), "%-13d %9.2f %7.2f %9.2f %8ld\n", c,
                    cls[c].precision, cls[c].recall, cls[c].f1, cls[c].support);
      s += buf;
    }
    std::snprintf(buf, sizeof(buf), "%-13s %9s %7s %9.2f %8ld\n", "Accuracy", "", "",
                  accuracy, total);
    s += buf;
    std::snprintf(buf, sizeof(buf), "%-13s %9.2f %7.2f %9.2f %8ld\n", "Macro Avg",
                  macro_avg.precision, macro_avg.recall, macro_avg.f1, total);
    s += buf;
    std::snprintf(buf, sizeof(buf), "%-13s %9.2f %7.2f %9.2f %8ld\n", "Weighted Avg",
                  weighted_avg.precision, weighted_avg.recall, weighted_avg.f1, total);
    s += buf;
    return s;
  }
};

inline ClassificationReport classification_report(std::span<const int> pred,
                                                  std::span<const int> obs) {
  if (pred.size() != obs.size())
    throw NumericError("classification_report: length mismatch");
  if (pred.empty()) throw NumericError("classification_report: empty input");
  long tp[2] = {0, 0}, fp[2] = {0, 0}, fn[2] = {0, 0};
  long correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if ((pred[i] != 0 && pred[i] != 1) || (obs[i] != 0 && obs[i] != 1))
      throw NumericError("classification_report: label outside {0,1}");
    if (pred[i] == obs[i]) {
      ++tp[obs[i]];
      ++correct;
    } else {
      ++fp[pred[i]];
      ++fn[obs[i]];
    }
  }
  ClassificationReport rep;
  rep.total = static_cast<long>(pred.size());
  rep.accuracy = static_cast<double>(correct) / rep.total;
  for (int c = 0; c < 2; ++c) {
    ClassMetrics& m = rep.cls[c];
    m.support = tp[c] + fn[c];
    const long pred_c = tp[c] + fp[c];
    if (pred_c == 0) m.degenerate = true;
    m.precision = pred_c == 0 ? 0.0 : static_cast<double>(tp[c]) / pred_c;
    if (m.support == 0) m.degenerate = true;
    m.recall = m.support == 0 ? 0.0 : static_cast<double>(tp[c]) / m.support;
    const double pr = m.precision + m.recall;
    m.f1 = pr == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / pr;
    if (pr == 0.0) m.degenerate = true;
  }
  auto avg = [&](auto get) {
    return 0.5 * (get(rep.cls[0]) + get(rep.cls[1]));
  };
  auto wavg = [&](auto get) {
    return (get(rep.cls[0]) * rep.cls[0].support + get(rep.cls[1]) * rep.cls[1].support) /
           static_cast<double>(rep.total);
  };
  auto prec = [](const ClassMetrics& m) { return m.precision; };
  auto rec = [](const ClassMetrics& m) { return m.recall; };
  auto f1 = [](const ClassMetrics& m) { return m.f1; };
  rep.macro_avg = {avg(prec), avg(rec), avg(f1), rep.total, false};
  rep.weighted_avg = {wavg(prec), wavg(rec), wavg(f1), rep.total, false};
  return rep;
}

/// Probability that a random positive outranks a random negative, ties
/// counted 1/2 (computed from midranks).
inline double roc_auc(std::span<const double> probs, std::span<const int> labels) {
  if (probs.size() != labels.size()) throw NumericError("roc_auc: length mismatch");
  const std::size_t n = probs.size();
  long n_pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw NumericError("roc_auc: label outside {0,1}");
    n_pos += y;
  }
  const long n_neg = static_cast<long>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw NumericError("roc_auc: both classes must be present");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && probs[order[j + 1]] == probs[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
    for (std::size_t k = i; k <= j; ++k)
      if (labels[order[k]] == 1) rank_sum_pos += midrank;
    i = j + 1;
  }
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace wam
