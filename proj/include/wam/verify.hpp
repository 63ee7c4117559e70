#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wam/errors.hpp"
#include "wam/features.hpp"
#include "wam/grid.hpp"
#include "wam/labeling.hpp"
#include "wam/metrics.hpp"
#include "wam/pipeline.hpp"
#include "wam/util.hpp"

namespace wam {

// Everything one evaluation run consumes: the observed cube (whose years
// are the held-out folds), an optional simulated cube that only ever
// trains, and the SST panel covering all years.
struct EvalDataset {
  GridSpec grid;
  DailyPrecipCube observed;
  std::optional<DailyPrecipCube> simulated;
  SstPanel panel;

  LabelSet label(const FuzzyParams& fuzzy = {}, const DrySpellParams& ds = {}) const {
    LabelSet obs = label_dataset(observed, fuzzy, ds);
    if (!simulated) return obs;
    return LabelSet::merge(obs, label_dataset(*simulated, fuzzy, ds));
  }
};

enum class LoocvTarget { onset, dryspell };

struct LoocvOptions {
  double lambda_ons = 0.0;
  double lambda_ds = 0.0;
  FitConfig fit;
  TrainOptions train;
  int n_threads = 1;
  bool keep_fold_coeffs = false;  // retain per-fold coefficient matrices
};

// Held-out predictions assembled over all folds. Row t corresponds to
// heldout_years[t]; observations are the ground-truth labels.
struct LoocvResult {
  std::vector<int> heldout_years;
  Eigen::MatrixXd onset_pred;  // years x pixels, integer days stored as double
  Eigen::MatrixXd onset_obs;
  Eigen::MatrixXd onset_clim;  // per-fold training-mean onset baseline
  // dry-spell outputs (dryspell target only)
  Eigen::MatrixXd ds_prob;
  Eigen::MatrixXi ds_pred;
  Eigen::MatrixXi ds_obs;
  Eigen::VectorXd p_hat;        // per fold, clamped
  Eigen::VectorXd threshold;    // per fold
  Eigen::VectorXd y_prop_true;  // observed dry-spell fraction per fold
  std::vector<std::uint64_t> fold_train_checksums;
  std::vector<Eigen::MatrixXd> fold_onset_coeffs;  // when keep_fold_coeffs
  std::vector<Eigen::MatrixXd> fold_ds_coeffs;
};

namespace detail {

/// Audit hash over everything a fold's training may legally read: the
/// training-year labels and SST rows plus the hyperparameters. The held-out
/// year never contributes.
inline std::uint64_t fold_checksum(const LabelSet& labels, const SstPanel& panel,
                                   std::span<const int> train_year_idx,
                                   const LoocvOptions& options) {
  Fnv1a h;
  for (int yi : train_year_idx) {
    const int year = labels.years()[yi];
    h.update_value(year);
    for (PixelId p = 0; p < labels.n_pixels(); ++p) {
      h.update_value(labels.onset(p, yi).value_or(-1));
      h.update_value(labels.search_start(p, yi));
      h.update_value(labels.dry_spell(p, yi).value_or(-1));
      h.update_value(static_cast<int>(labels.filled(p, yi)));
    }
    const int row = panel.year_index(year);
    for (int c = 0; c < kNumSstColumns; ++c) h.update_value(panel.at(row, c));
  }
  h.update_value(options.lambda_ons);
  h.update_value(options.lambda_ds);
  h.update_value(options.fit.learning_rate);
  h.update_value(options.fit.epochs);
  h.update_value(options.fit.seed);
  return h.digest();
}

}  // namespace detail

/// Leave-one-year-out over the observed years: each fold refits predictor
/// selection, standardization, and the models on all remaining years
/// (simulated years included), then predicts the held-out year. Dry-spell
/// folds feed the onset model's held-out predictions into the design's
/// onset column.
inline LoocvResult loocv(const EvalDataset& data, const LabelSet& labels,
                         LoocvTarget target, const LoocvOptions& options = {}) {
  const int P = labels.n_pixels();
  const int n_folds = data.observed.n_years();
  const Adjacency adj = build_adjacency(data.grid);

  LoocvResult result;
  result.heldout_years = data.observed.years;
  result.onset_pred.resize(n_folds, P);
  result.onset_obs.resize(n_folds, P);
  result.onset_clim.resize(n_folds, P);
  result.fold_train_checksums.resize(n_folds);
  if (target == LoocvTarget::dryspell) {
    result.ds_prob.resize(n_folds, P);
    result.ds_pred.resize(n_folds, P);
    result.ds_obs.resize(n_folds, P);
    result.p_hat.resize(n_folds);
    result.threshold.resize(n_folds);
    result.y_prop_true.resize(n_folds);
  }
  if (options.keep_fold_coeffs) {
    result.fold_onset_coeffs.resize(n_folds);
    if (target == LoocvTarget::dryspell) result.fold_ds_coeffs.resize(n_folds);
  }

  std::vector<std::string> fold_errors(n_folds);
  parallel_for(static_cast<std::size_t>(n_folds), options.n_threads, [&](std::size_t f) {
    const int heldout_year = data.observed.years[f];
    try {
      const int heldout_yi = labels.year_index(heldout_year);
      std::vector<int> train_idx;
      train_idx.reserve(labels.n_years() - 1);
      for (int yi = 0; yi < labels.n_years(); ++yi)
        if (yi != heldout_yi) train_idx.push_back(yi);

      result.fold_train_checksums[f] =
          detail::fold_checksum(labels, data.panel, train_idx, options);

      const OnsetModel onset_model =
          train_onset(labels, data.panel, data.grid, adj, options.lambda_ons,
                      options.fit, options.train, train_idx);
      const std::vector<int> onset_pred =
          predict_onset(onset_model, data.panel, heldout_year);
      for (PixelId p = 0; p < P; ++p) {
        result.onset_pred(f, p) = onset_pred[p];
        result.onset_obs(f, p) =
            static_cast<double>(labels.onset(p, heldout_yi).value());
        // training-era mean onset is the climatology baseline
        result.onset_clim(f, p) = std::round(onset_model.target_std[p].mean);
      }
      if (options.keep_fold_coeffs) result.fold_onset_coeffs[f] = onset_model.coeffs;

      if (target == LoocvTarget::dryspell) {
        const DrySpellModel ds_model =
            train_dryspell(labels, data.panel, data.grid, adj, options.lambda_ds,
                           options.fit, options.train, train_idx);
        const DrySpellPrediction pred =
            predict_dryspell(ds_model, data.panel, heldout_year, onset_pred);
        int dry_count = 0;
        for (PixelId p = 0; p < P; ++p) {
          result.ds_prob(f, p) = pred.probabilities[p];
          result.ds_pred(f, p) = pred.labels[p];
          const int obs = labels.dry_spell(p, heldout_yi).value();
          result.ds_obs(f, p) = obs;
          dry_count += obs;
        }
        result.p_hat(f) = pred.p_hat;
        result.threshold(f) = pred.threshold;
        result.y_prop_true(f) = static_cast<double>(dry_count) / P;
        if (options.keep_fold_coeffs) result.fold_ds_coeffs[f] = ds_model.thetas;
      }
    } catch (const std::exception& e) {
      fold_errors[f] = e.what();
    }
  });

  for (int f = 0; f < n_folds; ++f)
    if (!fold_errors[f].empty())
      throw NumericError("loocv: fold for year " +
                         std::to_string(data.observed.years[f]) +
                         " failed: " + fold_errors[f]);
  return result;
}

// The full verification battery over LOOCV outputs.
struct VerificationReport {
  // onset verification
  double mae_days = 0.0;
  double rmse_spatial_first = 0.0;
  double rmse_temporal_first = 0.0;
  Eigen::VectorXd bias_per_year;
  Eigen::VectorXd bias_per_pixel;
  double bias_per_year_std = 0.0;
  double bias_per_pixel_std = 0.0;
  YearlyCorrelation spatial_corr;
  YearlyCorrelation anomaly_corr;
  TemporalVerification temporal;
  // dry-spell verification (flattened over folds)
  bool has_dryspell = false;
  ClassificationReport classification;
  double roc_auc_value = std::numeric_limits<double>::quiet_NaN();
  double proportion_mae = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline double sample_std(const Eigen::VectorXd& v) {
  if (v.size() < 2) return 0.0;
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() / (v.size() - 1));
}

}  // namespace detail

/// Assemble the report from an onset run and (optionally) a dry-spell run.
inline VerificationReport build_report(const LoocvResult& onset,
                                       const LoocvResult* dryspell = nullptr) {
  VerificationReport rep;
  rep.mae_days = mae(onset.onset_pred, onset.onset_obs);
  rep.rmse_spatial_first =
      rmse(onset.onset_pred, onset.onset_obs, RmseAveraging::spatial_first);
  rep.rmse_temporal_first =
      rmse(onset.onset_pred, onset.onset_obs, RmseAveraging::temporal_first);
  rep.bias_per_year = bias_spatial(onset.onset_pred, onset.onset_obs);
  rep.bias_per_pixel = bias_temporal(onset.onset_pred, onset.onset_obs);
  rep.bias_per_year_std = detail::sample_std(rep.bias_per_year);
  rep.bias_per_pixel_std = detail::sample_std(rep.bias_per_pixel);
  rep.spatial_corr = spatial_correlation(onset.onset_pred, onset.onset_obs);
  rep.anomaly_corr = anomaly_correlation(onset.onset_pred, onset.onset_obs);
  rep.temporal =
      temporal_verification(onset.onset_pred, onset.onset_obs, onset.onset_clim);

  if (dryspell != nullptr) {
    rep.has_dryspell = true;
    const Eigen::Index n = dryspell->ds_pred.size();
    std::vector<int> pred(n), obs(n);
    std::vector<double> prob(n);
    Eigen::Index k = 0;
    for (Eigen::Index f = 0; f < dryspell->ds_pred.rows(); ++f)
      for (Eigen::Index p = 0; p < dryspell->ds_pred.cols(); ++p, ++k) {
        pred[k] = dryspell->ds_pred(f, p);
        obs[k] = dryspell->ds_obs(f, p);
        prob[k] = dryspell->ds_prob(f, p);
      }
    rep.classification = classification_report(pred, obs);
    rep.roc_auc_value = roc_auc(prob, obs);
    rep.proportion_mae =
        (dryspell->p_hat - dryspell->y_prop_true).cwiseAbs().mean();
  }
  return rep;
}

// Exploratory statistics of a labeled dataset (per-pixel maps plus
// scalars), mirroring what one would inspect before modeling.
struct EdaReport {
  // observed-minus-simulated daily rainfall over the years both cubes share
  int common_years = 0;
  double mean_daily_diff = std::numeric_limits<double>::quiet_NaN();
  double mean_abs_daily_diff = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd diff_map;  // per pixel mean difference
  Eigen::VectorXd onset_mean;
  Eigen::VectorXd onset_std;
  Eigen::VectorXd dryspell_freq;
  Eigen::VectorXd max_abs_corr;  // per pixel, over all 42 SST columns
  Eigen::VectorXi max_corr_col;
  int fill_count = 0;
};

inline EdaReport eda_report(const DailyPrecipCube& observed,
                            const DailyPrecipCube* simulated, const LabelSet& labels,
                            const SstPanel& panel) {
  const int P = labels.n_pixels();
  if (observed.n_pixels != P)
    throw ParseError("eda_report: cube and labels disagree on pixel count");
  EdaReport rep;
  rep.fill_count = labels.fill_count();

  if (simulated != nullptr) {
    if (simulated->n_pixels != P)
      throw ParseError("eda_report: misaligned grids between cubes");
    rep.diff_map = Eigen::VectorXd::Zero(P);
    double total = 0.0, total_abs = 0.0;
    long count = 0;
    for (int yo = 0; yo < observed.n_years(); ++yo) {
      int ys = -1;
      for (int i = 0; i < simulated->n_years(); ++i)
        if (simulated->years[i] == observed.years[yo]) ys = i;
      if (ys < 0) continue;
      ++rep.common_years;
      for (PixelId p = 0; p < P; ++p) {
        const auto so = observed.series(yo, p);
        const auto ss = simulated->series(ys, p);
        for (int d = 0; d < kDaysPerYear; ++d) {
          const double diff = so[d] - ss[d];
          rep.diff_map(p) += diff;
          total += diff;
          total_abs += std::fabs(diff);
          ++count;
        }
      }
    }
    if (count > 0) {
      rep.mean_daily_diff = total / count;
      rep.mean_abs_daily_diff = total_abs / count;
      rep.diff_map /= static_cast<double>(rep.common_years) * kDaysPerYear;
    }
  }

  rep.onset_mean.resize(P);
  rep.onset_std.resize(P);
  rep.dryspell_freq.resize(P);
  rep.max_abs_corr.resize(P);
  rep.max_corr_col.resize(P);
  const int Y = labels.n_years();
  std::vector<double> onsets(Y);
  std::vector<double> col_vals(Y);
  for (PixelId p = 0; p < P; ++p) {
    double dry_sum = 0.0;
    for (int yi = 0; yi < Y; ++yi) {
      onsets[yi] = static_cast<double>(labels.onset(p, yi).value());
      dry_sum += labels.dry_spell(p, yi).value_or(0);
    }
    Eigen::Map<const Eigen::VectorXd> ov(onsets.data(), Y);
    rep.onset_mean(p) = ov.mean();
    rep.onset_std(p) = detail::sample_std(ov);
    rep.dryspell_freq(p) = dry_sum / Y;

    double best = -1.0;
    int best_col = -1;
    for (int c = 0; c < kNumSstColumns; ++c) {
      for (int yi = 0; yi < Y; ++yi) {
        const int row = panel.year_index(labels.years()[yi]);
        panel.require_column(row, c);
        col_vals[yi] = panel.at(row, c);
      }
      double r;
      try {
        r = pearson(onsets, col_vals);
      } catch (const NumericError&) {
        continue;
      }
      if (std::fabs(r) > best) {
        best = std::fabs(r);
        best_col = c;
      }
    }
    rep.max_abs_corr(p) = best < 0.0 ? std::numeric_limits<double>::quiet_NaN() : best;
    rep.max_corr_col(p) = best_col;
  }
  return rep;
}

}  // namespace wam
