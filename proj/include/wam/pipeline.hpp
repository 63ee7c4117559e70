#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wam/adam.hpp"
#include "wam/errors.hpp"
#include "wam/features.hpp"
#include "wam/grid.hpp"
#include "wam/labeling.hpp"
#include "wam/models.hpp"
#include "wam/stats.hpp"

namespace wam {

// Shared data-preparation switches for both learned models.
struct TrainOptions {
  SstMonth onset_month = SstMonth::Sep;
  DryspellDesignSpec ds_design;
  ProportionDesignSpec prop_design;
  // Filled (replaced) onsets stay in the training data by default; when
  // false their (pixel, year) samples are masked out of the data terms.
  bool use_filled = true;
};

// Per-pixel TV-regularized linear onset model plus everything needed to
// reproduce predictions: selection, scalers, and coefficients
// [intercept, slope1, slope2] in standardized units.
struct OnsetModel {
  GridSpec grid;
  double lambda = 0.0;
  FitConfig config;
  PredictorSelection selection;
  std::vector<std::array<Standardizer, 2>> predictor_std;  // per pixel, per slot
  std::vector<Standardizer> target_std;                    // per pixel
  Eigen::MatrixXd coeffs;                                  // P x 3
  Eigen::VectorXd residual_variance;  // standardized units, training residuals
  std::vector<double> loss_history;
  bool converged = false;

  int n_pixels() const { return static_cast<int>(coeffs.rows()); }
};

namespace detail {

inline std::vector<int> all_year_indices(const LabelSet& labels) {
  std::vector<int> idx(labels.n_years());
  for (int i = 0; i < labels.n_years(); ++i) idx[i] = i;
  return idx;
}

}  // namespace detail

/// Assemble the joint onset problem over the given training years:
/// designs [1, z1, z2] from the selected September columns, per-pixel
/// standardized onset targets, and the use_filled mask.
inline JointDesign build_onset_design(const LabelSet& labels, const SstPanel& panel,
                                      const PredictorSelection& sel,
                                      std::span<const int> train_year_idx,
                                      std::vector<std::array<Standardizer, 2>>& predictor_std,
                                      std::vector<Standardizer>& target_std,
                                      bool use_filled = true) {
  const int P = labels.n_pixels();
  const Eigen::Index B = static_cast<Eigen::Index>(train_year_idx.size());
  predictor_std.assign(P, {});
  target_std.assign(P, {});

  std::vector<int> panel_rows(B);
  for (Eigen::Index t = 0; t < B; ++t)
    panel_rows[t] = panel.year_index(labels.years()[train_year_idx[t]]);

  // column scalers are shared by every pixel that selects the same column
  std::array<std::optional<Standardizer>, kNumSstColumns> column_std;
  auto column_scaler = [&](int col) -> Standardizer {
    if (!column_std[col]) {
      std::vector<double> vals(B);
      for (Eigen::Index t = 0; t < B; ++t) {
        panel.require_column(panel_rows[t], col);
        vals[t] = panel.at(panel_rows[t], col);
      }
      column_std[col] = fit_standardizer(vals);
    }
    return *column_std[col];
  };

  JointDesign d;
  d.X.resize(P);
  d.y.resize(P, B);
  d.weight = Eigen::MatrixXd::Ones(P, B);
  std::vector<double> included;
  for (PixelId p = 0; p < P; ++p) {
    included.clear();
    for (Eigen::Index t = 0; t < B; ++t) {
      const int yi = train_year_idx[t];
      if (!use_filled && labels.filled(p, yi)) d.weight(p, t) = 0.0;
      const auto o = labels.onset(p, yi);
      if (!o) throw ParseError("build_onset_design: undefined onset in labels");
      if (d.weight(p, t) > 0.0) included.push_back(static_cast<double>(*o));
    }
    if (included.size() < 2)
      throw NumericError("build_onset_design: fewer than 2 usable years at pixel " +
                         std::to_string(p));
    target_std[p] = fit_standardizer(included);

    Eigen::MatrixXd Xp(B, 3);
    Xp.col(0).setOnes();
    for (int s = 0; s < 2; ++s) {
      const int col = sel.columns[p][s];
      predictor_std[p][s] = column_scaler(col);
      for (Eigen::Index t = 0; t < B; ++t)
        Xp(t, s + 1) = predictor_std[p][s].standardize(panel.at(panel_rows[t], col));
    }
    d.X[p] = std::move(Xp);
    for (Eigen::Index t = 0; t < B; ++t)
      d.y(p, t) = target_std[p].standardize(
          static_cast<double>(*labels.onset(p, train_year_idx[t])));
  }
  return d;
}

/// Select predictors, standardize, and fit the joint linear model on the
/// given training years (defaults to all years in the label set).
inline OnsetModel train_onset(const LabelSet& labels, const SstPanel& panel,
                              const GridSpec& grid, const Adjacency& adj,
                              double lambda, const FitConfig& config = {},
                              const TrainOptions& options = {},
                              std::span<const int> train_year_idx = {}) {
  std::vector<int> all;
  if (train_year_idx.empty()) {
    all = detail::all_year_indices(labels);
    train_year_idx = all;
  }
  OnsetModel model;
  model.grid = grid;
  model.lambda = lambda;
  model.config = config;
  model.selection = select_predictors(labels, panel, train_year_idx,
                                      options.onset_month, options.use_filled);
  const JointDesign d =
      build_onset_design(labels, panel, model.selection, train_year_idx,
                         model.predictor_std, model.target_std, options.use_filled);
  FitResult fit = fit_onset_coeffs(d, adj, lambda, config);
  model.coeffs = std::move(fit.coeffs);
  model.loss_history = std::move(fit.loss_history);
  model.converged = fit.converged;

  model.residual_variance.resize(labels.n_pixels());
  for (Eigen::Index i = 0; i < d.n_pixels(); ++i) {
    const Eigen::VectorXd resid =
        d.X[i] * model.coeffs.row(i).transpose() - d.y.row(i).transpose();
    const double b = d.weight.row(i).sum();
    double ss = 0.0;
    for (Eigen::Index t = 0; t < d.n_samples(); ++t)
      ss += d.weight(i, t) * resid(t) * resid(t);
    model.residual_variance(i) = b > 0.0 ? ss / b : 0.0;
  }
  return model;
}

/// Predict per-pixel onset days-of-year for one monsoon year: destandardize
/// the linear prediction, round to the nearest day, clamp to [1, 365].
inline std::vector<int> predict_onset(const OnsetModel& model, const SstPanel& panel,
                                      int year) {
  const int row = panel.year_index(year);
  const int P = model.n_pixels();
  std::vector<int> out(P);
  for (PixelId p = 0; p < P; ++p) {
    double z = model.coeffs(p, 0);
    for (int s = 0; s < 2; ++s) {
      const int col = model.selection.columns[p][s];
      panel.require_column(row, col);
      z += model.coeffs(p, s + 1) *
           model.predictor_std[p][s].standardize(panel.at(row, col));
    }
    const double day = model.target_std[p].destandardize(z);
    out[p] = static_cast<int>(std::clamp<long long>(std::llround(day), 1, kDaysPerYear));
  }
  return out;
}

// Per-pixel TV-regularized logistic dry-spell model, its design/column
// scalers, and the proportion regressor driving the adaptive threshold.
struct DrySpellModel {
  GridSpec grid;
  double lambda = 0.0;
  FitConfig config;
  DryspellDesignSpec design;
  ProportionDesignSpec prop_design;
  std::vector<Standardizer> column_std;  // one per design column
  Eigen::MatrixXd thetas;                // P x (width + 1), column 0 = intercept
  ProportionModel proportion;
  std::vector<double> loss_history;
  bool converged = false;
  bool saturated = false;  // epoch cap reached with runaway coefficients

  int n_pixels() const { return static_cast<int>(thetas.rows()); }
};

/// Assemble the joint dry-spell problem: per-pixel logistic designs
/// [1, standardized predictors] over the training years, with true onsets
/// in the onset column. Column scalers are fit on the unmasked training
/// rows and returned for reuse at prediction time.
inline JointDesign build_dryspell_design(const LabelSet& labels, const SstPanel& panel,
                                         const GridSpec& grid,
                                         const DryspellDesignSpec& spec,
                                         std::span<const int> train_year_idx,
                                         std::vector<Standardizer>& column_std,
                                         bool use_filled = true) {
  const int P = labels.n_pixels();
  const Eigen::Index B = static_cast<Eigen::Index>(train_year_idx.size());
  const int width = spec.width();

  std::vector<int> panel_rows(B);
  for (Eigen::Index t = 0; t < B; ++t)
    panel_rows[t] = panel.year_index(labels.years()[train_year_idx[t]]);

  // raw rows first, then pooled standardization over unmasked rows
  std::vector<Eigen::MatrixXd> raw(P, Eigen::MatrixXd(B, width));
  JointDesign d;
  d.y.resize(P, B);
  d.weight = Eigen::MatrixXd::Ones(P, B);
  for (PixelId p = 0; p < P; ++p) {
    for (Eigen::Index t = 0; t < B; ++t) {
      const int yi = train_year_idx[t];
      const auto onset = labels.onset(p, yi);
      const auto dry = labels.dry_spell(p, yi);
      if (!onset || !dry)
        throw ParseError("build_dryspell_design: incomplete labels");
      if (!use_filled && labels.filled(p, yi)) d.weight(p, t) = 0.0;
      dryspell_design_row(spec, panel, panel_rows[t], grid, p,
                          static_cast<double>(*onset), raw[p].row(t));
      d.y(p, t) = static_cast<double>(*dry);
    }
  }

  column_std.assign(width, {});
  for (int c = 0; c < width; ++c) {
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(P) * B);
    for (PixelId p = 0; p < P; ++p)
      for (Eigen::Index t = 0; t < B; ++t)
        if (d.weight(p, t) > 0.0) vals.push_back(raw[p](t, c));
    column_std[c] = fit_standardizer(vals);
  }

  d.X.resize(P);
  for (PixelId p = 0; p < P; ++p) {
    Eigen::MatrixXd Xp(B, width + 1);
    Xp.col(0).setOnes();
    for (int c = 0; c < width; ++c)
      for (Eigen::Index t = 0; t < B; ++t)
        Xp(t, c + 1) = column_std[c].standardize(raw[p](t, c));
    d.X[p] = std::move(Xp);
  }
  return d;
}

/// Fit the joint logistic model and the proportion regressor on the given
/// training years.
inline DrySpellModel train_dryspell(const LabelSet& labels, const SstPanel& panel,
                                    const GridSpec& grid, const Adjacency& adj,
                                    double lambda, const FitConfig& config = {},
                                    const TrainOptions& options = {},
                                    std::span<const int> train_year_idx = {}) {
  std::vector<int> all;
  if (train_year_idx.empty()) {
    all = detail::all_year_indices(labels);
    train_year_idx = all;
  }
  DrySpellModel model;
  model.grid = grid;
  model.lambda = lambda;
  model.config = config;
  model.design = options.ds_design;
  model.prop_design = options.prop_design;
  const JointDesign d =
      build_dryspell_design(labels, panel, grid, model.design, train_year_idx,
                            model.column_std, options.use_filled);
  FitResult fit = fit_dryspell_coeffs(d, adj, lambda, config);
  model.thetas = std::move(fit.coeffs);
  model.loss_history = std::move(fit.loss_history);
  model.converged = fit.converged;
  model.saturated = fit.saturated;

  const auto [Xp, yp] =
      build_proportion_design(panel, labels, train_year_idx, model.prop_design);
  model.proportion = fit_proportion(Xp, yp);
  return model;
}

// One year of dry-spell predictions: per-pixel probabilities, the
// regressed proportion (already clamped to [0,1]), the adaptive threshold,
// and the resulting labels.
struct DrySpellPrediction {
  std::vector<double> probabilities;
  double p_hat = 0.0;
  double threshold = 0.0;
  std::vector<int> labels;
};

/// Predict dry-spell occurrence for one year. `onset_days` supplies the
/// onset column (predicted onsets at forecast time, true onsets only for
/// diagnostics).
inline DrySpellPrediction predict_dryspell(const DrySpellModel& model,
                                           const SstPanel& panel, int year,
                                           std::span<const int> onset_days) {
  const int P = model.n_pixels();
  if (static_cast<int>(onset_days.size()) != P)
    throw ParseError("predict_dryspell: onset vector length mismatch");
  const int row = panel.year_index(year);
  const int width = model.design.width();

  DrySpellPrediction out;
  out.probabilities.resize(P);
  Eigen::RowVectorXd raw(width);
  for (PixelId p = 0; p < P; ++p) {
    dryspell_design_row(model.design, panel, row, model.grid, p,
                        static_cast<double>(onset_days[p]), raw);
    double z = model.thetas(p, 0);
    for (int c = 0; c < width; ++c)
      z += model.thetas(p, c + 1) * model.column_std[c].standardize(raw(c));
    out.probabilities[p] = detail::sigmoid(z);
  }

  Eigen::Vector2d xp;
  for (int k = 0; k < 2; ++k) {
    panel.require_column(row, model.prop_design.columns[k]);
    xp(k) = panel.at(row, model.prop_design.columns[k]);
  }
  out.p_hat = std::clamp(model.proportion.predict(xp), 0.0, 1.0);
  ThresholdResult thr = adaptive_threshold(out.probabilities, out.p_hat);
  out.threshold = thr.threshold;
  out.labels = std::move(thr.labels);
  return out;
}

}  // namespace wam
