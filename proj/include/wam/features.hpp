#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wam/errors.hpp"
#include "wam/grid.hpp"
#include "wam/labeling.hpp"
#include "wam/stats.hpp"

namespace wam {

// Fixed region order; doubles as the deterministic tie-break order for
// predictor selection.
enum class OceanRegion : int {
  Atlantic = 0,
  NorthAtlantic = 1,
  GulfOfGuinea = 2,
  Indian = 3,
  Pacific = 4,
  Mediterranean = 5,
};

// Months in chronological order. Sep..Dec are drawn from the calendar year
// before the monsoon year; Jan..Mar from the monsoon year itself.
enum class SstMonth : int { Sep = 0, Oct = 1, Nov = 2, Dec = 3, Jan = 4, Feb = 5, Mar = 6 };

constexpr int kNumRegions = 6;
constexpr int kNumSstMonths = 7;
constexpr int kNumSstColumns = kNumRegions * kNumSstMonths;  // 42

constexpr std::array<const char*, kNumRegions> kRegionNames = {
    "Atlantic", "NorthAtlantic", "GulfOfGuinea", "Indian", "Pacific", "Mediterranean"};
constexpr std::array<const char*, kNumSstMonths> kSstMonthNames = {
    "Sep", "Oct", "Nov", "Dec", "Jan", "Feb", "Mar"};

// Column layout is region-major: column = region * 7 + month.
inline int sst_column(OceanRegion region, SstMonth month) {
  return static_cast<int>(region) * kNumSstMonths + static_cast<int>(month);
}
inline OceanRegion column_region(int col) {
  return static_cast<OceanRegion>(col / kNumSstMonths);
}
inline SstMonth column_month(int col) {
  return static_cast<SstMonth>(col % kNumSstMonths);
}
inline std::string sst_column_name(int col) {
  return std::string(kRegionNames[col / kNumSstMonths]) + "-" +
         kSstMonthNames[col % kNumSstMonths];
}

inline std::optional<OceanRegion> parse_region(const std::string& name) {
  for (int r = 0; r < kNumRegions; ++r)
    if (name == kRegionNames[r]) return static_cast<OceanRegion>(r);
  return std::nullopt;
}
inline std::optional<SstMonth> parse_sst_month(const std::string& name) {
  for (int m = 0; m < kNumSstMonths; ++m)
    if (name == kSstMonthNames[m]) return static_cast<SstMonth>(m);
  return std::nullopt;
}

// Monthly-mean SSTs indexed by (region, month, monsoon year), flattening to
// one 42-wide row per year. Missing entries are NaN until ingested.
struct SstPanel {
  std::vector<int> years;      // monsoon years, ascending
  Eigen::MatrixXd values;      // n_years x 42

  int n_years() const { return static_cast<int>(years.size()); }

  static SstPanel empty(std::vector<int> years_) {
    SstPanel panel;
    panel.years = std::move(years_);
    panel.values = Eigen::MatrixXd::Constant(
        static_cast<Eigen::Index>(panel.years.size()), kNumSstColumns,
        std::numeric_limits<double>::quiet_NaN());
    return panel;
  }

  int year_index(int year) const {
    for (int i = 0; i < n_years(); ++i)
      if (years[i] == year) return i;
    throw ParseError("SstPanel: monsoon year " + std::to_string(year) +
                     " not present");
  }

  double at(int year_idx, int col) const { return values(year_idx, col); }

  void require_column(int year_idx, int col) const {
    if (!std::isfinite(values(year_idx, col)))
      throw ParseError("SstPanel: missing SST value for " + sst_column_name(col) +
                       ", monsoon year " + std::to_string(years[year_idx]));
  }
};

/// Collapse one region's daily 4x4-box SSTs for one month to a single
/// value: per-pixel daily mean over the month, then the mean over the 16
/// pixels. `box` is indexed [pixel][day].
inline double aggregate_sst(const std::vector<std::vector<double>>& box) {
  if (box.size() != 16)
    throw ParseError("aggregate_sst: expected 16 pixels, got " +
                     std::to_string(box.size()));
  const std::size_t n_days = box.front().size();
  if (n_days == 0) throw ParseError("aggregate_sst: empty month");
  double sum_of_pixel_means = 0.0;
  for (const auto& pixel : box) {
    if (pixel.size() != n_days)
      throw ParseError("aggregate_sst: ragged day axis");
    double s = 0.0;
    for (double v : pixel) s += v;
    sum_of_pixel_means += s / static_cast<double>(n_days);
  }
  return sum_of_pixel_means / 16.0;
}

// Per pixel: the two predictor columns with the largest |correlation| to
// that pixel's onset series, both from the selection month.
struct PredictorSelection {
  SstMonth month = SstMonth::Sep;
  std::vector<std::array<int, 2>> columns;       // per pixel, ranked by |r|
  std::vector<std::array<double, 2>> correlations;

  int n_pixels() const { return static_cast<int>(columns.size()); }
};

/// Rank the selection-month SST columns per pixel by |Pearson r| against
/// the pixel's onsets over the training years, keeping the top two.
/// Ties break toward the fixed region order. Columns whose correlation is
/// degenerate (constant input) are skipped; if fewer than two columns
/// survive for a pixel the selection fails.
inline PredictorSelection select_predictors(
    const LabelSet& labels, const SstPanel& panel,
    std::span<const int> training_year_idx, SstMonth month = SstMonth::Sep,
    bool use_filled = true) {
  const std::size_t n_train = training_year_idx.size();
  if (n_train < 3)
    throw NumericError("select_predictors: need at least 3 training years");
  PredictorSelection sel;
  sel.month = month;
  sel.columns.resize(labels.n_pixels());
  sel.correlations.resize(labels.n_pixels());

  std::vector<double> onsets;
  std::vector<double> col_vals;
  for (PixelId p = 0; p < labels.n_pixels(); ++p) {
    onsets.clear();
    std::vector<int> rows;  // training rows with a usable onset
    for (int yi : training_year_idx) {
      if (!use_filled && labels.filled(p, yi)) continue;
      const auto o = labels.onset(p, yi);
      if (!o) throw ParseError("select_predictors: undefined onset in labels");
      onsets.push_back(static_cast<double>(*o));
      rows.push_back(panel.year_index(labels.years()[yi]));
    }
    if (onsets.size() < 3)
      throw NumericError("select_predictors: fewer than 3 usable years at pixel " +
                         std::to_string(p));

    int best[2] = {-1, -1};
    double best_r[2] = {0.0, 0.0};
    for (int region = 0; region < kNumRegions; ++region) {
      const int col = region * kNumSstMonths + static_cast<int>(month);
      col_vals.clear();
      for (int row : rows) {
        panel.require_column(row, col);
        col_vals.push_back(panel.at(row, col));
      }
      double r;
      try {
        r = pearson(onsets, col_vals);
      } catch (const NumericError&) {
        continue;  // constant column or constant onsets: not selectable
      }
      // strict inequality keeps the earlier region on ties
      if (std::fabs(r) > std::fabs(best_r[0]) || best[0] < 0) {
        best[1] = best[0];
        best_r[1] = best_r[0];
        best[0] = col;
        best_r[0] = r;
      } else if (std::fabs(r) > std::fabs(best_r[1]) || best[1] < 0) {
        best[1] = col;
        best_r[1] = r;
      }
    }
    if (best[0] < 0 || best[1] < 0)
      throw NumericError(
          "select_predictors: degenerate correlations on all columns at pixel " +
          std::to_string(p));
    sel.columns[p] = {best[0], best[1]};
    sel.correlations[p] = {best_r[0], best_r[1]};
  }
  return sel;
}

// Named positions of the dry-spell design columns. The paper-default
// design is 4 October SST columns + latitude + longitude + onset; any
// column can be dropped via DryspellDesignSpec to probe alternatives.
struct DryspellDesignSpec {
  std::vector<int> sst_columns = {
      sst_column(OceanRegion::Indian, SstMonth::Oct),
      sst_column(OceanRegion::GulfOfGuinea, SstMonth::Oct),
      sst_column(OceanRegion::Mediterranean, SstMonth::Oct),
      sst_column(OceanRegion::NorthAtlantic, SstMonth::Oct)};
  bool use_lat = true;
  bool use_lon = true;
  bool use_onset = true;

  int width() const {
    return static_cast<int>(sst_columns.size()) + (use_lat ? 1 : 0) +
           (use_lon ? 1 : 0) + (use_onset ? 1 : 0);
  }

  std::vector<std::string> column_names() const {
    std::vector<std::string> names;
    for (int c : sst_columns) names.push_back(sst_column_name(c));
    if (use_lat) names.push_back("lat");
    if (use_lon) names.push_back("lon");
    if (use_onset) names.push_back("onset");
    return names;
  }
};

/// Raw (unstandardized) dry-spell design row for one (pixel, year).
/// `onset_day` supplies either the true or the predicted onset.
inline void dryspell_design_row(const DryspellDesignSpec& spec, const SstPanel& panel,
                                int panel_year_idx, const GridSpec& grid, PixelId p,
                                double onset_day, Eigen::Ref<Eigen::RowVectorXd> out) {
  int k = 0;
  for (int col : spec.sst_columns) {
    panel.require_column(panel_year_idx, col);
    out(k++) = panel.at(panel_year_idx, col);
  }
  const auto [lat, lon] = pixel_coords(p, grid);
  if (spec.use_lat) out(k++) = lat;
  if (spec.use_lon) out(k++) = lon;
  if (spec.use_onset) out(k++) = onset_day;
}

// The proportion regressor's two predictor columns.
struct ProportionDesignSpec {
  std::array<int, 2> columns = {
      sst_column(OceanRegion::GulfOfGuinea, SstMonth::Oct),
      sst_column(OceanRegion::Mediterranean, SstMonth::Sep)};
};

/// Per-year proportion design: X rows are the two SST predictors, y is the
/// fraction of pixels with a dry spell that year.
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> build_proportion_design(
    const SstPanel& panel, const LabelSet& labels,
    std::span<const int> year_idx, const ProportionDesignSpec& spec = {}) {
  const Eigen::Index n = static_cast<Eigen::Index>(year_idx.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int yi = year_idx[i];
    const int row = panel.year_index(labels.years()[yi]);
    for (int k = 0; k < 2; ++k) {
      panel.require_column(row, spec.columns[k]);
      X(i, k) = panel.at(row, spec.columns[k]);
    }
    int count = 0;
    for (PixelId p = 0; p < labels.n_pixels(); ++p) {
      const auto d = labels.dry_spell(p, yi);
      if (!d) throw ParseError("build_proportion_design: undefined dry-spell label");
      count += *d;
    }
    y(i) = static_cast<double>(count) / labels.n_pixels();
  }
  return {std::move(X), std::move(y)};
}

}  // namespace wam
