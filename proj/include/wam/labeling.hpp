#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wam/errors.hpp"
#include "wam/grid.hpp"

namespace wam {

// Per-day climatological rainfall for one pixel, plus the cumulative
// anomaly curve whose minimum locates the climatological wet-season start.
struct ClimatologyCurve {
  std::array<double, kDaysPerYear> day_mean{};     // Q_j, mm/day
  double overall_mean = 0.0;                       // mean of Q over 365 days
  std::array<double, kDaysPerYear> cum_anomaly{};  // C(d) = sum_{j<=d} (Q_j - mean)
};

// Fuzzy onset thresholds. gamma1 ramps on the 5-day rainfall total between
// [l1, u1] mm; gamma2 ramps on the wet-day count between [l2, u2] days.
struct FuzzyParams {
  double l1 = 18.0;
  double u1 = 25.0;
  double l2 = 1.0;
  double u2 = 3.0;
  double gamma_t = 0.5;       // onset when gamma1 * gamma2 >= gamma_t
  double wet_day_min = 1.0;   // a day is wet when rainfall >= this, mm

  void validate() const {
    if (!(l1 < u1) || !(l2 < u2))
      throw ParseError("FuzzyParams: require l1 < u1 and l2 < u2");
    if (gamma_t < 0.0 || gamma_t > 1.0)
      throw ParseError("FuzzyParams: gamma_t must be in [0, 1]");
  }
};

// A dry spell is a spell_len-day window totaling under spell_max_total mm,
// fully inside the `window` days following the onset.
struct DrySpellParams {
  int window = 30;
  int spell_len = 7;
  double spell_max_total = 5.0;

  void validate() const {
    if (spell_len < 1) throw ParseError("DrySpellParams: spell_len must be >= 1");
    if (window < 0) throw ParseError("DrySpellParams: window must be >= 0");
    // window < spell_len admits no spell window at all and always yields 0
  }
};

// Ground-truth labels per (pixel, year). Onset and dry-spell values of -1
// mean undefined; `filled` marks onsets replaced by the year's AOI maximum.
class LabelSet {
 public:
  LabelSet() = default;
  LabelSet(int n_pixels, std::vector<int> years)
      : n_pixels_(n_pixels), years_(std::move(years)) {
    const std::size_t n = static_cast<std::size_t>(n_pixels_) * years_.size();
    search_start_.assign(n, 1);
    onset_.assign(n, -1);
    dry_.assign(n, -1);
    filled_.assign(n, 0);
  }

  int n_pixels() const { return n_pixels_; }
  const std::vector<int>& years() const { return years_; }
  int n_years() const { return static_cast<int>(years_.size()); }

  int year_index(int year) const {
    for (int i = 0; i < n_years(); ++i)
      if (years_[i] == year) return i;
    throw ParseError("LabelSet: year " + std::to_string(year) + " not present");
  }

  int search_start(PixelId p, int yi) const { return search_start_[idx(p, yi)]; }
  std::optional<int> onset(PixelId p, int yi) const {
    const int v = onset_[idx(p, yi)];
    return v < 0 ? std::nullopt : std::optional<int>(v);
  }
  bool filled(PixelId p, int yi) const { return filled_[idx(p, yi)] != 0; }
  std::optional<int> dry_spell(PixelId p, int yi) const {
    const int v = dry_[idx(p, yi)];
    return v < 0 ? std::nullopt : std::optional<int>(v);
  }

  void set_search_start(PixelId p, int yi, int day) { search_start_[idx(p, yi)] = day; }
  void set_onset(PixelId p, int yi, std::optional<int> day, bool is_filled = false) {
    onset_[idx(p, yi)] = day.value_or(-1);
    filled_[idx(p, yi)] = is_filled ? 1 : 0;
  }
  void set_dry_spell(PixelId p, int yi, std::optional<int> flag) {
    dry_[idx(p, yi)] = flag.value_or(-1);
  }

  int fill_count() const {
    int n = 0;
    for (auto f : filled_) n += f;
    return n;
  }

  /// Merge two label sets over disjoint year lists (e.g. simulated +
  /// observed). Years are interleaved in ascending order.
  static LabelSet merge(const LabelSet& a, const LabelSet& b) {
    if (a.n_pixels() != b.n_pixels())
      throw ParseError("LabelSet::merge: pixel count mismatch");
    std::vector<int> years = a.years();
    years.insert(years.end(), b.years().begin(), b.years().end());
    std::sort(years.begin(), years.end());
    if (std::adjacent_find(years.begin(), years.end()) != years.end())
      throw ParseError("LabelSet::merge: overlapping years");
    LabelSet out(a.n_pixels(), years);
    for (const LabelSet* src : {&a, &b}) {
      for (int yi = 0; yi < src->n_years(); ++yi) {
        const int oyi = out.year_index(src->years()[yi]);
        for (PixelId p = 0; p < out.n_pixels(); ++p) {
          out.set_search_start(p, oyi, src->search_start(p, yi));
          out.set_onset(p, oyi, src->onset(p, yi), src->filled(p, yi));
          out.set_dry_spell(p, oyi, src->dry_spell(p, yi));
        }
      }
    }
    return out;
  }

 private:
  std::size_t idx(PixelId p, int yi) const {
    return static_cast<std::size_t>(p) * years_.size() + yi;
  }

  int n_pixels_ = 0;
  std::vector<int> years_;
  std::vector<int> search_start_;
  std::vector<int> onset_;
  std::vector<int> dry_;
  std::vector<std::uint8_t> filled_;
};

/// Across-years mean rainfall per calendar day for one pixel, the overall
/// daily mean, and the cumulative anomaly curve C(d).
inline ClimatologyCurve daily_climatology(const DailyPrecipCube& cube, PixelId pixel) {
  if (cube.n_years() < 1) throw ParseError("daily_climatology: empty cube");
  ClimatologyCurve curve;
  const double ny = cube.n_years();
  for (int yi = 0; yi < cube.n_years(); ++yi) {
    const auto s = cube.series(yi, pixel);
    for (int d = 0; d < kDaysPerYear; ++d) curve.day_mean[d] += s[d];
  }
  double total = 0.0;
  for (int d = 0; d < kDaysPerYear; ++d) {
    curve.day_mean[d] /= ny;
    total += curve.day_mean[d];
  }
  curve.overall_mean = total / kDaysPerYear;
  double c = 0.0;
  for (int d = 0; d < kDaysPerYear; ++d) {
    c += curve.day_mean[d] - curve.overall_mean;
    curve.cum_anomaly[d] = c;
  }
  return curve;
}

/// Day after the (earliest) minimum of the cumulative anomaly curve. Can be
/// 366 when the curve is minimal on Dec 31.
inline int wet_season_start(const ClimatologyCurve& curve) {
  int argmin = 0;
  for (int d = 1; d < kDaysPerYear; ++d)
    if (curve.cum_anomaly[d] < curve.cum_anomaly[argmin]) argmin = d;
  return (argmin + 1) + 1;  // day-of-year of the minimum, plus one day
}

/// Onset search begins 30 days before the wet-season start, clamped to day 1.
inline int search_start(int wet_start) { return std::max(1, wet_start - 30); }

/// Fuzzy membership of the 5-day rainfall total.
inline double gamma1(double r, const FuzzyParams& params = {}) {
  if (r < params.l1) return 0.0;
  if (r > params.u1) return 1.0;
  return (r - params.l1) / (params.u1 - params.l1);
}

/// Fuzzy membership of the wet-day count.
inline double gamma2(double d, const FuzzyParams& params = {}) {
  if (d < params.l2) return 0.0;
  if (d > params.u2) return 1.0;
  return (d - params.l2) / (params.u2 - params.l2);
}

/// First day j >= start whose 5-day window [j, j+4] satisfies
/// gamma1(total) * gamma2(wet days) >= gamma_t. Both memberships are
/// evaluated on the same window. Returns nullopt when no day qualifies.
inline std::optional<int> detect_onset(std::span<const double> series, int start,
                                       const FuzzyParams& params = {}) {
  if (series.size() != kDaysPerYear)
    throw ParseError("detect_onset: series must have 365 entries");
  params.validate();
  if (start < 1) throw ParseError("detect_onset: start must be >= 1");
  for (int j = start; j + 4 <= kDaysPerYear; ++j) {
    double total = 0.0;
    int wet = 0;
    for (int k = j - 1; k < j + 4; ++k) {
      total += series[k];
      if (series[k] >= params.wet_day_min) ++wet;
    }
    if (gamma1(total, params) * gamma2(static_cast<double>(wet), params) >=
        params.gamma_t)
      return j;
  }
  return std::nullopt;
}

/// 1 iff some spell_len-day window lying fully inside
/// [onset+1, min(onset+window, 365)] totals less than spell_max_total mm.
inline int detect_dry_spell(std::span<const double> series, int onset,
                            const DrySpellParams& params = {}) {
  if (series.size() != kDaysPerYear)
    throw ParseError("detect_dry_spell: series must have 365 entries");
  params.validate();
  if (onset < 1 || onset > kDaysPerYear)
    throw ParseError("detect_dry_spell: onset undefined or out of range");
  const int lo = onset + 1;
  const int hi = std::min(onset + params.window, kDaysPerYear);
  for (int s = lo; s + params.spell_len - 1 <= hi; ++s) {
    double total = 0.0;
    for (int k = s - 1; k < s + params.spell_len - 1; ++k) total += series[k];
    if (total < params.spell_max_total) return 1;
  }
  return 0;
}

/// Replace every undefined onset in one year with the maximum defined
/// (non-filled) onset of that year across the AOI, marking the fill flag.
/// Dry spells for filled pixels are recomputed against the filled onset.
inline void fill_missing_onsets(LabelSet& labels, int year_idx,
                                const DailyPrecipCube& cube,
                                const DrySpellParams& ds_params = {}) {
  int max_onset = -1;
  for (PixelId p = 0; p < labels.n_pixels(); ++p) {
    const auto o = labels.onset(p, year_idx);
    if (o && !labels.filled(p, year_idx)) max_onset = std::max(max_onset, *o);
  }
  if (max_onset < 0)
    throw NumericError("fill_missing_onsets: no defined onset anywhere in year " +
                       std::to_string(labels.years()[year_idx]));
  for (PixelId p = 0; p < labels.n_pixels(); ++p) {
    if (!labels.onset(p, year_idx)) {
      labels.set_onset(p, year_idx, max_onset, /*is_filled=*/true);
      labels.set_dry_spell(
          p, year_idx, detect_dry_spell(cube.series(year_idx, p), max_onset, ds_params));
    }
  }
}

/// Full labeling pass: per-pixel search start from the whole cube's
/// climatology, onset + dry-spell detection per year, then per-year filling
/// of missing onsets.
inline LabelSet label_dataset(const DailyPrecipCube& cube,
                              const FuzzyParams& fuzzy = {},
                              const DrySpellParams& ds = {}) {
  fuzzy.validate();
  ds.validate();
  if (cube.n_years() < 1) throw ParseError("label_dataset: empty cube");
  LabelSet labels(cube.n_pixels, cube.years);
  for (PixelId p = 0; p < cube.n_pixels; ++p) {
    const auto curve = daily_climatology(cube, p);
    const int start = search_start(wet_season_start(curve));
    for (int yi = 0; yi < cube.n_years(); ++yi) {
      labels.set_search_start(p, yi, start);
      const auto series = cube.series(yi, p);
      const auto onset = detect_onset(series, start, fuzzy);
      labels.set_onset(p, yi, onset);
      if (onset) labels.set_dry_spell(p, yi, detect_dry_spell(series, *onset, ds));
    }
  }
  for (int yi = 0; yi < cube.n_years(); ++yi) fill_missing_onsets(labels, yi, cube, ds);
  return labels;
}

}  // namespace wam
