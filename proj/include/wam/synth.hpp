#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wam/errors.hpp"
#include "wam/features.hpp"
#include "wam/grid.hpp"
#include "wam/labeling.hpp"
#include "wam/rng.hpp"

namespace wam {

// Synthetic climate with planted ground truth. Onsets follow a smooth
// north gradient plus a linear two-column SST teleconnection plus noise;
// rainfall is constructed so the default labeling rules recover the
// planted onset and dry-spell flag exactly. Defaults give teleconnection
// R^2 = 0.5 (signal variance a^2 + b^2 = 72 against noise variance 72).
struct SynthConfig {
  GridSpec grid{8.0, -12.0, 8, 28, 1.0};
  int years = 20;
  int first_year = 2001;
  CubeSource source = CubeSource::observed;

  double base_onset_min = 120.0;  // southernmost row
  double base_onset_max = 180.0;  // northernmost row
  int sst1_column = sst_column(OceanRegion::GulfOfGuinea, SstMonth::Sep);
  int sst2_column = sst_column(OceanRegion::Pacific, SstMonth::Sep);
  double a = 6.0;    // days per degree C on sst1 anomalies
  double b = -6.0;   // days per degree C on sst2 anomalies
  double onset_noise_std = 8.48528137423857;  // sqrt(72)
  double sst_noise_std = 1.0;

  double rain_intensity = 5.2;   // burst mm/day; see feasibility note below
  double post_onset_rain = 2.0;  // steady mm/day through onset+30
  bool showers = true;           // sparse sub-threshold pre-season showers
  double shower_max = 3.0;
  int shower_period = 7;

  // dry-spell plant rule: Bernoulli(sigmoid(w0 + w_ind*z_ind + w_gog*z_gog
  // + w_lat*z_lat)) on standardized October SST anomalies and latitude
  double ds_w0 = -1.0;
  double ds_w_ind = 1.5;
  double ds_w_gog = -1.5;
  double ds_w_lat = 1.0;

  std::uint64_t seed = 42;
};

struct SynthTruth {
  std::vector<int> years;
  Eigen::MatrixXi onset;  // years x pixels, planted day-of-year
  Eigen::MatrixXi dry;    // years x pixels, planted flag
  int sst1_column = 0;
  int sst2_column = 0;
};

struct SynthDataset {
  DailyPrecipCube cube;
  SstPanel panel;
  SynthTruth truth;
};

namespace detail {

// Region-mean SSTs in degrees C; arbitrary plausible values, constant per
// region so anomalies are exactly the seeded noise.
constexpr std::array<double, kNumRegions> kRegionMeanSst = {26.0, 12.0, 27.0,
                                                            28.0, 27.0, 21.0};

constexpr std::uint64_t kSstStreamTag = 1;
constexpr std::uint64_t kPixelStreamTag = 2;

inline void check_feasible(const SynthConfig& cfg) {
  cfg.grid.validate();
  if (cfg.years < 1) throw ParseError("synth: need at least 1 year");
  if (cfg.onset_noise_std < 0.0) throw ParseError("synth: negative noise std");
  if (!(cfg.sst_noise_std > 0.0)) throw ParseError("synth: sst_noise_std must be > 0");
  if (cfg.base_onset_min < 60.0 || cfg.base_onset_max > 300.0 ||
      cfg.base_onset_min > cfg.base_onset_max)
    throw ParseError(
        "synth: infeasible config: base onsets must lie in [60, 300] so the "
        "30-day dry-spell window fits inside the year");
  const FuzzyParams fuzzy;
  // the 5-day burst must fire the fuzzy rule on its first day and on no
  // window that only partially overlaps it
  if (gamma1(5.0 * cfg.rain_intensity, fuzzy) * gamma2(5.0, fuzzy) < fuzzy.gamma_t)
    throw ParseError("synth: infeasible config: rain_intensity too low to plant onsets");
  for (int k = 1; k <= 4; ++k)
    if (gamma1(k * cfg.rain_intensity, fuzzy) * gamma2(k, fuzzy) >= fuzzy.gamma_t)
      throw ParseError(
          "synth: infeasible config: rain_intensity so high that partial burst "
          "windows qualify before the planted day");
  const DrySpellParams ds;
  if (cfg.post_onset_rain * ds.spell_len < ds.spell_max_total)
    throw ParseError(
        "synth: infeasible config: post_onset_rain would create unplanted dry spells");
  if (cfg.showers) {
    if (cfg.shower_max >= fuzzy.l1)
      throw ParseError("synth: infeasible config: showers can reach the onset threshold");
    if (cfg.shower_period < 6)
      throw ParseError("synth: infeasible config: shower_period must be >= 6 so no "
                       "5-day window holds two showers");
  }
}

}  // namespace detail

/// Deterministic synthetic dataset for a config: rainfall cube, full
/// 42-column SST panel, and the planted truth. One RNG substream per SST
/// region and per pixel, so outputs do not depend on scheduling.
inline SynthDataset generate(const SynthConfig& cfg) {
  detail::check_feasible(cfg);
  const int P = cfg.grid.pixel_count();
  const int Y = cfg.years;

  std::vector<int> years(Y);
  for (int t = 0; t < Y; ++t) years[t] = cfg.first_year + t;

  SynthDataset out;
  out.panel = SstPanel::empty(years);
  for (int region = 0; region < kNumRegions; ++region) {
    SplitMix64 rng = SplitMix64::substream(cfg.seed, detail::kSstStreamTag,
                                           static_cast<std::uint64_t>(region));
    for (int t = 0; t < Y; ++t)
      for (int m = 0; m < kNumSstMonths; ++m)
        out.panel.values(t, region * kNumSstMonths + m) =
            detail::kRegionMeanSst[region] + cfg.sst_noise_std * rng.next_normal();
  }

  out.truth.years = years;
  out.truth.onset.resize(Y, P);
  out.truth.dry.resize(Y, P);
  out.truth.sst1_column = cfg.sst1_column;
  out.truth.sst2_column = cfg.sst2_column;
  out.cube = DailyPrecipCube::zeros(years, P, cfg.source);

  const int ind_oct = sst_column(OceanRegion::Indian, SstMonth::Oct);
  const int gog_oct = sst_column(OceanRegion::GulfOfGuinea, SstMonth::Oct);
  const double row_mean = (cfg.grid.n_rows - 1) / 2.0;
  double row_sd = 0.0;
  for (int r = 0; r < cfg.grid.n_rows; ++r)
    row_sd += (r - row_mean) * (r - row_mean);
  row_sd = std::sqrt(row_sd / cfg.grid.n_rows);

  auto anomaly = [&](int t, int col) {
    return (out.panel.values(t, col) -
            detail::kRegionMeanSst[col / kNumSstMonths]) /
           cfg.sst_noise_std;
  };

  for (PixelId p = 0; p < P; ++p) {
    SplitMix64 rng = SplitMix64::substream(cfg.seed, detail::kPixelStreamTag,
                                           static_cast<std::uint64_t>(p));
    const int row = pixel_row(p, cfg.grid);
    const double base =
        cfg.grid.n_rows == 1
            ? cfg.base_onset_min
            : cfg.base_onset_min + (cfg.base_onset_max - cfg.base_onset_min) * row /
                                       (cfg.grid.n_rows - 1);
    const double z_lat = row_sd == 0.0 ? 0.0 : (row - row_mean) / row_sd;

    for (int t = 0; t < Y; ++t) {
      const double noise = cfg.onset_noise_std * rng.next_normal();
      const double u_dry = rng.next_double();

      const double s1 = out.panel.values(t, cfg.sst1_column) -
                        detail::kRegionMeanSst[cfg.sst1_column / kNumSstMonths];
      const double s2 = out.panel.values(t, cfg.sst2_column) -
                        detail::kRegionMeanSst[cfg.sst2_column / kNumSstMonths];
      const int onset = static_cast<int>(std::clamp(
          std::llround(base + cfg.a * s1 + cfg.b * s2 + noise), 60LL, 300LL));

      const double logit = cfg.ds_w0 + cfg.ds_w_ind * anomaly(t, ind_oct) +
                           cfg.ds_w_gog * anomaly(t, gog_oct) + cfg.ds_w_lat * z_lat;
      const int dry = u_dry < 1.0 / (1.0 + std::exp(-logit)) ? 1 : 0;

      out.truth.onset(t, p) = onset;
      out.truth.dry(t, p) = dry;

      auto series = out.cube.series(t, p);
      for (int d = onset; d <= onset + 4; ++d) series[d - 1] = cfg.rain_intensity;
      const int post_end = std::min(onset + 30, kDaysPerYear);
      for (int d = onset + 5; d <= post_end; ++d) series[d - 1] = cfg.post_onset_rain;
      if (dry == 1)
        for (int d = onset + 5; d <= std::min(onset + 14, kDaysPerYear); ++d)
          series[d - 1] = 0.0;
      if (cfg.showers) {
        // isolated sub-threshold showers, none closer than 10 days before
        // the planted onset so no partial window can qualify early
        for (int d = onset - 10; d >= 8; d -= cfg.shower_period) {
          const double amount = 0.5 + rng.next_double() * (cfg.shower_max - 0.5);
          series[d - 1] = amount;
        }
      }
    }
  }
  return out;
}

struct SkillBound {
  double temporal_r = 0.0;  // sqrt(Var_signal / (Var_signal + Var_noise))
  double mae_days = 0.0;    // half-normal mean of the onset noise
};

/// Reference bounds for acceptance tests on a synthetic dataset.
inline SkillBound expected_skill_bound(const SynthConfig& cfg) {
  const double var_signal =
      (cfg.a * cfg.a + cfg.b * cfg.b) * cfg.sst_noise_std * cfg.sst_noise_std;
  const double var_noise = cfg.onset_noise_std * cfg.onset_noise_std;
  if (var_signal + var_noise <= 0.0)
    throw NumericError("expected_skill_bound: degenerate variances");
  SkillBound bound;
  bound.temporal_r = std::sqrt(var_signal / (var_signal + var_noise));
  bound.mae_days = cfg.onset_noise_std * std::sqrt(2.0 / 3.14159265358979323846);
  return bound;
}

}  // namespace wam
