#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "wam/errors.hpp"
#include "wam/features.hpp"
#include "wam/grid.hpp"
#include "wam/labeling.hpp"
#include "wam/pipeline.hpp"
#include "wam/synth.hpp"
#include "wam/util.hpp"
#include "wam/verify.hpp"

namespace wam {

constexpr int kFormatVersion = 1;

// Provenance stamped into every output file: a '#' (CSV) or '//' (JSON)
// comment block carrying the format version and the checksums of the
// inputs the file was derived from.
struct FileMeta {
  std::string kind;
  std::vector<std::pair<std::string, std::uint64_t>> inputs;

  std::string comment_block(std::string_view prefix) const {
    std::string s;
    s += std::string(prefix) + " wamcast " + kind + " format v" +
         std::to_string(kFormatVersion) + "\n";
    for (const auto& [name, sum] : inputs) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%016llx",
                    static_cast<unsigned long long>(sum));
      s += std::string(prefix) + " input " + name + " fnv1a=" + buf + "\n";
    }
    return s;
  }
};

namespace io {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ParseError("short write: " + path);
}

/// Shortest round-trip decimal form of a double.
inline std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}
inline std::string fmt(int v) { return std::to_string(v); }

namespace detail {

inline double parse_double(std::string_view s, const std::string& path, long line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError(path + ":" + std::to_string(line) + ": bad number '" +
                     std::string(s) + "'");
  return v;
}

inline long parse_long(std::string_view s, const std::string& path, long line) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError(path + ":" + std::to_string(line) + ": bad integer '" +
                     std::string(s) + "'");
  return v;
}

// Iterates data rows of a CSV: skips '#' comment lines, checks the header
// row, splits fields, and reports line numbers in errors.
class CsvReader {
 public:
  CsvReader(std::string_view content, std::string path, std::string_view header)
      : content_(content), path_(std::move(path)) {
    std::string_view first;
    while (next_raw(first)) {
      if (first.empty() || first.front() == '#') continue;
      if (first != header)
        throw ParseError(path_ + ":" + std::to_string(line_) +
                         ": expected header '" + std::string(header) + "', got '" +
                         std::string(first) + "'");
      return;
    }
    throw ParseError(path_ + ": missing header row");
  }

  /// Next data row split on commas; false at end of file.
  bool next(std::vector<std::string_view>& fields) {
    std::string_view row;
    while (next_raw(row)) {
      if (row.empty() || row.front() == '#') continue;
      fields.clear();
      std::size_t start = 0;
      while (true) {
        const std::size_t comma = row.find(',', start);
        if (comma == std::string_view::npos) {
          fields.push_back(row.substr(start));
          break;
        }
        fields.push_back(row.substr(start, comma - start));
        start = comma + 1;
      }
      return true;
    }
    return false;
  }

  long line() const { return line_; }
  const std::string& path() const { return path_; }

 private:
  bool next_raw(std::string_view& out) {
    if (pos_ >= content_.size()) return false;
    const std::size_t nl = content_.find('\n', pos_);
    const std::size_t end = nl == std::string_view::npos ? content_.size() : nl;
    out = content_.substr(pos_, end - pos_);
    if (!out.empty() && out.back() == '\r') out.remove_suffix(1);
    pos_ = end + 1;
    ++line_;
    return true;
  }

  std::string_view content_;
  std::string path_;
  std::size_t pos_ = 0;
  long line_ = 0;
};

}  // namespace detail

// ---- grid manifest (JSON) ----

inline std::string write_grid_manifest(const GridSpec& spec, const FileMeta& meta) {
  nlohmann::json j;
  j["lat_min"] = spec.lat_min;
  j["lon_min"] = spec.lon_min;
  j["n_rows"] = spec.n_rows;
  j["n_cols"] = spec.n_cols;
  j["resolution"] = spec.resolution;
  return meta.comment_block("//") + j.dump(2) + "\n";
}

inline GridSpec parse_grid_manifest(const std::string& content, const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(content, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  GridSpec spec;
  try {
    spec.lat_min = j.at("lat_min").get<double>();
    spec.lon_min = j.at("lon_min").get<double>();
    spec.n_rows = j.at("n_rows").get<int>();
    spec.n_cols = j.at("n_cols").get<int>();
    spec.resolution = j.at("resolution").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  spec.validate();
  return spec;
}

inline std::uint64_t grid_hash(const GridSpec& spec) {
  return fnv1a(fmt(spec.lat_min) + "," + fmt(spec.lon_min) + "," +
               std::to_string(spec.n_rows) + "," + std::to_string(spec.n_cols) + "," +
               fmt(spec.resolution));
}

// ---- precipitation (CSV: pixel_id,year,doy,prcp_mm; dense) ----

inline std::string write_precip_csv(const DailyPrecipCube& cube, const FileMeta& meta) {
  std::string s = meta.comment_block("#");
  s += "pixel_id,year,doy,prcp_mm\n";
  for (PixelId p = 0; p < cube.n_pixels; ++p)
    for (int yi = 0; yi < cube.n_years(); ++yi) {
      const auto series = cube.series(yi, p);
      for (int d = 1; d <= kDaysPerYear; ++d) {
        s += std::to_string(p);
        s += ',';
        s += std::to_string(cube.years[yi]);
        s += ',';
        s += std::to_string(d);
        s += ',';
        s += fmt(series[d - 1]);
        s += '\n';
      }
    }
  return s;
}

inline DailyPrecipCube parse_precip_csv(const std::string& content,
                                        const std::string& path, int n_pixels,
                                        CubeSource source) {
  detail::CsvReader reader(content, path, "pixel_id,year,doy,prcp_mm");
  struct Row {
    int pixel, year, doy;
    double mm;
  };
  std::vector<Row> rows;
  std::vector<std::string_view> f;
  std::vector<int> years;
  while (reader.next(f)) {
    if (f.size() != 4)
      throw ParseError(path + ":" + std::to_string(reader.line()) +
                       ": expected 4 fields");
    Row r;
    r.pixel = static_cast<int>(detail::parse_long(f[0], path, reader.line()));
    r.year = static_cast<int>(detail::parse_long(f[1], path, reader.line()));
    r.doy = static_cast<int>(detail::parse_long(f[2], path, reader.line()));
    r.mm = detail::parse_double(f[3], path, reader.line());
    if (r.pixel < 0 || r.pixel >= n_pixels)
      throw ParseError(path + ":" + std::to_string(reader.line()) +
                       ": pixel_id out of range");
    if (r.doy < 1 || r.doy > kDaysPerYear)
      throw ParseError(path + ":" + std::to_string(reader.line()) +
                       ": doy out of range");
    if (!(r.mm >= 0.0) || !std::isfinite(r.mm))
      throw ParseError(path + ":" + std::to_string(reader.line()) +
                       ": rainfall must be finite and >= 0");
    if (years.empty() || years.back() != r.year) years.push_back(r.year);
    rows.push_back(r);
  }
  std::sort(years.begin(), years.end());
  years.erase(std::unique(years.begin(), years.end()), years.end());
  if (years.empty()) throw ParseError(path + ": no data rows");

  DailyPrecipCube cube = DailyPrecipCube::zeros(years, n_pixels, source);
  std::vector<std::uint8_t> seen(cube.values.size(), 0);
  for (const Row& r : rows) {
    const int yi = cube.year_index(r.year);
    const std::size_t idx =
        (static_cast<std::size_t>(yi) * n_pixels + r.pixel) * kDaysPerYear +
        (r.doy - 1);
    if (seen[idx])
      throw ParseError(path + ": duplicate row for pixel " + std::to_string(r.pixel) +
                       ", year " + std::to_string(r.year) + ", doy " +
                       std::to_string(r.doy));
    seen[idx] = 1;
    cube.values[idx] = r.mm;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw ParseError(path + ": dataset is not dense (missing pixel/year/doy rows)");
  return cube;
}

// ---- SST panel (CSV: region,year,month,sst_c; year is the monsoon year) ----

inline std::string write_sst_csv(const SstPanel& panel, const FileMeta& meta) {
  std::string s = meta.comment_block("#");
  s += "region,year,month,sst_c\n";
  for (int yi = 0; yi < panel.n_years(); ++yi)
    for (int c = 0; c < kNumSstColumns; ++c) {
      const double v = panel.values(yi, c);
      if (!std::isfinite(v)) continue;
      s += kRegionNames[c / kNumSstMonths];
      s += ',';
      s += std::to_string(panel.years[yi]);
      s += ',';
      s += kSstMonthNames[c % kNumSstMonths];
      s += ',';
      s += fmt(v);
      s += '\n';
    }
  return s;
}

inline SstPanel parse_sst_csv(const std::string& content, const std::string& path) {
  detail::CsvReader reader(content, path, "region,year,month,sst_c");
  struct Row {
    int col, year;
    double v;
  };
  std::vector<Row> rows;
  std::vector<int> years;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    if (f.size() != 4)
      throw ParseError(path + ":" + std::to_string(reader.line()) +
                       ": expected 4 fields");
    const auto region = parse_region(std::string(f[0]));
    if (!region)
      throw ParseError(path + ":" + std::to_string(reader.line()) +
                       ": unknown region '" + std::string(f[0]) + "'");
    const auto month = parse_sst_month(std::string(f[2]));
    if (!month)
      throw ParseError(path + ":" + std::to_string(reader.line()) +
                       ": unknown month '" + std::string(f[2]) + "'");
    Row r;
    r.col = sst_column(*region, *month);
    r.year = static_cast<int>(detail::parse_long(f[1], path, reader.line()));
    r.v = detail::parse_double(f[3], path, reader.line());
    if (!std::isfinite(r.v))
      throw ParseError(path + ":" + std::to_string(reader.line()) +
                       ": non-finite SST");
    rows.push_back(r);
    years.push_back(r.year);
  }
  std::sort(years.begin(), years.end());
  years.erase(std::unique(years.begin(), years.end()), years.end());
  if (years.empty()) throw ParseError(path + ": no data rows");
  SstPanel panel = SstPanel::empty(years);
  for (const Row& r : rows) {
    const int yi = panel.year_index(r.year);
    if (std::isfinite(panel.values(yi, r.col)))
      throw ParseError(path + ": duplicate SST entry for " + sst_column_name(r.col) +
                       ", year " + std::to_string(r.year));
    panel.values(yi, r.col) = r.v;
  }
  return panel;
}

// ---- labels (CSV; pixel-major, year ascending) ----

inline std::string write_labels_csv(const LabelSet& labels, const FileMeta& meta) {
  std::string s = meta.comment_block("#");
  s += "pixel_id,year,search_start_doy,onset_doy,filled,dry_spell\n";
  for (PixelId p = 0; p < labels.n_pixels(); ++p)
    for (int yi = 0; yi < labels.n_years(); ++yi) {
      s += std::to_string(p);
      s += ',';
      s += std::to_string(labels.years()[yi]);
      s += ',';
      s += std::to_string(labels.search_start(p, yi));
      s += ',';
      s += std::to_string(labels.onset(p, yi).value_or(-1));
      s += ',';
      s += std::to_string(labels.filled(p, yi) ? 1 : 0);
      s += ',';
      s += std::to_string(labels.dry_spell(p, yi).value_or(-1));
      s += '\n';
    }
  return s;
}

inline LabelSet parse_labels_csv(const std::string& content, const std::string& path,
                                 int n_pixels) {
  detail::CsvReader reader(
      content, path, "pixel_id,year,search_start_doy,onset_doy,filled,dry_spell");
  struct Row {
    int pixel, year, start, onset, filled, dry;
  };
  std::vector<Row> rows;
  std::vector<int> years;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    if (f.size() != 6)
      throw ParseError(path + ":" + std::to_string(reader.line()) +
                       ": expected 6 fields");
    Row r;
    r.pixel = static_cast<int>(detail::parse_long(f[0], path, reader.line()));
    r.year = static_cast<int>(detail::parse_long(f[1], path, reader.line()));
    r.start = static_cast<int>(detail::parse_long(f[2], path, reader.line()));
    r.onset = static_cast<int>(detail::parse_long(f[3], path, reader.line()));
    r.filled = static_cast<int>(detail::parse_long(f[4], path, reader.line()));
    r.dry = static_cast<int>(detail::parse_long(f[5], path, reader.line()));
    if (r.pixel < 0 || r.pixel >= n_pixels)
      throw ParseError(path + ":" + std::to_string(reader.line()) +
                       ": pixel_id out of range");
    rows.push_back(r);
    years.push_back(r.year);
  }
  std::sort(years.begin(), years.end());
  years.erase(std::unique(years.begin(), years.end()), years.end());
  if (years.empty()) throw ParseError(path + ": no data rows");
  LabelSet labels(n_pixels, years);
  for (const Row& r : rows) {
    const int yi = labels.year_index(r.year);
    labels.set_search_start(r.pixel, yi, r.start);
    labels.set_onset(r.pixel, yi,
                     r.onset < 0 ? std::nullopt : std::optional<int>(r.onset),
                     r.filled != 0);
    labels.set_dry_spell(r.pixel, yi,
                         r.dry < 0 ? std::nullopt : std::optional<int>(r.dry));
  }
  return labels;
}

// ---- synth truth (CSV) ----

inline std::string write_truth_csv(const SynthTruth& truth, const FileMeta& meta) {
  std::string s = meta.comment_block("#");
  s += "pixel_id,year,planted_onset,planted_dryspell\n";
  for (Eigen::Index p = 0; p < truth.onset.cols(); ++p)
    for (Eigen::Index t = 0; t < truth.onset.rows(); ++t) {
      s += std::to_string(p);
      s += ',';
      s += std::to_string(truth.years[t]);
      s += ',';
      s += std::to_string(truth.onset(t, p));
      s += ',';
      s += std::to_string(truth.dry(t, p));
      s += '\n';
    }
  return s;
}

// ---- per-pixel map (CSV: pixel_id,lat,lon,value) ----

inline std::string write_map_csv(const Eigen::VectorXd& values, const GridSpec& grid,
                                 const FileMeta& meta) {
  std::string s = meta.comment_block("#");
  s += "pixel_id,lat,lon,value\n";
  for (PixelId p = 0; p < grid.pixel_count(); ++p) {
    const auto [lat, lon] = pixel_coords(p, grid);
    s += std::to_string(p);
    s += ',';
    s += fmt(lat);
    s += ',';
    s += fmt(lon);
    s += ',';
    s += std::isfinite(values(p)) ? fmt(values(p)) : std::string("nan");
    s += '\n';
  }
  return s;
}

// ---- predictions (CSV) ----

inline std::string write_onset_predictions_csv(const std::vector<int>& days, int year,
                                               const FileMeta& meta) {
  std::string s = meta.comment_block("#");
  s += "# monsoon year " + std::to_string(year) + "\n";
  s += "pixel_id,onset_pred_doy\n";
  for (std::size_t p = 0; p < days.size(); ++p) {
    s += std::to_string(p);
    s += ',';
    s += std::to_string(days[p]);
    s += '\n';
  }
  return s;
}

inline std::string write_dryspell_predictions_csv(const DrySpellPrediction& pred,
                                                  int year, const FileMeta& meta) {
  std::string s = meta.comment_block("#");
  s += "# monsoon year " + std::to_string(year) + "\n";
  s += "pixel_id,probability,threshold,label,p_hat\n";
  for (std::size_t p = 0; p < pred.probabilities.size(); ++p) {
    s += std::to_string(p);
    s += ',';
    s += fmt(pred.probabilities[p]);
    s += ',';
    s += std::isfinite(pred.threshold) ? fmt(pred.threshold) : std::string("inf");
    s += ',';
    s += std::to_string(pred.labels[p]);
    s += ',';
    s += fmt(pred.p_hat);
    s += '\n';
  }
  return s;
}

// ---- model persistence (JSON) ----

namespace detail {

inline nlohmann::json fit_config_json(const FitConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"beta1", c.beta1},
          {"beta2", c.beta2},                 {"epsilon", c.epsilon},
          {"epochs", c.epochs},               {"batch_size", c.batch_size},
          {"seed", c.seed},                   {"tolerance", c.tolerance},
          {"cosine_decay", c.cosine_decay}};
}

inline FitConfig fit_config_from_json(const nlohmann::json& j) {
  FitConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.tolerance = j.at("tolerance").get<double>();
  c.cosine_decay = j.at("cosine_decay").get<bool>();
  return c;
}

inline nlohmann::json grid_json(const GridSpec& g) {
  return {{"lat_min", g.lat_min},
          {"lon_min", g.lon_min},
          {"n_rows", g.n_rows},
          {"n_cols", g.n_cols},
          {"resolution", g.resolution}};
}

inline GridSpec grid_from_json(const nlohmann::json& j) {
  GridSpec g;
  g.lat_min = j.at("lat_min").get<double>();
  g.lon_min = j.at("lon_min").get<double>();
  g.n_rows = j.at("n_rows").get<int>();
  g.n_cols = j.at("n_cols").get<int>();
  g.resolution = j.at("resolution").get<double>();
  g.validate();
  return g;
}

inline nlohmann::json parse_json(const std::string& content, const std::string& path) {
  try {
    return nlohmann::json::parse(content, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void check_version(const nlohmann::json& j, const std::string& path,
                          const char* kind) {
  if (!j.contains("format_version") ||
      j.at("format_version").get<int>() != kFormatVersion)
    throw ParseError(path + ": format version mismatch (expected v" +
                     std::to_string(kFormatVersion) + ")");
  if (!j.contains("kind") || j.at("kind").get<std::string>() != kind)
    throw ParseError(path + ": expected a '" + std::string(kind) + "' file");
}

}  // namespace detail

inline std::string write_onset_model(const OnsetModel& m, const FileMeta& meta) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "onset_model";
  j["grid"] = detail::grid_json(m.grid);
  j["grid_hash"] = grid_hash(m.grid);
  j["lambda"] = m.lambda;
  j["fit_config"] = detail::fit_config_json(m.config);
  j["selection_month"] = kSstMonthNames[static_cast<int>(m.selection.month)];
  j["converged"] = m.converged;
  j["final_loss"] = m.loss_history.empty() ? 0.0 : m.loss_history.back();
  nlohmann::json pixels = nlohmann::json::array();
  for (int p = 0; p < m.n_pixels(); ++p) {
    nlohmann::json jp;
    jp["columns"] = m.selection.columns[p];
    jp["correlations"] = m.selection.correlations[p];
    jp["predictor_mean"] = {m.predictor_std[p][0].mean, m.predictor_std[p][1].mean};
    jp["predictor_sd"] = {m.predictor_std[p][0].sd, m.predictor_std[p][1].sd};
    jp["target_mean"] = m.target_std[p].mean;
    jp["target_sd"] = m.target_std[p].sd;
    jp["coeffs"] = {m.coeffs(p, 0), m.coeffs(p, 1), m.coeffs(p, 2)};
    jp["residual_variance"] = m.residual_variance(p);
    pixels.push_back(std::move(jp));
  }
  j["pixels"] = std::move(pixels);
  return meta.comment_block("//") + j.dump(2) + "\n";
}

inline OnsetModel parse_onset_model(const std::string& content, const std::string& path) {
  const nlohmann::json j = detail::parse_json(content, path);
  detail::check_version(j, path, "onset_model");
  OnsetModel m;
  try {
    m.grid = detail::grid_from_json(j.at("grid"));
    m.lambda = j.at("lambda").get<double>();
    m.config = detail::fit_config_from_json(j.at("fit_config"));
    const auto month = parse_sst_month(j.at("selection_month").get<std::string>());
    if (!month) throw ParseError(path + ": bad selection_month");
    m.selection.month = *month;
    m.converged = j.at("converged").get<bool>();
    const auto& pixels = j.at("pixels");
    const int P = static_cast<int>(pixels.size());
    if (P != m.grid.pixel_count())
      throw ParseError(path + ": pixel count does not match grid");
    m.selection.columns.resize(P);
    m.selection.correlations.resize(P);
    m.predictor_std.resize(P);
    m.target_std.resize(P);
    m.coeffs.resize(P, 3);
    m.residual_variance.resize(P);
    for (int p = 0; p < P; ++p) {
      const auto& jp = pixels[p];
      m.selection.columns[p] = {jp.at("columns")[0].get<int>(),
                                jp.at("columns")[1].get<int>()};
      m.selection.correlations[p] = {jp.at("correlations")[0].get<double>(),
                                     jp.at("correlations")[1].get<double>()};
      for (int s = 0; s < 2; ++s)
        m.predictor_std[p][s] = {jp.at("predictor_mean")[s].get<double>(),
                                 jp.at("predictor_sd")[s].get<double>()};
      m.target_std[p] = {jp.at("target_mean").get<double>(),
                         jp.at("target_sd").get<double>()};
      for (int k = 0; k < 3; ++k) m.coeffs(p, k) = jp.at("coeffs")[k].get<double>();
      m.residual_variance(p) = jp.at("residual_variance").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return m;
}

inline std::string write_dryspell_model(const DrySpellModel& m, const FileMeta& meta) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "dryspell_model";
  j["grid"] = detail::grid_json(m.grid);
  j["grid_hash"] = grid_hash(m.grid);
  j["lambda"] = m.lambda;
  j["fit_config"] = detail::fit_config_json(m.config);
  j["design"] = {{"sst_columns", m.design.sst_columns},
                 {"use_lat", m.design.use_lat},
                 {"use_lon", m.design.use_lon},
                 {"use_onset", m.design.use_onset}};
  j["proportion"] = {{"columns", m.prop_design.columns},
                     {"beta0", m.proportion.beta0},
                     {"beta1", {m.proportion.beta1(0), m.proportion.beta1(1)}}};
  j["converged"] = m.converged;
  j["saturated"] = m.saturated;
  j["final_loss"] = m.loss_history.empty() ? 0.0 : m.loss_history.back();
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& s : m.column_std)
    cols.push_back({{"mean", s.mean}, {"sd", s.sd}});
  j["column_std"] = std::move(cols);
  nlohmann::json thetas = nlohmann::json::array();
  for (Eigen::Index p = 0; p < m.thetas.rows(); ++p) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.thetas.cols(); ++k) row.push_back(m.thetas(p, k));
    thetas.push_back(std::move(row));
  }
  j["thetas"] = std::move(thetas);
  return meta.comment_block("//") + j.dump(2) + "\n";
}

inline DrySpellModel parse_dryspell_model(const std::string& content,
                                          const std::string& path) {
  const nlohmann::json j = detail::parse_json(content, path);
  detail::check_version(j, path, "dryspell_model");
  DrySpellModel m;
  try {
    m.grid = detail::grid_from_json(j.at("grid"));
    m.lambda = j.at("lambda").get<double>();
    m.config = detail::fit_config_from_json(j.at("fit_config"));
    m.design.sst_columns = j.at("design").at("sst_columns").get<std::vector<int>>();
    m.design.use_lat = j.at("design").at("use_lat").get<bool>();
    m.design.use_lon = j.at("design").at("use_lon").get<bool>();
    m.design.use_onset = j.at("design").at("use_onset").get<bool>();
    m.prop_design.columns = {j.at("proportion").at("columns")[0].get<int>(),
                             j.at("proportion").at("columns")[1].get<int>()};
    m.proportion.beta0 = j.at("proportion").at("beta0").get<double>();
    m.proportion.beta1 = {j.at("proportion").at("beta1")[0].get<double>(),
                          j.at("proportion").at("beta1")[1].get<double>()};
    m.converged = j.at("converged").get<bool>();
    m.saturated = j.at("saturated").get<bool>();
    for (const auto& jc : j.at("column_std"))
      m.column_std.push_back({jc.at("mean").get<double>(), jc.at("sd").get<double>()});
    if (static_cast<int>(m.column_std.size()) != m.design.width())
      throw ParseError(path + ": column_std does not match design width");
    const auto& thetas = j.at("thetas");
    const int P = static_cast<int>(thetas.size());
    if (P != m.grid.pixel_count())
      throw ParseError(path + ": pixel count does not match grid");
    m.thetas.resize(P, m.design.width() + 1);
    for (int p = 0; p < P; ++p)
      for (int k = 0; k <= m.design.width(); ++k)
        m.thetas(p, k) = thetas[p][k].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return m;
}

// ---- verification report (JSON, 6-decimal fixed precision) ----

namespace detail {

inline nlohmann::json round6(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::round(v * 1e6) / 1e6;
}

inline nlohmann::json round6(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(round6(v(i)));
  return arr;
}

inline nlohmann::json yearly_corr_json(const YearlyCorrelation& c) {
  return {{"per_year", round6(c.r)},
          {"mean", round6(c.mean)},
          {"max", round6(c.max)},
          {"undefined_count", c.undefined_count}};
}

inline nlohmann::json class_metrics_json(const ClassMetrics& m) {
  return {{"precision", round6(m.precision)},
          {"recall", round6(m.recall)},
          {"f1", round6(m.f1)},
          {"support", m.support},
          {"degenerate", m.degenerate}};
}

}  // namespace detail

inline std::string write_report_json(const VerificationReport& rep,
                                     const std::vector<int>& heldout_years,
                                     const FileMeta& meta) {
  using detail::round6;
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "verification_report";
  j["heldout_years"] = heldout_years;
  nlohmann::json onset;
  onset["mae"] = round6(rep.mae_days);
  onset["rmse_spatial_first"] = round6(rep.rmse_spatial_first);
  onset["rmse_temporal_first"] = round6(rep.rmse_temporal_first);
  onset["bias_per_year"] = round6(rep.bias_per_year);
  onset["bias_per_year_std"] = round6(rep.bias_per_year_std);
  onset["bias_per_pixel_std"] = round6(rep.bias_per_pixel_std);
  onset["spatial_correlation"] = detail::yearly_corr_json(rep.spatial_corr);
  onset["anomaly_correlation"] = detail::yearly_corr_json(rep.anomaly_corr);
  onset["temporal"] = {
      {"mean_r", round6(rep.temporal.mean_r)},
      {"frac_significant_90", round6(rep.temporal.frac_significant_90)},
      {"frac_significant_95", round6(rep.temporal.frac_significant_95)},
      {"skill_vs_climatology", round6(rep.temporal.skill)},
      {"undefined_count", rep.temporal.undefined_count}};
  j["onset"] = std::move(onset);
  if (rep.has_dryspell) {
    nlohmann::json ds;
    ds["classification"] = {
        {"class_0", detail::class_metrics_json(rep.classification.cls[0])},
        {"class_1", detail::class_metrics_json(rep.classification.cls[1])},
        {"accuracy", round6(rep.classification.accuracy)},
        {"macro_avg", detail::class_metrics_json(rep.classification.macro_avg)},
        {"weighted_avg", detail::class_metrics_json(rep.classification.weighted_avg)},
        {"total", rep.classification.total}};
    ds["roc_auc"] = round6(rep.roc_auc_value);
    ds["proportion_mae"] = round6(rep.proportion_mae);
    j["dryspell"] = std::move(ds);
  }
  return meta.comment_block("//") + j.dump(2) + "\n";
}

}  // namespace io
}  // namespace wam
