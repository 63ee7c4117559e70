#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wam/errors.hpp"

namespace wam {

constexpr int kDaysPerYear = 365;  // fixed-length years; Feb 29 dropped at ingestion

// Regular lat/lon grid, cell-center registered. Row 0 is the southernmost
// row; pixel ids are row-major: flat = row * n_cols + col.
struct GridSpec {
  double lat_min = 0.0;  // southern edge of the grid, degrees
  double lon_min = 0.0;  // western edge of the grid, degrees
  int n_rows = 0;
  int n_cols = 0;
  double resolution = 1.0;  // degrees per cell, both axes

  int pixel_count() const { return n_rows * n_cols; }

  void validate() const {
    if (n_rows < 1 || n_cols < 1)
      throw ParseError("GridSpec: n_rows and n_cols must be >= 1");
    if (!(resolution > 0.0))
      throw ParseError("GridSpec: resolution must be > 0");
    if (!std::isfinite(lat_min) || !std::isfinite(lon_min))
      throw ParseError("GridSpec: non-finite origin");
  }

  bool operator==(const GridSpec&) const = default;
};

using PixelId = int;

inline int pixel_row(PixelId id, const GridSpec& spec) { return id / spec.n_cols; }
inline int pixel_col(PixelId id, const GridSpec& spec) { return id % spec.n_cols; }
inline PixelId pixel_id(int row, int col, const GridSpec& spec) {
  return row * spec.n_cols + col;
}

/// Cell-center coordinates (lat, lon) of a pixel.
inline std::pair<double, double> pixel_coords(PixelId id, const GridSpec& spec) {
  if (id < 0 || id >= spec.pixel_count())
    throw ParseError("pixel_coords: pixel id " + std::to_string(id) +
                     " out of range for " + std::to_string(spec.pixel_count()) +
                     " pixels");
  const int row = pixel_row(id, spec);
  const int col = pixel_col(id, spec);
  return {spec.lat_min + (row + 0.5) * spec.resolution,
          spec.lon_min + (col + 0.5) * spec.resolution};
}

// Unordered 4-neighborhood pixel pairs. Each pair is stored once with
// first < second.
struct Adjacency {
  std::vector<std::pair<PixelId, PixelId>> pairs;

  std::size_t size() const { return pairs.size(); }
};

/// Edge set of the grid graph: n_rows*(n_cols-1) + n_cols*(n_rows-1) pairs.
inline Adjacency build_adjacency(const GridSpec& spec) {
  spec.validate();
  Adjacency adj;
  adj.pairs.reserve(static_cast<std::size_t>(spec.n_rows) * (spec.n_cols - 1) +
                    static_cast<std::size_t>(spec.n_cols) * (spec.n_rows - 1));
  for (int row = 0; row < spec.n_rows; ++row) {
    for (int col = 0; col < spec.n_cols; ++col) {
      const PixelId id = pixel_id(row, col, spec);
      if (col + 1 < spec.n_cols) adj.pairs.emplace_back(id, id + 1);
      if (row + 1 < spec.n_rows) adj.pairs.emplace_back(id, id + spec.n_cols);
    }
  }
  return adj;
}

enum class CubeSource { observed, simulated };

// Daily rainfall in mm, dense over (year, day 1..365, pixel). The per-pixel
// day series is contiguous so labeling can scan one (pixel, year) at a time.
struct DailyPrecipCube {
  std::vector<int> years;  // calendar years, ascending
  int n_pixels = 0;
  CubeSource source = CubeSource::observed;
  std::vector<double> values;  // [year][pixel][day]

  int n_years() const { return static_cast<int>(years.size()); }

  double& at(int year_idx, PixelId pixel, int day) {
    return values[(static_cast<std::size_t>(year_idx) * n_pixels + pixel) *
                      kDaysPerYear +
                  (day - 1)];
  }
  double at(int year_idx, PixelId pixel, int day) const {
    return values[(static_cast<std::size_t>(year_idx) * n_pixels + pixel) *
                      kDaysPerYear +
                  (day - 1)];
  }

  /// One year of daily rainfall for one pixel (days 1..365).
  std::span<const double> series(int year_idx, PixelId pixel) const {
    return {values.data() +
                (static_cast<std::size_t>(year_idx) * n_pixels + pixel) *
                    kDaysPerYear,
            kDaysPerYear};
  }
  std::span<double> series(int year_idx, PixelId pixel) {
    return {values.data() +
                (static_cast<std::size_t>(year_idx) * n_pixels + pixel) *
                    kDaysPerYear,
            kDaysPerYear};
  }

  int year_index(int year) const {
    for (int i = 0; i < n_years(); ++i)
      if (years[i] == year) return i;
    throw ParseError("DailyPrecipCube: year " + std::to_string(year) +
                     " not present");
  }

  void validate() const {
    if (years.empty()) throw ParseError("DailyPrecipCube: no years");
    if (values.size() != static_cast<std::size_t>(n_years()) * n_pixels * kDaysPerYear)
      throw ParseError("DailyPrecipCube: value buffer size mismatch");
    for (double v : values)
      if (!std::isfinite(v) || v < 0.0)
        throw ParseError("DailyPrecipCube: rainfall values must be finite and >= 0");
  }

  static DailyPrecipCube zeros(std::vector<int> years_, int n_pixels_,
                               CubeSource source_ = CubeSource::observed) {
    DailyPrecipCube cube;
    cube.years = std::move(years_);
    cube.n_pixels = n_pixels_;
    cube.source = source_;
    cube.values.assign(
        static_cast<std::size_t>(cube.n_years()) * n_pixels_ * kDaysPerYear, 0.0);
    return cube;
  }
};

namespace detail {

// Bilinear interpolation weights of one point against a cell-center grid
// axis: returns (lower index, fraction toward lower+1).
inline std::pair<int, double> axis_locate(double coord, double center0,
                                          double resolution, int n) {
  const double u = (coord - center0) / resolution;
  if (u < -1e-9 || u > n - 1 + 1e-9) return {-1, 0.0};
  double clamped = u < 0.0 ? 0.0 : (u > n - 1 ? static_cast<double>(n - 1) : u);
  int lo = static_cast<int>(std::floor(clamped));
  if (lo > n - 2) lo = n - 2;  // keep lo+1 in range; frac becomes 1
  return {lo, clamped - lo};
}

}  // namespace detail

/// Regrid a fine-resolution cube onto a coarser grid by bilinear
/// interpolation of the four fine cell-center values around each coarse
/// cell center.
inline DailyPrecipCube regrid_bilinear(const DailyPrecipCube& fine,
                                       const GridSpec& fine_spec,
                                       const GridSpec& coarse_spec) {
  fine_spec.validate();
  coarse_spec.validate();
  if (fine.n_pixels != fine_spec.pixel_count())
    throw ParseError("regrid_bilinear: cube does not match fine grid spec");
  if (fine_spec.n_rows < 2 || fine_spec.n_cols < 2)
    throw ParseError("regrid_bilinear: fine grid must be at least 2x2");

  const double lat0 = fine_spec.lat_min + 0.5 * fine_spec.resolution;
  const double lon0 = fine_spec.lon_min + 0.5 * fine_spec.resolution;

  struct Stencil {
    int idx[4];
    double w[4];
  };
  std::vector<Stencil> stencils(coarse_spec.pixel_count());
  for (PixelId p = 0; p < coarse_spec.pixel_count(); ++p) {
    const auto [lat, lon] = pixel_coords(p, coarse_spec);
    const auto [r0, fr] =
        detail::axis_locate(lat, lat0, fine_spec.resolution, fine_spec.n_rows);
    const auto [c0, fc] =
        detail::axis_locate(lon, lon0, fine_spec.resolution, fine_spec.n_cols);
    if (r0 < 0 || c0 < 0)
      throw ParseError("regrid_bilinear: coarse pixel " + std::to_string(p) +
                       " center lies outside the fine grid hull");
    Stencil& s = stencils[p];
    s.idx[0] = pixel_id(r0, c0, fine_spec);
    s.idx[1] = pixel_id(r0, c0 + 1, fine_spec);
    s.idx[2] = pixel_id(r0 + 1, c0, fine_spec);
    s.idx[3] = pixel_id(r0 + 1, c0 + 1, fine_spec);
    s.w[0] = (1.0 - fr) * (1.0 - fc);
    s.w[1] = (1.0 - fr) * fc;
    s.w[2] = fr * (1.0 - fc);
    s.w[3] = fr * fc;
  }

  DailyPrecipCube out =
      DailyPrecipCube::zeros(fine.years, coarse_spec.pixel_count(), fine.source);
  for (int yi = 0; yi < fine.n_years(); ++yi) {
    for (PixelId p = 0; p < coarse_spec.pixel_count(); ++p) {
      const Stencil& s = stencils[p];
      auto dst = out.series(yi, p);
      const double* src = fine.values.data() +
                          static_cast<std::size_t>(yi) * fine.n_pixels * kDaysPerYear;
      for (int d = 0; d < kDaysPerYear; ++d) {
        dst[d] = s.w[0] * src[static_cast<std::size_t>(s.idx[0]) * kDaysPerYear + d] +
                 s.w[1] * src[static_cast<std::size_t>(s.idx[1]) * kDaysPerYear + d] +
                 s.w[2] * src[static_cast<std::size_t>(s.idx[2]) * kDaysPerYear + d] +
                 s.w[3] * src[static_cast<std::size_t>(s.idx[3]) * kDaysPerYear + d];
      }
    }
  }
  return out;
}

}  // namespace wam
