#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "srecop/types.hpp"

namespace srecop {

struct Bounds {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool contains(const Point& p) const {
    return p.x >= x_min && p.x < x_max && p.y >= y_min && p.y < y_max;
  }
  double diameter(Metric metric, double dist_scale = 1.0) const;
};

/// Metric-correct distance between two points. Euclidean distances are in
/// grid units; great-circle distances use a sphere of radius 6371 km and are
/// returned in kilometers (points are lon/lat decimal degrees).
double distance(const Point& a, const Point& b, Metric metric);

/// Regular tessellation of a rectangle into nx*ny cells, with an optional
/// inclusion mask (coastline-style). Cells are ordered row-major from the
/// lower-left corner; BAU ids are 0..N-1 over the *included* cells in that
/// order, so every matrix built from the grid is reproducible.
class BAUGrid {
 public:
  BAUGrid(const Bounds& bounds, int nx, int ny, Metric metric, double dist_scale = 1.0);

  const Bounds& bounds() const { return bounds_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  Metric metric() const { return metric_; }
  double dist_scale() const { return dist_scale_; }

  Index size() const { return static_cast<Index>(centroids_.size()); }
  const Point& centroid(Index bau) const { return centroids_[static_cast<std::size_t>(bau)]; }
  const std::vector<Point>& centroids() const { return centroids_; }

  /// Raw row-major lattice index of a BAU (differs from the BAU id only when
  /// a mask excluded cells).
  Index cell_of(Index bau) const { return cells_[static_cast<std::size_t>(bau)]; }

  /// BAU id containing p, or -1 if outside the domain or in a masked cell.
  /// Cells are half-open, so boundary points assign to the lower-left cell.
  Index locate(const Point& p) const;

  double distance(const Point& a, const Point& b) const {
    return srecop::distance(a, b, metric_) / dist_scale_;
  }

 private:
  friend BAUGrid build_grid(const Bounds&, int, int, const std::function<bool(const Point&)>*,
                            Metric, double);
  friend BAUGrid build_grid(const Bounds&, int, int, const std::vector<bool>&, Metric, double);
  Bounds bounds_;
  int nx_;
  int ny_;
  Metric metric_;
  double dist_scale_;
  std::vector<Point> centroids_;       // per BAU
  std::vector<Index> cells_;           // per BAU: raw lattice index
  std::vector<Index> bau_of_cell_;     // per raw cell: BAU id or -1
};

BAUGrid build_grid(const Bounds& bounds, int nx, int ny,
                   const std::function<bool(const Point&)>* mask = nullptr,
                   Metric metric = Metric::Euclidean, double dist_scale = 1.0);

/// Explicit per-cell inclusion flags over the raw nx*ny lattice (row-major
/// from the lower-left corner).
BAUGrid build_grid(const Bounds& bounds, int nx, int ny, const std::vector<bool>& include_cells,
                   Metric metric = Metric::Euclidean, double dist_scale = 1.0);

struct MarPattern {
  double p = 0.0;  // per-BAU missingness probability, i.i.d. Bernoulli
  std::uint64_t seed = 0;
};

/// Exact-count variant of MAR: draws a uniformly random subset of exactly
/// `observed_count` observed BAUs.
struct MarExactPattern {
  Index observed_count = 0;
  std::uint64_t seed = 0;
};

struct MbdPattern {
  std::vector<Bounds> blocks;  // BAUs whose centroid lies in any block are missing
};

struct MaskPattern {
  std::vector<bool> observed;  // size N
};

using MissingnessPattern = std::variant<MarPattern, MarExactPattern, MbdPattern, MaskPattern>;

struct MissingnessPartition {
  std::vector<Index> observed;  // A_O, sorted
  std::vector<Index> missing;   // A_M, sorted
  std::string pattern;          // tag recorded for reproducibility
};

MissingnessPartition partition_missing(const BAUGrid& grid, const MissingnessPattern& pattern);

}  // namespace srecop
