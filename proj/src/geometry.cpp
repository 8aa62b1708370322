#include "srecop/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srecop/rng.hpp"

namespace srecop {

namespace {
constexpr double kEarthRadiusKm = 6371.0;
constexpr double kDegToRad = M_PI / 180.0;

double haversine_km(const Point& a, const Point& b) {
  if (std::fabs(a.y) > 90.0 || std::fabs(b.y) > 90.0) {
    throw std::domain_error("distance: latitude outside [-90, 90]");
  }
  const double lat1 = a.y * kDegToRad;
  const double lat2 = b.y * kDegToRad;
  const double dlat = lat2 - lat1;
  const double dlon = (b.x - a.x) * kDegToRad;
  const double s1 = std::sin(0.5 * dlat);
  const double s2 = std::sin(0.5 * dlon);
  const double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}
}  // namespace

double distance(const Point& a, const Point& b, Metric metric) {
  if (metric == Metric::Euclidean) {
    return std::hypot(a.x - b.x, a.y - b.y);
  }
  return haversine_km(a, b);
}

double Bounds::diameter(Metric metric, double dist_scale) const {
  return distance({x_min, y_min}, {x_max, y_max}, metric) / dist_scale;
}

BAUGrid::BAUGrid(const Bounds& bounds, int nx, int ny, Metric metric, double dist_scale)
    : bounds_(bounds), nx_(nx), ny_(ny), metric_(metric), dist_scale_(dist_scale) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("BAUGrid: nx and ny must be >= 1");
  if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0)) {
    throw std::invalid_argument("BAUGrid: degenerate bounds");
  }
  if (!(dist_scale > 0.0)) throw std::invalid_argument("BAUGrid: dist_scale must be > 0");
}

Index BAUGrid::locate(const Point& p) const {
  if (!bounds_.contains(p)) return -1;
  const double fx = (p.x - bounds_.x_min) / bounds_.width() * nx_;
  const double fy = (p.y - bounds_.y_min) / bounds_.height() * ny_;
  const Index ix = std::min<Index>(static_cast<Index>(fx), nx_ - 1);
  const Index iy = std::min<Index>(static_cast<Index>(fy), ny_ - 1);
  return bau_of_cell_[static_cast<std::size_t>(iy * nx_ + ix)];
}

BAUGrid build_grid(const Bounds& bounds, int nx, int ny,
                   const std::function<bool(const Point&)>* mask, Metric metric,
                   double dist_scale) {
  BAUGrid grid(bounds, nx, ny, metric, dist_scale);
  const double dx = bounds.width() / nx;
  const double dy = bounds.height() / ny;
  grid.bau_of_cell_.assign(static_cast<std::size_t>(nx) * ny, -1);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const Point c{bounds.x_min + (ix + 0.5) * dx, bounds.y_min + (iy + 0.5) * dy};
      if (mask != nullptr && !(*mask)(c)) continue;
      grid.bau_of_cell_[static_cast<std::size_t>(iy) * nx + ix] =
          static_cast<Index>(grid.centroids_.size());
      grid.centroids_.push_back(c);
      grid.cells_.push_back(static_cast<Index>(iy) * nx + ix);
    }
  }
  if (grid.centroids_.empty()) {
    throw std::runtime_error("build_grid: mask excluded every cell (empty domain)");
  }
  return grid;
}

BAUGrid build_grid(const Bounds& bounds, int nx, int ny, const std::vector<bool>& include_cells,
                   Metric metric, double dist_scale) {
  if (static_cast<Index>(include_cells.size()) != static_cast<Index>(nx) * ny) {
    throw std::invalid_argument("build_grid: mask size does not match nx*ny");
  }
  BAUGrid grid(bounds, nx, ny, metric, dist_scale);
  const double dx = bounds.width() / nx;
  const double dy = bounds.height() / ny;
  grid.bau_of_cell_.assign(include_cells.size(), -1);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t cell = static_cast<std::size_t>(iy) * nx + ix;
      if (!include_cells[cell]) continue;
      grid.bau_of_cell_[cell] = static_cast<Index>(grid.centroids_.size());
      grid.centroids_.push_back(
          {bounds.x_min + (ix + 0.5) * dx, bounds.y_min + (iy + 0.5) * dy});
      grid.cells_.push_back(static_cast<Index>(cell));
    }
  }
  if (grid.centroids_.empty()) {
    throw std::runtime_error("build_grid: mask excluded every cell (empty domain)");
  }
  return grid;
}

MissingnessPartition partition_missing(const BAUGrid& grid, const MissingnessPattern& pattern) {
  const Index n = grid.size();
  std::vector<bool> observed(static_cast<std::size_t>(n), true);
  std::string tag;

  if (const auto* mar = std::get_if<MarPattern>(&pattern)) {
    if (mar->p < 0.0 || mar->p > 1.0) throw std::invalid_argument("MAR: p outside [0, 1]");
    Rng rng(mar->seed, /*stream=*/0x4d4152);  // "MAR"
    for (Index j = 0; j < n; ++j) {
      if (rng.uniform() < mar->p) observed[static_cast<std::size_t>(j)] = false;
    }
    tag = "mar(p=" + std::to_string(mar->p) + ",seed=" + std::to_string(mar->seed) + ")";
  } else if (const auto* exact = std::get_if<MarExactPattern>(&pattern)) {
    if (exact->observed_count < 0 || exact->observed_count > n) {
      throw std::invalid_argument("MAR exact: observed count outside [0, N]");
    }
    std::vector<Index> ids(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) ids[static_cast<std::size_t>(j)] = j;
    Rng rng(exact->seed, /*stream=*/0x4d4152, 1);
    // Fisher-Yates; the first observed_count entries stay observed.
    for (Index j = n - 1; j > 0; --j) {
      const Index k = static_cast<Index>(rng.uniform() * (j + 1));
      std::swap(ids[static_cast<std::size_t>(j)], ids[static_cast<std::size_t>(std::min(k, j))]);
    }
    observed.assign(static_cast<std::size_t>(n), false);
    for (Index j = 0; j < exact->observed_count; ++j) {
      observed[static_cast<std::size_t>(ids[static_cast<std::size_t>(j)])] = true;
    }
    tag = "mar_exact(k=" + std::to_string(exact->observed_count) +
          ",seed=" + std::to_string(exact->seed) + ")";
  } else if (const auto* mbd = std::get_if<MbdPattern>(&pattern)) {
    for (const Bounds& block : mbd->blocks) {
      if (block.x_min < grid.bounds().x_min - 1e-12 || block.x_max > grid.bounds().x_max + 1e-12 ||
          block.y_min < grid.bounds().y_min - 1e-12 || block.y_max > grid.bounds().y_max + 1e-12) {
        throw std::invalid_argument("MBD: block outside grid bounds");
      }
    }
    for (Index j = 0; j < n; ++j) {
      const Point& c = grid.centroid(j);
      for (const Bounds& block : mbd->blocks) {
        if (c.x >= block.x_min && c.x <= block.x_max && c.y >= block.y_min &&
            c.y <= block.y_max) {
          observed[static_cast<std::size_t>(j)] = false;
          break;
        }
      }
    }
    tag = "mbd(" + std::to_string(mbd->blocks.size()) + " blocks)";
  } else {
    const auto& mask = std::get<MaskPattern>(pattern);
    if (static_cast<Index>(mask.observed.size()) != n) {
      throw std::invalid_argument("mask pattern: size does not match grid");
    }
    observed = mask.observed;
    tag = "mask";
  }

  MissingnessPartition part;
  part.pattern = std::move(tag);
  for (Index j = 0; j < n; ++j) {
    (observed[static_cast<std::size_t>(j)] ? part.observed : part.missing).push_back(j);
  }
  if (part.observed.empty()) {
    throw std::runtime_error("partition_missing: pattern leaves no observed BAUs");
  }
  return part;
}

}  // namespace srecop
