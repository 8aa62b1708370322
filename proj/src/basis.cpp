#include "srecop/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace srecop {

double bisquare(const Point& center, double aperture, const Point& x, Metric metric,
                double dist_scale) {
  if (!(aperture > 0.0)) throw std::invalid_argument("bisquare: aperture must be > 0");
  const double d = distance(center, x, metric) / dist_scale;
  if (d >= aperture) return 0.0;
  const double r = d / aperture;
  const double t = 1.0 - r * r;
  return t * t;
}

BasisSet regular_basis(const Bounds& bounds, const std::vector<int>& counts_per_resolution,
                       const std::vector<double>& apertures, Metric metric, double dist_scale) {
  if (counts_per_resolution.empty()) {
    throw std::invalid_argument("regular_basis: at least one resolution required");
  }
  if (apertures.size() != counts_per_resolution.size()) {
    throw std::invalid_argument("regular_basis: one aperture per resolution required");
  }
  BasisSet basis;
  basis.metric = metric;
  basis.dist_scale = dist_scale;
  for (std::size_t p = 0; p < counts_per_resolution.size(); ++p) {
    const int count = counts_per_resolution[p];
    if (count < 1) throw std::invalid_argument("regular_basis: lattice count must be >= 1");
    const double dx = bounds.width() / count;
    const double dy = bounds.height() / count;
    BasisResolution res;
    const double spacing = std::min(dx, dy) / dist_scale;
    res.aperture = apertures[p] > 0.0 ? apertures[p] : 1.5 * spacing;
    basis.aperture_rule +=
        (apertures[p] > 0.0 ? std::string("fixed") : std::string("1.5x-spacing"));
    if (p + 1 < counts_per_resolution.size()) basis.aperture_rule += ",";
    for (int iy = 0; iy < count; ++iy) {
      for (int ix = 0; ix < count; ++ix) {
        res.centers.push_back(
            {bounds.x_min + (ix + 0.5) * dx, bounds.y_min + (iy + 0.5) * dy});
      }
    }
    basis.resolutions.push_back(std::move(res));
  }
  return basis;
}

Matrix evaluate_basis(const BAUGrid& grid, const BasisSet& basis) {
  const Index n = grid.size();
  const Index b = basis.size();
  Matrix s(n, b);
  for (Index j = 0; j < n; ++j) {
    Index col = 0;
    for (const auto& res : basis.resolutions) {
      for (const Point& center : res.centers) {
        s(j, col++) =
            bisquare(center, res.aperture, grid.centroid(j), basis.metric, basis.dist_scale);
      }
    }
  }
  return s;
}

Kernel kernel_from_string(const std::string& name) {
  if (name == "exponential") return Kernel::Exponential;
  if (name == "spherical") return Kernel::Spherical;
  throw std::invalid_argument("unknown kernel: " + name);
}

std::string to_string(Kernel kernel) {
  return kernel == Kernel::Exponential ? "exponential" : "spherical";
}

EBuilder::EBuilder(const BasisSet& basis, Kernel kernel) : kernel_(kernel), b_(basis.size()) {
  for (const auto& res : basis.resolutions) {
    const Index m = static_cast<Index>(res.centers.size());
    Matrix d(m, m);
    for (Index i = 0; i < m; ++i) {
      d(i, i) = 0.0;
      for (Index j = i + 1; j < m; ++j) {
        d(i, j) = d(j, i) = distance(res.centers[static_cast<std::size_t>(i)],
                                     res.centers[static_cast<std::size_t>(j)], basis.metric) /
                            basis.dist_scale;
      }
    }
    dist_.push_back(std::move(d));
  }
}

Matrix EBuilder::operator()(const Vector& theta_s, double theta_r) const {
  if (theta_s.size() != static_cast<Index>(dist_.size())) {
    throw std::invalid_argument("build_E: one theta_s per resolution required");
  }
  if (!(theta_r > 0.0) || (theta_s.array() <= 0.0).any()) {
    throw std::invalid_argument("build_E: theta_s and theta_r must be > 0");
  }
  Matrix e = Matrix::Zero(b_, b_);
  Index offset = 0;
  for (std::size_t p = 0; p < dist_.size(); ++p) {
    const Matrix& d = dist_[p];
    const Index m = d.rows();
    const double scale = theta_s(static_cast<Index>(p));
    if (kernel_ == Kernel::Exponential) {
      e.block(offset, offset, m, m) = scale * (-d / theta_r).array().exp().matrix();
    } else {
      for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < m; ++j) {
          const double r = d(i, j) / theta_r;
          e(offset + i, offset + j) = r < 1.0 ? scale * (1.0 - 1.5 * r + 0.5 * r * r * r) : 0.0;
        }
      }
    }
    offset += m;
  }

  // PD check with the one-shot jitter policy; a silent large jitter would
  // distort the meaning of theta_s, so the second failure is fatal.
  Eigen::LLT<Matrix> llt(e);
  if (llt.info() == Eigen::Success) return e;
  const double jitter = 1e-10 * theta_s.maxCoeff();
  Matrix jittered = e;
  jittered.diagonal().array() += jitter;
  Eigen::LLT<Matrix> retry(jittered);
  if (retry.info() == Eigen::Success) return jittered;
  throw std::runtime_error("build_E: covariance not positive-definite (kernel=" +
                           to_string(kernel_) + ", theta_r=" + std::to_string(theta_r) + ")");
}

Matrix build_E(const BasisSet& basis, Kernel kernel, const Vector& theta_s, double theta_r) {
  return EBuilder(basis, kernel)(theta_s, theta_r);
}

}  // namespace srecop
