#pragma once

#include <string>
#include <vector>

#include "srecop/geometry.hpp"
#include "srecop/types.hpp"

namespace srecop {

/// Bisquare value (1 - (d/aperture)^2)^2 for d < aperture, else 0.
double bisquare(const Point& center, double aperture, const Point& x, Metric metric,
                double dist_scale = 1.0);

struct BasisResolution {
  std::vector<Point> centers;
  double aperture = 0.0;
};

/// Multi-resolution set of bisquare basis functions. Resolution order is
/// fixed; columns of every matrix built from the set are blocked in the same
/// order.
struct BasisSet {
  std::vector<BasisResolution> resolutions;
  Metric metric = Metric::Euclidean;
  double dist_scale = 1.0;
  std::string aperture_rule;  // recorded construction metadata

  Index size() const {
    Index b = 0;
    for (const auto& r : resolutions) b += static_cast<Index>(r.centers.size());
    return b;
  }
};

/// Centers on regular lattices covering the bounds, one lattice per
/// resolution: a p x p resolution places centers at the midpoints of a p x p
/// partition of the domain. An aperture <= 0 requests the default rule of
/// 1.5x the center spacing.
BasisSet regular_basis(const Bounds& bounds, const std::vector<int>& counts_per_resolution,
                       const std::vector<double>& apertures, Metric metric = Metric::Euclidean,
                       double dist_scale = 1.0);

/// N x b matrix S with S(j, m) = bisquare(center_m, aperture_m, centroid_j).
Matrix evaluate_basis(const BAUGrid& grid, const BasisSet& basis);

enum class Kernel { Exponential, Spherical };

Kernel kernel_from_string(const std::string& name);
std::string to_string(Kernel kernel);

/// Random-effects covariance E(theta_s, theta_r): block-diagonal over
/// resolutions (cross-resolution entries are exactly zero), with
///   exponential: E_ij = theta_s[p] * exp(-d_ij / theta_r)
///   spherical:   E_ij = 1{d_ij < theta_r} * theta_s[p]
///                       * (1 - 1.5 (d_ij/theta_r) + 0.5 (d_ij/theta_r)^3)
/// within resolution p. Positive-definiteness is checked by factorization;
/// one retry with a 1e-10 * theta_s diagonal jitter, then a hard error.
Matrix build_E(const BasisSet& basis, Kernel kernel, const Vector& theta_s, double theta_r);

/// Pairwise center distances per resolution, precomputed once so that
/// repeated E(theta) builds inside MCMC cost only the kernel evaluations.
class EBuilder {
 public:
  EBuilder(const BasisSet& basis, Kernel kernel);
  Matrix operator()(const Vector& theta_s, double theta_r) const;
  Index size() const { return b_; }
  Index resolutions() const { return static_cast<Index>(dist_.size()); }

 private:
  std::vector<Matrix> dist_;
  Kernel kernel_;
  Index b_ = 0;
};

}  // namespace srecop
