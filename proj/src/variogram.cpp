#include "srecop/variogram.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "srecop/geometry.hpp"

namespace srecop {

EmpiricalVariogram cressie_hawkins_variogram(const std::vector<Point>& coords,
                                             const Vector& values, Metric metric,
                                             double dist_scale, int bins, double cutoff) {
  const Index n = values.size();
  if (static_cast<Index>(coords.size()) != n) {
    throw std::invalid_argument("variogram: coords/values size mismatch");
  }
  if (bins < 1 || !(cutoff > 0.0)) throw std::invalid_argument("variogram: bad bins/cutoff");
  std::vector<double> sum_root(static_cast<std::size_t>(bins), 0.0);
  std::vector<long> count(static_cast<std::size_t>(bins), 0);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double d = distance(coords[static_cast<std::size_t>(i)],
                                coords[static_cast<std::size_t>(j)], metric) /
                       dist_scale;
      if (d <= 0.0 || d > cutoff) continue;
      int bin = static_cast<int>(d / cutoff * bins);
      if (bin >= bins) bin = bins - 1;
      sum_root[static_cast<std::size_t>(bin)] +=
          std::sqrt(std::fabs(values(i) - values(j)));
      ++count[static_cast<std::size_t>(bin)];
    }
  }
  EmpiricalVariogram emp;
  for (int b = 0; b < bins; ++b) {
    const long nb = count[static_cast<std::size_t>(b)];
    if (nb == 0) continue;
    const double mean_root = sum_root[static_cast<std::size_t>(b)] / nb;
    const double fourth = mean_root * mean_root * mean_root * mean_root;
    emp.h.push_back((b + 0.5) * cutoff / bins);
    emp.gamma.push_back(0.5 * fourth / (0.457 + 0.494 / static_cast<double>(nb)));
    emp.count.push_back(nb);
  }
  return emp;
}

namespace {
double model_shape(const std::string& model, double h, double r) {
  const double t = h / r;
  if (model == "spherical") return t < 1.0 ? 1.5 * t - 0.5 * t * t * t : 1.0;
  if (model == "exponential") return 1.0 - std::exp(-t);
  if (model == "wave") return h > 0.0 ? 1.0 - std::sin(t) / t : 0.0;
  throw std::invalid_argument("fit_variogram: unknown model " + model);
}
}  // namespace

VariogramFit fit_variogram(const EmpiricalVariogram& emp, const std::string& model) {
  VariogramFit best;
  best.model = model;
  best.sse = std::numeric_limits<double>::infinity();
  const std::size_t m = emp.h.size();
  if (m < 3) return best;
  const double h_max = emp.h.back();
  constexpr int kRangeGrid = 64;
  for (int g = 0; g < kRangeGrid; ++g) {
    const double r = h_max / 25.0 * std::pow(50.0, g / (kRangeGrid - 1.0));  // up to 2 h_max
    // gamma ~= nugget + psill * f(h; r) solved by weighted least squares
    double sw = 0, swf = 0, swff = 0, swg = 0, swfg = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double w = static_cast<double>(emp.count[i]);
      const double f = model_shape(model, emp.h[i], r);
      sw += w;
      swf += w * f;
      swff += w * f * f;
      swg += w * emp.gamma[i];
      swfg += w * f * emp.gamma[i];
    }
    const double det = sw * swff - swf * swf;
    if (std::fabs(det) < 1e-30) continue;
    double nugget = (swff * swg - swf * swfg) / det;
    double psill = (sw * swfg - swf * swg) / det;
    if (nugget < 0.0) {
      nugget = 0.0;
      psill = swff > 0.0 ? swfg / swff : -1.0;
    }
    if (!(psill > 0.0)) continue;
    double sse = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double resid = emp.gamma[i] - nugget - psill * model_shape(model, emp.h[i], r);
      sse += static_cast<double>(emp.count[i]) * resid * resid;
    }
    if (sse < best.sse) {
      best.ok = true;
      best.nugget = nugget;
      best.partial_sill = psill;
      best.range = r;
      best.sse = sse;
    }
  }
  return best;
}

Vector detrend_linear(const std::vector<Point>& coords, const Vector& values) {
  const Index n = values.size();
  Matrix x(n, 3);
  for (Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = coords[static_cast<std::size_t>(i)].x;
    x(i, 2) = coords[static_cast<std::size_t>(i)].y;
  }
  const Vector beta = (x.transpose() * x).ldlt().solve(x.transpose() * values);
  return values - x * beta;
}

}  // namespace srecop
