#include "srecop/lowrank.hpp"

#include <cmath>
#include <stdexcept>

namespace srecop {

namespace {
double log_det_from_llt(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}
}  // namespace

SreCovariance::SreCovariance(std::shared_ptr<const SreStructure> structure, const Matrix& e)
    : structure_(std::move(structure)) {
  const Index b = structure_->s.cols();
  if (e.rows() != b || e.cols() != b) {
    throw std::invalid_argument("SreCovariance: E dimension does not match basis rank");
  }
  e_llt_.compute(e);
  if (e_llt_.info() != Eigen::Success) {
    throw std::runtime_error("SreCovariance: factorization of E failed");
  }
  log_det_e_ = log_det_from_llt(e_llt_);
  // E^{-1} assembled by solves against the factorization, not by inversion
  // formulas.
  const Matrix capacitance = structure_->sts + e_llt_.solve(Matrix::Identity(b, b));
  capacitance_llt_.compute(capacitance);
  if (capacitance_llt_.info() != Eigen::Success) {
    throw std::runtime_error("SreCovariance: factorization of S'S + E^{-1} failed");
  }
  log_det_capacitance_ = log_det_from_llt(capacitance_llt_);
}

Vector SreCovariance::diagonal_sd() const {
  // s_j' E s_j = ||L' s_j||^2 with E = L L'.
  const Matrix sl = structure_->s * e_llt_.matrixL();
  return (sl.rowwise().squaredNorm().array() + 1.0).sqrt();
}

Vector SreCovariance::solve(const Vector& v) const {
  if (v.size() != rows()) throw std::invalid_argument("SreCovariance::solve: size mismatch");
  if (rows() == 0) return v;
  return v - structure_->s * capacitance_llt_.solve(structure_->s.transpose() * v);
}

double SreCovariance::quadratic_form(const Vector& v) const {
  if (v.size() != rows()) {
    throw std::invalid_argument("SreCovariance::quadratic_form: size mismatch");
  }
  if (rows() == 0) return 0.0;
  const Vector stv = structure_->s.transpose() * v;
  double q = v.squaredNorm() - stv.dot(capacitance_llt_.solve(stv));
  if (q < 0.0) {
    if (q < -1e-12 * (1.0 + v.squaredNorm())) {
      throw std::runtime_error("SreCovariance::quadratic_form: negative beyond rounding");
    }
    q = 0.0;
  }
  return q;
}

double SreCovariance::log_det() const { return log_det_capacitance_ + log_det_e_; }

}  // namespace srecop
