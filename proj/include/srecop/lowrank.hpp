#pragma once

#include <memory>

#include "srecop/types.hpp"

namespace srecop {

/// Fixed part of an implicit SRE covariance: a row block of the basis matrix
/// together with S'S, computed once per partition subset (S never changes
/// during a fit).
struct SreStructure {
  Matrix s;    // N x b
  Matrix sts;  // b x b

  explicit SreStructure(Matrix s_in) : s(std::move(s_in)), sts(s.transpose() * s) {}
};

/// Implicit Sigma = S E S' + I with the micro-scale variance fixed at 1.
/// Diagonals, solves, quadratic forms, and log-determinants use the
/// Sherman-Morrison-Woodbury identities through the b x b capacitance matrix
/// S'S + E^{-1}; the N x N matrix is never materialized. Instances are
/// immutable snapshots: a new E (new theta) means a new SreCovariance built
/// over the same shared structure.
class SreCovariance {
 public:
  SreCovariance(std::shared_ptr<const SreStructure> structure, const Matrix& e);
  SreCovariance(Matrix s, const Matrix& e)
      : SreCovariance(std::make_shared<SreStructure>(std::move(s)), e) {}

  Index rows() const { return structure_->s.rows(); }
  Index rank() const { return structure_->s.cols(); }
  const Matrix& basis() const { return structure_->s; }
  const std::shared_ptr<const SreStructure>& structure() const { return structure_; }

  /// Marginal standard deviations sqrt(s_j' E s_j + 1).
  Vector diagonal_sd() const;

  /// Sigma^{-1} v = v - S (S'S + E^{-1})^{-1} S' v.
  Vector solve(const Vector& v) const;

  /// v' Sigma^{-1} v; clamped at 0 when rounding leaves it barely negative.
  double quadratic_form(const Vector& v) const;

  /// log det Sigma = log det(S'S + E^{-1}) + log det(E).
  double log_det() const;

  /// Factorization of the capacitance matrix S'S + E^{-1}; also the
  /// conjugate-update precision of the basis coefficients.
  const Eigen::LLT<Matrix>& capacitance_llt() const { return capacitance_llt_; }

 private:
  std::shared_ptr<const SreStructure> structure_;
  Eigen::LLT<Matrix> e_llt_;
  Eigen::LLT<Matrix> capacitance_llt_;
  double log_det_e_ = 0.0;
  double log_det_capacitance_ = 0.0;
};

}  // namespace srecop
