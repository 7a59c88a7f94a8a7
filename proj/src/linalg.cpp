// SPDX-License-Identifier: Apache-2.0
#include "dsa/linalg.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dsa/errors.hpp"

namespace dsa {

PsdRoot psd_sqrt(const RMatrix& a, bool need_inverse, double clamp) {
  const Eigen::Index n = a.rows();
  PsdRoot out;
  if (n == 0) {
    out.sqrt = RMatrix(0, 0);
    out.inv_sqrt = RMatrix(0, 0);
    return out;
  }
  if (n == 1) {
    const double v = a(0, 0);
    out.min_eigenvalue = v;
    if (v < -clamp || !std::isfinite(v)) {
      std::ostringstream os;
      os << "matrix is not positive semidefinite (eigenvalue " << v << ")";
      throw ModelViolation(os.str());
    }
    const double s = v > 0.0 ? std::sqrt(v) : 0.0;
    out.sqrt = RMatrix::Constant(1, 1, s);
    if (need_inverse) {
      if (!(s > 0.0)) throw ModelViolation("matrix is singular");
      out.inv_sqrt = RMatrix::Constant(1, 1, 1.0 / s);
    }
    return out;
  }
  const RMatrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<RMatrix> es(sym);
  if (es.info() != Eigen::Success) {
    throw ModelViolation("eigendecomposition failed");
  }
  RVector ev = es.eigenvalues();
  out.min_eigenvalue = ev.minCoeff();
  if (out.min_eigenvalue < -clamp || !ev.allFinite()) {
    std::ostringstream os;
    os << "matrix is not positive semidefinite (min eigenvalue "
       << out.min_eigenvalue << ")";
    throw ModelViolation(os.str());
  }
  ev = ev.cwiseMax(0.0);
  const RMatrix& V = es.eigenvectors();
  const RVector s = ev.cwiseSqrt();
  out.sqrt = V * s.asDiagonal() * V.transpose();
  if (need_inverse) {
    if (!(s.minCoeff() > 0.0)) throw ModelViolation("matrix is singular");
    out.inv_sqrt = V * s.cwiseInverse().asDiagonal() * V.transpose();
  }
  return out;
}

Pinv pseudo_inverse(const CMatrix& a, double rel_tol) {
  Pinv out;
  if (a.size() == 0) {
    out.matrix = CMatrix::Zero(a.cols(), a.rows());
    return out;
  }
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.singular_values = svd.singularValues();
  const double smax = out.singular_values.size() ? out.singular_values(0) : 0.0;
  const double cut = rel_tol * smax;
  RVector inv = RVector::Zero(out.singular_values.size());
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    if (out.singular_values(i) > cut && out.singular_values(i) > 0.0) {
      inv(i) = 1.0 / out.singular_values(i);
      ++out.rank;
    }
  }
  out.matrix = svd.matrixV() * inv.cast<Complex>().asDiagonal() *
               svd.matrixU().adjoint();
  return out;
}

double to_db_amplitude(double magnitude, double floor_db) {
  if (!(magnitude > 0.0)) return floor_db;
  return 20.0 * std::log10(magnitude);
}

double to_db_power(double power, double floor_db) {
  if (!(power > 0.0)) return floor_db;
  return 10.0 * std::log10(power);
}

double relative_error(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw PreconditionError("relative_error: dimension mismatch");
  }
  if (a.size() == 0) return 0.0;
  const double scale = b.cwiseAbs().maxCoeff();
  const double diff = (a - b).cwiseAbs().maxCoeff();
  if (scale == 0.0) return diff;
  return diff / scale;
}

}  // namespace dsa
