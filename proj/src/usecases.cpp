// SPDX-License-Identifier: Apache-2.0
#include "dsa/usecases.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SVD>

#include "dsa/errors.hpp"
#include "dsa/linalg.hpp"

namespace dsa {

const char* to_string(TargetKind k) {
  switch (k) {
    case TargetKind::Beamsteer: return "beamsteer";
    case TargetKind::ZfMiso: return "zf-miso";
    case TargetKind::SvdMimo: return "svd-mimo";
  }
  return "beamsteer";
}

TargetSpec target_beamsteer(int k, int k_star, double prx) {
  if (k < 1 || k_star < 0 || k_star >= k) {
    throw PreconditionError("beamsteer: need 0 <= k_star < K");
  }
  if (!(prx > 0.0)) throw DomainError("beamsteer: Prx must be positive");
  TargetSpec t;
  t.kind = TargetKind::Beamsteer;
  t.Hopt = CMatrix::Zero(k, 1);
  t.Hopt(k_star, 0) = std::sqrt(prx);
  t.k_star = k_star;
  t.prx = prx;
  return t;
}

TargetSpec target_zf_miso(const CMatrix& hc, int na) {
  if (hc.rows() != na) {
    throw PreconditionError("zf-miso: number of users must equal N_a");
  }
  const Pinv pi = pseudo_inverse(hc);
  if (pi.rank < hc.rows()) {
    std::ostringstream os;
    os << "zf-miso: channel rank " << pi.rank << " is below the " << hc.rows()
       << " users";
    throw RankError(os.str());
  }
  TargetSpec t;
  t.kind = TargetKind::ZfMiso;
  t.Hopt = hc * pi.matrix;
  t.rank = pi.rank;
  t.singular_values = pi.singular_values;
  t.beta = std::sqrt(static_cast<double>(na)) / pi.matrix.norm();
  return t;
}

TargetSpec target_svd_mimo(const CMatrix& hc, int na) {
  if (na < 1) throw PreconditionError("svd-mimo: na >= 1");
  Eigen::JacobiSVD<CMatrix> svd(hc, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector sv = svd.singularValues();
  CMatrix u = svd.matrixU();
  CMatrix v = svd.matrixV();
  int rank = 0;
  const double smax = sv.size() ? sv(0) : 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-12 * smax && sv(i) > 0.0) ++rank;
  }
  if (na > rank) {
    std::ostringstream os;
    os << "svd-mimo: " << na << " layers requested but numerical rank is "
       << rank;
    if (na - 1 < sv.size() && na - 2 >= 0) {
      os << " (sigma_" << na << "/sigma_" << na - 1 << " = "
         << to_db_amplitude(sv(na - 1) / sv(na - 2)) << " dB)";
    }
    throw RankError(os.str());
  }
  for (Eigen::Index i = 0; i < u.cols(); ++i) {
    Eigen::Index arg = 0;
    u.col(i).cwiseAbs().maxCoeff(&arg);
    const Complex ph = std::polar(1.0, -std::arg(u(arg, i)));
    u.col(i) *= ph;
    v.col(i) *= ph;
    u(arg, i) = Complex(std::abs(u(arg, i)), 0.0);
  }
  TargetSpec t;
  t.kind = TargetKind::SvdMimo;
  t.singular_values = sv;
  t.rank = rank;
  t.U = u.leftCols(na);
  t.V = v.leftCols(na);
  t.Lambda = sv.head(na).cast<Complex>().asDiagonal();
  t.Hopt = t.U * t.Lambda;
  return t;
}

RMatrix metric_user_coupling(const CMatrix& h) {
  if (h.rows() != h.cols()) {
    throw PreconditionError("user coupling: channel must be square");
  }
  const Eigen::Index k = h.rows();
  RMatrix out = RMatrix::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double d = std::abs(h(i, i));
    if (!(d > 0.0)) {
      std::ostringstream os;
      os << "user coupling: zero diagonal entry for user " << i;
      throw DomainError(os.str());
    }
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j != i) out(i, j) = to_db_amplitude(std::abs(h(i, j)) / d);
    }
  }
  return out;
}

LayerMatrix metric_layer_matrix(const CMatrix& u, const CMatrix& h) {
  if (u.rows() != h.rows()) {
    throw PreconditionError("layer matrix: U and H row counts differ");
  }
  const Eigen::Index na = h.cols();
  if (u.cols() < na) {
    throw PreconditionError("layer matrix: U has fewer columns than layers");
  }
  LayerMatrix out;
  out.lambda_hat = (u.adjoint() * h).topRows(na);
  out.db.resize(na, na);
  for (Eigen::Index i = 0; i < na; ++i) {
    for (Eigen::Index j = 0; j < na; ++j) {
      out.db(i, j) = to_db_amplitude(std::abs(out.lambda_hat(i, j)));
    }
  }
  return out;
}

double min_row_separation_db(const RMatrix& db) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < db.rows(); ++i) {
    for (Eigen::Index j = 0; j < db.cols(); ++j) {
      if (i != j) best = std::min(best, db(i, i) - db(i, j));
    }
  }
  return best;
}

}  // namespace dsa
