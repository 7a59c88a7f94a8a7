// SPDX-License-Identifier: Apache-2.0
#include "dsa/network.hpp"

#include <cmath>
#include <sstream>

#include "dsa/errors.hpp"

namespace dsa {

CMatrix ImpedancePartition::full() const {
  const Eigen::Index a = na(), s = ns();
  CMatrix z(a + s, a + s);
  z.topLeftCorner(a, a) = Zaa;
  z.topRightCorner(a, s) = Zas;
  z.bottomLeftCorner(s, a) = Zsa;
  z.bottomRightCorner(s, s) = Zss;
  return z;
}

ImpedancePartition ImpedancePartition::from_full(const CMatrix& z,
                                                 Eigen::Index na) {
  if (z.rows() != z.cols() || na < 0 || na > z.rows()) {
    throw PreconditionError("from_full: bad partition size");
  }
  const Eigen::Index s = z.rows() - na;
  ImpedancePartition p;
  p.Zaa = z.topLeftCorner(na, na);
  p.Zas = z.topRightCorner(na, s);
  p.Zsa = z.bottomLeftCorner(s, na);
  p.Zss = z.bottomRightCorner(s, s);
  return p;
}

AssembledImpedance assemble_impedance(const DsaGeometry& g,
                                      const PhysicalConstants& k) {
  const std::size_t n = g.n();
  CMatrix z(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const Dipole& di = g.element(i);
    z(i, i) = self_impedance(di, g.f0, k);
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex m = mutual_impedance(di, g.element(j), g.lambda, k);
      z(i, j) = m;
      z(j, i) = m;
    }
  }
  AssembledImpedance out;
  out.partition = std::make_shared<const ImpedancePartition>(
      ImpedancePartition::from_full(z, static_cast<Eigen::Index>(g.na())));
  out.full = std::move(z);
  return out;
}

LoadVector::LoadVector(RVector t) : theta(std::move(t)) {
  if (!theta.allFinite()) throw DomainError("load reactances must be finite");
}

LoadVector LoadVector::zeros(Eigen::Index ns) {
  return LoadVector(RVector::Zero(ns));
}

CMatrix LoadVector::Zs() const {
  return (kJ * theta.cast<Complex>()).asDiagonal();
}

namespace {

void factor_loaded(const ImpedancePartition& p, const LoadVector& loads,
                   Eigen::PartialPivLU<CMatrix>& lu, double& rcond) {
  if (loads.size() != p.ns()) {
    throw PreconditionError("load vector length must equal N_s");
  }
  CMatrix a = p.Zss;
  a.diagonal() += kJ * loads.theta.cast<Complex>();
  lu.compute(a);
  rcond = lu.rcond();
  if (!(rcond >= kMinRcond)) {
    std::ostringstream os;
    os << "Zss + Z_S is singular (reciprocal condition " << rcond << " < "
       << kMinRcond << ")";
    throw ResonanceError(os.str(), rcond);
  }
}

CMatrix build_zm(const CMatrix& za, const RMatrix& s, double R) {
  const Eigen::Index a = za.rows();
  CMatrix zm = CMatrix::Zero(2 * a, 2 * a);
  const CMatrix off = -kJ * std::sqrt(R) * s.cast<Complex>();
  zm.topRightCorner(a, a) = off;
  zm.bottomLeftCorner(a, a) = off;
  zm.bottomRightCorner(a, a) = -kJ * za.imag().cast<Complex>();
  return zm;
}

}  // namespace

CMatrix input_impedance(const ImpedancePartition& p, const LoadVector& loads) {
  if (p.ns() == 0) return p.Zaa;
  Eigen::PartialPivLU<CMatrix> lu;
  double rcond = 0.0;
  factor_loaded(p, loads, lu, rcond);
  return p.Zaa - p.Zas * lu.solve(p.Zsa);
}

CMatrix matching_network(const CMatrix& za, double R) {
  if (!(R > 0.0)) throw DomainError("reference resistance must be positive");
  const PsdRoot root = psd_sqrt(za.real(), false);
  return build_zm(za, root.sqrt, R);
}

CMatrix em_precoder(const ImpedancePartition& p, const LoadVector& loads,
                    double R) {
  auto shared = std::make_shared<const ImpedancePartition>(p);
  return NetworkState(shared, loads, R).Wem();
}

NetworkState::NetworkState(std::shared_ptr<const ImpedancePartition> p,
                           LoadVector loads, double R)
    : partition_(std::move(p)), loads_(std::move(loads)), R_(R) {
  if (!partition_) throw PreconditionError("network: null partition");
  if (!(R_ > 0.0)) throw DomainError("reference resistance must be positive");
  const ImpedancePartition& P = *partition_;
  const Eigen::Index a = P.na(), s = P.ns();
  if (s > 0) {
    factor_loaded(P, loads_, lu_, rcond_);
    x_ = lu_.solve(P.Zsa);
    za_ = P.Zaa - P.Zas * x_;
  } else {
    if (loads_.size() != 0) {
      throw PreconditionError("load vector length must equal N_s");
    }
    x_ = CMatrix::Zero(0, a);
    za_ = P.Zaa;
  }
  root_ = psd_sqrt(za_.real(), true);
  zm_ = build_zm(za_, root_.sqrt, R_);
  const Complex scale = 1.0 / (kJ * std::sqrt(R_));
  const CMatrix sinv = root_.inv_sqrt.cast<Complex>();
  wem_.resize(a + s, a);
  wem_.topRows(a) = scale * sinv;
  if (s > 0) wem_.bottomRows(s) = -scale * (x_ * sinv);
}

CVector NetworkState::currents(const CVector& vt) const {
  if (vt.size() != na()) throw PreconditionError("drive length must be N_a");
  return wem_ * vt;
}

CMatrix NetworkState::solve_loaded(const CMatrix& rhs) const {
  if (ns() == 0) return CMatrix::Zero(0, rhs.cols());
  return lu_.solve(rhs);
}

CircuitSolution oracle_solve(const CMatrix& zfull, Eigen::Index na,
                             const LoadVector& loads, const CVector& vt,
                             double R) {
  const Eigen::Index n = zfull.rows();
  const Eigen::Index ns = n - na;
  if (zfull.cols() != n || na < 1 || ns < 0 || loads.size() != ns ||
      vt.size() != na) {
    throw PreconditionError("oracle_solve: inconsistent dimensions");
  }
  // The matching network is designed for the loaded input impedance, which
  // is obtained here from a full-pivot solve of the scatterer block.
  CMatrix za = zfull.topLeftCorner(na, na);
  if (ns > 0) {
    CMatrix a = zfull.bottomRightCorner(ns, ns);
    a.diagonal() += kJ * loads.theta.cast<Complex>();
    Eigen::FullPivLU<CMatrix> flu(a);
    if (!(flu.rcond() >= kMinRcond)) {
      throw ResonanceError("oracle_solve: singular scatterer block",
                           flu.rcond());
    }
    za -= zfull.topRightCorner(na, ns) *
          flu.solve(CMatrix(zfull.bottomLeftCorner(ns, na)));
  }
  const CMatrix zm = matching_network(za, R);
  const CMatrix zm11 = zm.topLeftCorner(na, na);
  const CMatrix zm12 = zm.topRightCorner(na, na);
  const CMatrix zm21 = zm.bottomLeftCorner(na, na);
  const CMatrix zm22 = zm.bottomRightCorner(na, na);

  // unknowns: [it (na), i (n), v (n)]
  const Eigen::Index m = na + 2 * n;
  CMatrix A = CMatrix::Zero(m, m);
  CVector b = CVector::Zero(m);
  const Eigen::Index ci = na, cv = na + n;
  Eigen::Index row = 0;
  // vt = Zm11 it - Zm12 ia   (current into port 2 of the network is -ia)
  A.block(row, 0, na, na) = zm11;
  A.block(row, ci, na, na) = -zm12;
  b.segment(row, na) = vt;
  row += na;
  // va = Zm21 it - Zm22 ia
  A.block(row, cv, na, na) = CMatrix::Identity(na, na);
  A.block(row, 0, na, na) = -zm21;
  A.block(row, ci, na, na) = zm22;
  row += na;
  // v = Z i
  A.block(row, cv, n, n) = CMatrix::Identity(n, n);
  A.block(row, ci, n, n) = -zfull;
  row += n;
  // vs = -Z_S is
  for (Eigen::Index s = 0; s < ns; ++s) {
    A(row + s, cv + na + s) = 1.0;
    A(row + s, ci + na + s) = kJ * loads.theta(s);
  }
  Eigen::FullPivLU<CMatrix> lu(A);
  if (!(lu.rcond() >= 1e-15)) {
    throw ResonanceError("oracle_solve: singular circuit system", lu.rcond());
  }
  const CVector x = lu.solve(b);
  CircuitSolution out;
  out.it = x.head(na);
  out.i = x.segment(ci, n);
  out.v = x.segment(cv, n);
  return out;
}

PowerReport powers_and_q_covariance(const CMatrix& cov, const CMatrix& za) {
  if (cov.rows() != za.rows() || cov.cols() != za.cols()) {
    throw PreconditionError("powers: covariance and Za must conform");
  }
  PowerReport r;
  r.radiated = (za.real().cast<Complex>() * cov).trace().real();
  r.reactive = (za.imag().cast<Complex>() * cov).trace().real();
  if (!(r.radiated > 0.0)) {
    throw ModelViolation("radiated power is not positive");
  }
  r.q = r.reactive / r.radiated;
  return r;
}

PowerReport powers_and_q(const CVector& ia, const CMatrix& za) {
  return powers_and_q_covariance(ia * ia.adjoint(), za);
}

PowerReport powers_for_precoder(const NetworkState& s, const CMatrix& wd,
                                double ptx) {
  const Eigen::Index a = s.na();
  if (wd.rows() != a) throw PreconditionError("Wd must have N_a rows");
  const CMatrix m = s.Wem().topRows(a) * wd;
  const CMatrix cov = (ptx / static_cast<double>(wd.cols())) * m * m.adjoint();
  return powers_and_q_covariance(cov, s.Za());
}

}  // namespace dsa
