// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include <Eigen/LU>

#include "dsa/em_dipole.hpp"
#include "dsa/geometry.hpp"
#include "dsa/linalg.hpp"
#include "dsa/types.hpp"

namespace dsa {

struct ImpedancePartition {
  CMatrix Zaa, Zas, Zsa, Zss;

  Eigen::Index na() const { return Zaa.rows(); }
  Eigen::Index ns() const { return Zss.rows(); }
  Eigen::Index n() const { return na() + ns(); }

  CMatrix full() const;
  static ImpedancePartition from_full(const CMatrix& z, Eigen::Index na);
};

struct AssembledImpedance {
  CMatrix full;
  std::shared_ptr<const ImpedancePartition> partition;
};

AssembledImpedance assemble_impedance(const DsaGeometry& g,
                                      const PhysicalConstants& k = {});

/// Scatterer reactances theta [Ohm]; Z_S = diag(j theta).
struct LoadVector {
  RVector theta;

  LoadVector() = default;
  explicit LoadVector(RVector t);
  static LoadVector zeros(Eigen::Index ns);

  Eigen::Index size() const { return theta.size(); }
  CMatrix Zs() const;
};

// Smallest acceptable reciprocal condition number of Zss + Z_S.
inline constexpr double kMinRcond = 1e-12;

CMatrix input_impedance(const ImpedancePartition& p, const LoadVector& loads);

CMatrix matching_network(const CMatrix& za, double R);

CMatrix em_precoder(const ImpedancePartition& p, const LoadVector& loads,
                    double R);

/// Immutable network for one set of loads. All derived matrices are computed
/// at construction and share one LU factorization of Zss + Z_S.
class NetworkState {
 public:
  NetworkState(std::shared_ptr<const ImpedancePartition> p, LoadVector loads,
               double R);

  const ImpedancePartition& partition() const { return *partition_; }
  const std::shared_ptr<const ImpedancePartition>& partition_ptr() const {
    return partition_;
  }
  const LoadVector& loads() const { return loads_; }
  double R() const { return R_; }
  Eigen::Index na() const { return partition_->na(); }
  Eigen::Index ns() const { return partition_->ns(); }

  const CMatrix& Za() const { return za_; }
  const CMatrix& Zm() const { return zm_; }
  const CMatrix& Wem() const { return wem_; }
  // (Zss + Z_S)^-1 Zsa
  const CMatrix& scatterer_response() const { return x_; }
  const RMatrix& re_za_sqrt() const { return root_.sqrt; }
  const RMatrix& re_za_inv_sqrt() const { return root_.inv_sqrt; }
  double rcond() const { return rcond_; }

  CVector currents(const CVector& vt) const;
  CMatrix solve_loaded(const CMatrix& rhs) const;

 private:
  std::shared_ptr<const ImpedancePartition> partition_;
  LoadVector loads_;
  double R_;
  Eigen::PartialPivLU<CMatrix> lu_;
  double rcond_ = 1.0;
  CMatrix x_, za_, zm_, wem_;
  PsdRoot root_;
};

struct CircuitSolution {
  CVector i;   // element currents, active first
  CVector v;   // element port voltages
  CVector it;  // currents entering the matching-network input ports
};

// Independent reference: assembles matching equations, the impedance
// relation and the scatterer loads into one dense system and solves it.
CircuitSolution oracle_solve(const CMatrix& zfull, Eigen::Index na,
                             const LoadVector& loads, const CVector& vt,
                             double R);

struct PowerReport {
  double radiated = 0.0;
  double reactive = 0.0;
  double q = 0.0;
};

PowerReport powers_and_q(const CVector& ia, const CMatrix& za);
// Expectation form, cov = E[ia ia^H].
PowerReport powers_and_q_covariance(const CMatrix& cov, const CMatrix& za);
// Uses E[x x^H] = (ptx/na) I with ia = Wem_a Wd x.
PowerReport powers_for_precoder(const NetworkState& s, const CMatrix& wd,
                                double ptx = 1.0);

}  // namespace dsa
