// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "dsa/types.hpp"

namespace dsa {

enum class TargetKind { Beamsteer, ZfMiso, SvdMimo };

const char* to_string(TargetKind k);

struct TargetSpec {
  TargetKind kind = TargetKind::Beamsteer;
  CMatrix Hopt;  // K x N_a
  // svd-mimo factors, truncated to the requested number of layers
  CMatrix U;        // K x r
  CMatrix Lambda;   // r x r, real non-negative diagonal
  CMatrix V;        // N x r
  RVector singular_values;  // all of them, descending
  int rank = 0;             // numerical rank of the channel
  int k_star = -1;          // beamsteer test point
  double prx = 0.0;
  double beta = 0.0;        // zf-miso normalization, metadata only
};

// Single nonzero entry sqrt(prx) at row k_star.
TargetSpec target_beamsteer(int k, int k_star, double prx = 1.0);

// Hopt = Hc Hc^+ for K = N_a users. Throws RankError below full row rank.
TargetSpec target_zf_miso(const CMatrix& hc, int na);

// Hc = U Lambda V^H truncated to `na` layers, Hopt = U_r Lambda_r. The
// largest-magnitude entry of each left singular vector is made real positive.
TargetSpec target_svd_mimo(const CMatrix& hc, int na);

// Entry (k, j) = 20 log10 |H_kj| / |H_kk|, diagonal 0 dB, floor -300 dB.
RMatrix metric_user_coupling(const CMatrix& h);

struct LayerMatrix {
  CMatrix lambda_hat;  // na x na
  RMatrix db;          // 20 log10 |entry|, floor -300 dB
};

// Lambda_hat = (U^H H) restricted to the first na rows.
LayerMatrix metric_layer_matrix(const CMatrix& u, const CMatrix& h);

// Smallest gap in dB between each diagonal entry and the off-diagonals of
// its row.
double min_row_separation_db(const RMatrix& db);

}  // namespace dsa
