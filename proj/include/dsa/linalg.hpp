// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dsa/types.hpp"

namespace dsa {

struct PsdRoot {
  RMatrix sqrt;      // symmetric PSD square root
  RMatrix inv_sqrt;  // inverse root, empty when singular
  double min_eigenvalue = 0.0;
};

// Principal root of a real symmetric matrix. Eigenvalues in [-clamp, 0] are
// set to 0, below -clamp throw ModelViolation. When `need_inverse` is set a
// zero eigenvalue is also a ModelViolation.
PsdRoot psd_sqrt(const RMatrix& a, bool need_inverse = true,
                 double clamp = 1e-10);

struct Pinv {
  CMatrix matrix;
  int rank = 0;
  RVector singular_values;
};

// Moore-Penrose inverse via SVD; values below rel_tol * s_max are dropped.
Pinv pseudo_inverse(const CMatrix& a, double rel_tol = 1e-12);

// 20 log10(|x|); exact zeros map to floor_db.
double to_db_amplitude(double magnitude, double floor_db = -300.0);
// 10 log10(p); exact zeros map to floor_db.
double to_db_power(double power, double floor_db = -300.0);

// max |a - b| / max(|b|) over entries; 0 when both are zero.
double relative_error(const CMatrix& a, const CMatrix& b);

}  // namespace dsa
