// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dsa/network.hpp"
#include "dsa/types.hpp"

namespace dsa {

enum class ObjectiveVariant { Direct, UProjected };
enum class ThetaInit { Zeros, Random, Resonant };

const char* to_string(ObjectiveVariant v);
const char* to_string(ThetaInit v);

struct OptProblem {
  std::shared_ptr<const ImpedancePartition> partition;
  CMatrix Hc;    // K x N transimpedance
  CMatrix Hopt;  // K x N_a (direct) target
  // UProjected: minimize ||alpha U^H Hc Wem Wd - Lambda||. U is K x r,
  // Lambda is r x N_a.
  ObjectiveVariant variant = ObjectiveVariant::Direct;
  CMatrix U;
  CMatrix Lambda;

  double R = 50.0;
  int ni = 1500;   // quasi-Newton iterations per STEP 2
  int nalt = 1;    // alternations
  bool digital_precoding = true;
  ThetaInit init = ThetaInit::Zeros;
  std::uint64_t seed = 0;
  double random_half_range = 500.0;

  Eigen::Index na() const { return partition ? partition->na() : 0; }
  Eigen::Index ns() const { return partition ? partition->ns() : 0; }
  // Effective (channel, target) pair the objective works with.
  CMatrix channel() const;
  const CMatrix& target() const;
  void validate() const;
};

struct OptSolution {
  RVector theta_hat;
  CMatrix Wd_hat;
  double alpha_hat = 0.0;
  std::vector<double> residual_history;
  // 1 after a STEP 1, 2 after a STEP 2, aligned with residual_history.
  std::vector<int> history_steps;
  bool converged = false;
  int alternations = 0;
  int total_iterations = 0;
  std::string stop_reason;
};

// Large finite value used when theta makes the network singular.
double penalty_value(const CMatrix& target);

// ||alpha C Wem(theta) Wd - T||_F with (C, T) from the problem variant.
double objective(const RVector& theta, const CMatrix& wd, double alpha,
                 const OptProblem& problem);

struct ClosedFormResult {
  double alpha_hat = 0.0;
  CMatrix Wd_hat;
  int rank = 0;
};

// alpha Wd = B^+ T with B = channel * Wem, scaled so ||Wd||_F^2 = R na.
ClosedFormResult closed_form_step(const CMatrix& channel_wem,
                                  const CMatrix& target, double R,
                                  Eigen::Index na);

/// theta -> ||alpha C Wem(theta) Wd - T||_F with a fast central-difference
/// gradient: each perturbed evaluation is a rank-one update of the base
/// factorization instead of a new LU.
class ReactanceObjective {
 public:
  ReactanceObjective(std::shared_ptr<const ImpedancePartition> p, CMatrix c,
                     CMatrix target, CMatrix wd, double alpha, double R);

  double value(const RVector& theta) const;
  RVector gradient(const RVector& theta) const;
  double penalty() const { return penalty_; }

 private:
  double eval_from_parts(const CMatrix& za, const CMatrix& y) const;

  std::shared_ptr<const ImpedancePartition> p_;
  CMatrix c_, target_, wd_;
  double alpha_, R_, penalty_;
};

using ScalarFunction = std::function<double(const RVector&)>;
using GradientFunction = std::function<RVector(const RVector&)>;

// h_n = max(1e-6, 1e-8 |theta_n|)
RVector central_difference_gradient(const ScalarFunction& f,
                                    const RVector& theta);
RVector forward_difference_gradient(const ScalarFunction& f,
                                    const RVector& theta, double rel = 1e-7);

struct QuasiNewtonOptions {
  int max_iterations = 1500;
  double grad_tol = 1e-9;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
  Eigen::Index lbfgs_threshold = 500;
  int lbfgs_memory = 10;
};

struct QuasiNewtonResult {
  RVector theta;
  double f = 0.0;
  double f0 = 0.0;
  int iterations = 0;
  int restarts = 0;
  std::vector<double> history;  // f after every accepted step, f0 first
  std::string stop_reason;
  bool limited_memory = false;
};

// BFGS (limited memory above lbfgs_threshold variables) with Armijo
// backtracking. The initial inverse Hessian is rescaled by s^T y / y^T y at
// the first update and after each restart.
QuasiNewtonResult quasi_newton_minimize(const ScalarFunction& f,
                                        const RVector& theta0,
                                        const QuasiNewtonOptions& opt = {},
                                        const GradientFunction& grad = {});

RVector initial_theta(const OptProblem& problem);

OptSolution alternate_optimize(const OptProblem& problem);

struct PerturbationStats {
  double sigma_rel = 0.0;
  int trials = 0;
  double mean_gain_db = 0.0;     // 10 log10 of the mean linear gain
  double mean_of_db = 0.0;       // mean of per-trial dB values
  double std_db = 0.0;           // std of per-trial dB values
  double min_db = 0.0;
  double max_db = 0.0;
  int failed_trials = 0;         // networks that became singular
};

// Gain at a single steering point under theta_n' = theta_n + N(0,
// (sigma |theta_n|)^2). Trial t of sigma index s uses seed
// derive_seed(seed, s * trials + t), so results do not depend on threads.
std::vector<PerturbationStats> perturb_analysis(
    std::shared_ptr<const ImpedancePartition> p, const CMatrix& hc_row,
    double friis, const RVector& theta_hat, const CMatrix& wd, double R,
    const std::vector<double>& sigma_rel, int trials, std::uint64_t seed,
    int threads = 1);

// Applies multiplicative Gaussian errors to theta: one draw per element.
RVector perturb_theta(const RVector& theta, double sigma_rel,
                      std::uint64_t seed);

}  // namespace dsa
