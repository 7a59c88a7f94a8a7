// SPDX-License-Identifier: Apache-2.0
#include "dsa/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "dsa/errors.hpp"
#include "dsa/linalg.hpp"
#include "dsa/parallel.hpp"
#include "dsa/random.hpp"

namespace dsa {

const char* to_string(ObjectiveVariant v) {
  return v == ObjectiveVariant::Direct ? "direct" : "u-projected";
}

const char* to_string(ThetaInit v) {
  switch (v) {
    case ThetaInit::Zeros: return "zeros";
    case ThetaInit::Random: return "random";
    case ThetaInit::Resonant: return "resonant";
  }
  return "zeros";
}

CMatrix OptProblem::channel() const {
  if (variant == ObjectiveVariant::UProjected) return U.adjoint() * Hc;
  return Hc;
}

const CMatrix& OptProblem::target() const {
  return variant == ObjectiveVariant::UProjected ? Lambda : Hopt;
}

void OptProblem::validate() const {
  if (!partition) throw PreconditionError("problem: missing impedance");
  if (Hc.cols() != partition->n()) {
    throw PreconditionError("problem: Hc must have N columns");
  }
  if (ni < 1 || nalt < 1) throw PreconditionError("problem: Ni, Nalt >= 1");
  if (!(R > 0.0)) throw DomainError("problem: R must be positive");
  if (variant == ObjectiveVariant::Direct) {
    if (Hopt.rows() != Hc.rows() || Hopt.cols() != na()) {
      throw PreconditionError("problem: Hopt must be K x N_a");
    }
  } else {
    if (U.rows() != Hc.rows() || Lambda.rows() != U.cols() ||
        Lambda.cols() != na()) {
      throw PreconditionError("problem: U is K x r and Lambda r x N_a");
    }
  }
}

double penalty_value(const CMatrix& target) {
  const double t = target.norm();
  return 1e12 * (t > 0.0 ? t : 1.0);
}

double objective(const RVector& theta, const CMatrix& wd, double alpha,
                 const OptProblem& problem) {
  const CMatrix& t = problem.target();
  try {
    const NetworkState s(problem.partition, LoadVector(theta), problem.R);
    const double f = (alpha * problem.channel() * s.Wem() * wd - t).norm();
    return std::isfinite(f) ? f : penalty_value(t);
  } catch (const ResonanceError&) {
    return penalty_value(t);
  } catch (const ModelViolation&) {
    return penalty_value(t);
  }
}

ClosedFormResult closed_form_step(const CMatrix& channel_wem,
                                  const CMatrix& target, double R,
                                  Eigen::Index na) {
  if (channel_wem.rows() != target.rows() || channel_wem.cols() != na ||
      target.cols() != na) {
    throw PreconditionError("closed_form_step: dimension mismatch");
  }
  if (!(target.norm() > 0.0)) {
    throw DomainError("closed_form_step: degenerate (zero) target");
  }
  const Pinv pi = pseudo_inverse(channel_wem);
  const CMatrix m = pi.matrix * target;
  const double mn = m.norm();
  if (!(mn > 0.0)) {
    throw RankError("closed_form_step: target is orthogonal to the channel");
  }
  ClosedFormResult out;
  out.rank = pi.rank;
  out.alpha_hat = mn / std::sqrt(R * static_cast<double>(na));
  out.Wd_hat = m / out.alpha_hat;
  return out;
}

ReactanceObjective::ReactanceObjective(
    std::shared_ptr<const ImpedancePartition> p, CMatrix c, CMatrix target,
    CMatrix wd, double alpha, double R)
    : p_(std::move(p)),
      c_(std::move(c)),
      target_(std::move(target)),
      wd_(std::move(wd)),
      alpha_(alpha),
      R_(R),
      penalty_(penalty_value(target_)) {
  if (!p_ || c_.cols() != p_->n() || wd_.rows() != p_->na() ||
      target_.rows() != c_.rows() || target_.cols() != wd_.cols()) {
    throw PreconditionError("ReactanceObjective: dimension mismatch");
  }
}

double ReactanceObjective::value(const RVector& theta) const {
  try {
    const NetworkState s(p_, LoadVector(theta), R_);
    const double f = (alpha_ * (c_ * s.Wem()) * wd_ - target_).norm();
    return std::isfinite(f) ? f : penalty_;
  } catch (const ResonanceError&) {
    return penalty_;
  } catch (const ModelViolation&) {
    return penalty_;
  } catch (const DomainError&) {
    return penalty_;
  }
}

double ReactanceObjective::eval_from_parts(const CMatrix& za,
                                           const CMatrix& y) const {
  try {
    const PsdRoot root = psd_sqrt(za.real(), true);
    const Complex scale = alpha_ / (kJ * std::sqrt(R_));
    const double f =
        (scale * (y * root.inv_sqrt.cast<Complex>()) * wd_ - target_).norm();
    return std::isfinite(f) ? f : penalty_;
  } catch (const ModelViolation&) {
    return penalty_;
  }
}

RVector ReactanceObjective::gradient(const RVector& theta) const {
  const Eigen::Index ns = p_->ns(), na = p_->na();
  RVector g = RVector::Zero(ns);
  if (ns == 0) return g;
  if (theta.size() != ns || !theta.allFinite()) {
    throw PreconditionError("gradient: theta must be finite with N_s entries");
  }
  CMatrix a = p_->Zss;
  a.diagonal() += kJ * theta.cast<Complex>();
  Eigen::PartialPivLU<CMatrix> lu(a);
  if (!(lu.rcond() >= kMinRcond)) {
    return central_difference_gradient(
        [this](const RVector& t) { return value(t); }, theta);
  }
  const CMatrix b = lu.inverse();
  const CMatrix x = b * p_->Zsa;
  const CMatrix za = p_->Zaa - p_->Zas * x;
  const CMatrix cs = c_.rightCols(ns);
  const CMatrix q = cs * b;
  const CMatrix y = c_.leftCols(na) - cs * x;
  for (Eigen::Index n = 0; n < ns; ++n) {
    const double h = std::max(1e-6, 1e-8 * std::abs(theta(n)));
    const CMatrix xn = x.row(n);
    const CMatrix outer = xn.transpose() * xn;
    const CMatrix qx = q.col(n) * xn;
    double fp = 0.0, fm = 0.0;
    for (int side = 0; side < 2; ++side) {
      const double delta = side == 0 ? h : -h;
      // Sherman-Morrison for (A + j delta e_n e_n^T)^-1
      const Complex gamma = kJ * delta / (1.0 + kJ * delta * b(n, n));
      const double f = eval_from_parts(za + gamma * outer, y + gamma * qx);
      (side == 0 ? fp : fm) = f;
    }
    g(n) = (fp - fm) / (2.0 * h);
  }
  return g;
}

RVector central_difference_gradient(const ScalarFunction& f,
                                    const RVector& theta) {
  RVector g(theta.size());
  RVector t = theta;
  for (Eigen::Index n = 0; n < theta.size(); ++n) {
    const double h = std::max(1e-6, 1e-8 * std::abs(theta(n)));
    t(n) = theta(n) + h;
    const double fp = f(t);
    t(n) = theta(n) - h;
    const double fm = f(t);
    t(n) = theta(n);
    g(n) = (fp - fm) / (2.0 * h);
  }
  return g;
}

RVector forward_difference_gradient(const ScalarFunction& f,
                                    const RVector& theta, double rel) {
  RVector g(theta.size());
  RVector t = theta;
  const double f0 = f(theta);
  for (Eigen::Index n = 0; n < theta.size(); ++n) {
    const double h = rel * std::max(1.0, std::abs(theta(n)));
    t(n) = theta(n) + h;
    g(n) = (f(t) - f0) / h;
    t(n) = theta(n);
  }
  return g;
}

namespace {

// Inverse-Hessian approximation, dense or limited memory.
class InverseHessian {
 public:
  InverseHessian(Eigen::Index n, bool limited, int memory)
      : n_(n), limited_(limited), memory_(memory) {
    reset();
  }

  void reset() {
    fresh_ = true;
    if (limited_) {
      s_.clear();
      y_.clear();
      gamma_ = 1.0;
    } else {
      h_ = RMatrix::Identity(n_, n_);
    }
  }

  bool fresh() const { return fresh_; }

  RVector apply(const RVector& g) const {
    if (!limited_) return h_ * g;
    RVector q = g;
    const std::size_t m = s_.size();
    std::vector<double> al(m), rho(m);
    for (std::size_t i = m; i-- > 0;) {
      rho[i] = 1.0 / y_[i].dot(s_[i]);
      al[i] = rho[i] * s_[i].dot(q);
      q -= al[i] * y_[i];
    }
    RVector r = gamma_ * q;
    for (std::size_t i = 0; i < m; ++i) {
      const double be = rho[i] * y_[i].dot(r);
      r += s_[i] * (al[i] - be);
    }
    return r;
  }

  // Returns false when the curvature condition fails (caller restarts).
  bool update(const RVector& s, const RVector& y) {
    const double sy = s.dot(y);
    const double yy = y.dot(y);
    if (!(sy > 1e-12 * s.norm() * y.norm()) || !std::isfinite(sy) ||
        !(yy > 0.0)) {
      return false;
    }
    if (limited_) {
      gamma_ = sy / yy;
      s_.push_back(s);
      y_.push_back(y);
      if (static_cast<int>(s_.size()) > memory_) {
        s_.pop_front();
        y_.pop_front();
      }
    } else {
      if (fresh_) h_ *= sy / yy;
      const RVector hy = h_ * y;
      const double yhy = y.dot(hy);
      h_ += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) -
            (hy * s.transpose() + s * hy.transpose()) / sy;
    }
    fresh_ = false;
    return true;
  }

 private:
  Eigen::Index n_;
  bool limited_;
  int memory_;
  bool fresh_ = true;
  RMatrix h_;
  std::deque<RVector> s_, y_;
  double gamma_ = 1.0;
};

}  // namespace

QuasiNewtonResult quasi_newton_minimize(const ScalarFunction& f,
                                        const RVector& theta0,
                                        const QuasiNewtonOptions& opt,
                                        const GradientFunction& grad) {
  GradientFunction gfun = grad;
  if (!gfun) {
    gfun = [&f](const RVector& t) { return central_difference_gradient(f, t); };
  }
  QuasiNewtonResult res;
  res.theta = theta0;
  res.f0 = f(theta0);
  if (!std::isfinite(res.f0)) {
    throw DomainError("quasi_newton_minimize: objective not finite at start");
  }
  res.f = res.f0;
  res.history.push_back(res.f);
  const Eigen::Index n = theta0.size();
  if (n == 0) {
    res.stop_reason = "no variables";
    return res;
  }
  res.limited_memory = n > opt.lbfgs_threshold;
  InverseHessian hinv(n, res.limited_memory, opt.lbfgs_memory);
  RVector g = gfun(res.theta);
  res.stop_reason = "max_iterations";
  while (res.iterations < opt.max_iterations) {
    const double gn = g.norm();
    if (!std::isfinite(gn)) {
      res.stop_reason = "nonfinite_gradient";
      break;
    }
    if (gn < opt.grad_tol * std::max(1.0, std::abs(res.f))) {
      res.stop_reason = "gradient";
      break;
    }
    RVector p = -hinv.apply(g);
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      hinv.reset();
      ++res.restarts;
      p = -g;
      slope = -gn * gn;
    }
    double t = 1.0;
    bool accepted = false;
    RVector xn;
    double fn = 0.0;
    for (int bt = 0; bt < opt.max_backtracks; ++bt) {
      xn = res.theta + t * p;
      fn = f(xn);
      if (std::isfinite(fn) && fn <= res.f + opt.armijo_c1 * t * slope) {
        accepted = true;
        break;
      }
      t *= opt.backtrack;
    }
    if (!accepted) {
      if (hinv.fresh()) {
        res.stop_reason = "line_search";
        break;
      }
      hinv.reset();
      ++res.restarts;
      continue;
    }
    const RVector gnew = gfun(xn);
    const RVector s = xn - res.theta;
    const RVector y = gnew - g;
    if (!hinv.update(s, y)) {
      hinv.reset();
      ++res.restarts;
    }
    res.theta = xn;
    res.f = fn;
    g = gnew;
    ++res.iterations;
    res.history.push_back(res.f);
  }
  return res;
}

RVector initial_theta(const OptProblem& problem) {
  const Eigen::Index ns = problem.ns();
  switch (problem.init) {
    case ThetaInit::Zeros:
      return RVector::Zero(ns);
    case ThetaInit::Random: {
      Rng rng(problem.seed);
      RVector t(ns);
      for (Eigen::Index i = 0; i < ns; ++i) {
        t(i) = rng.uniform(-problem.random_half_range,
                           problem.random_half_range);
      }
      return t;
    }
    case ThetaInit::Resonant:
      // cancels each scatterer's own reactance
      return -problem.partition->Zss.diagonal().imag();
  }
  return RVector::Zero(ns);
}

namespace {

void record(OptSolution& sol, int step, double r) {
  sol.residual_history.push_back(r);
  sol.history_steps.push_back(step);
}

}  // namespace

OptSolution alternate_optimize(const OptProblem& problem) {
  problem.validate();
  const CMatrix c = problem.channel();
  const CMatrix& target = problem.target();
  const Eigen::Index na = problem.na();
  const double R = problem.R;
  QuasiNewtonOptions qopt;
  qopt.max_iterations = problem.ni;

  OptSolution sol;
  RVector theta = initial_theta(problem);

  auto step1 = [&](const RVector& th) {
    const NetworkState s(problem.partition, LoadVector(th), R);
    return closed_form_step(c * s.Wem(), target, R, na);
  };
  auto step2 = [&](const RVector& th, const CMatrix& wd, double alpha) {
    const ReactanceObjective obj(problem.partition, c, target, wd, alpha, R);
    QuasiNewtonResult q = quasi_newton_minimize(
        [&obj](const RVector& t) { return obj.value(t); }, th, qopt,
        [&obj](const RVector& t) { return obj.gradient(t); });
    return std::make_pair(q, obj.penalty());
  };

  if (!problem.digital_precoding) {
    // Fixed Wd = sqrt(R) I; alpha from the closed-form step at the initial
    // loads, then a single reactance fit.
    sol.Wd_hat = std::sqrt(R) * CMatrix::Identity(na, na);
    sol.alpha_hat = step1(theta).alpha_hat;
    record(sol, 1, objective(theta, sol.Wd_hat, sol.alpha_hat, problem));
    auto [q, pen] = step2(theta, sol.Wd_hat, sol.alpha_hat);
    sol.theta_hat = q.theta;
    sol.total_iterations = q.iterations;
    sol.alternations = 1;
    record(sol, 2, q.f);
    sol.stop_reason = q.stop_reason;
    sol.converged = q.stop_reason != "nonfinite_gradient" && q.f < pen;
    return sol;
  }

  const double floor = 1e-14 * target.norm();
  double prev = std::numeric_limits<double>::infinity();
  bool breakdown = false;
  for (int alt = 0; alt < problem.nalt; ++alt) {
    const ClosedFormResult cf = step1(theta);
    sol.alpha_hat = cf.alpha_hat;
    sol.Wd_hat = cf.Wd_hat;
    record(sol, 1, objective(theta, cf.Wd_hat, cf.alpha_hat, problem));
    auto [q, pen] = step2(theta, cf.Wd_hat, cf.alpha_hat);
    theta = q.theta;
    sol.total_iterations += q.iterations;
    sol.alternations = alt + 1;
    record(sol, 2, q.f);
    sol.stop_reason = q.stop_reason;
    if (q.stop_reason == "nonfinite_gradient" || !(q.f < pen)) {
      breakdown = true;
      break;
    }
    if (q.f <= floor) {
      sol.converged = true;
      sol.stop_reason = "exact_fit";
      break;
    }
    if (std::abs(prev - q.f) < 1e-6 * prev) {
      sol.converged = true;
      sol.stop_reason = "residual_stalled";
      break;
    }
    prev = q.f;
  }
  if (!breakdown) {
    const ClosedFormResult cf = step1(theta);
    sol.alpha_hat = cf.alpha_hat;
    sol.Wd_hat = cf.Wd_hat;
    record(sol, 1, objective(theta, cf.Wd_hat, cf.alpha_hat, problem));
  }
  sol.theta_hat = theta;
  if (!sol.converged && !breakdown) sol.stop_reason = "alternation_budget";
  return sol;
}

RVector perturb_theta(const RVector& theta, double sigma_rel,
                      std::uint64_t seed) {
  Rng rng(seed);
  RVector out = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    out(i) += sigma_rel * std::abs(theta(i)) * rng.normal();
  }
  return out;
}

std::vector<PerturbationStats> perturb_analysis(
    std::shared_ptr<const ImpedancePartition> p, const CMatrix& hc_row,
    double friis, const RVector& theta_hat, const CMatrix& wd, double R,
    const std::vector<double>& sigma_rel, int trials, std::uint64_t seed,
    int threads) {
  if (trials < 1) throw PreconditionError("perturb_analysis: trials >= 1");
  if (hc_row.rows() != 1 || hc_row.cols() != p->n()) {
    throw PreconditionError("perturb_analysis: Hc row must be 1 x N");
  }
  const double wn = wd.squaredNorm();
  std::vector<PerturbationStats> out;
  for (std::size_t si = 0; si < sigma_rel.size(); ++si) {
    std::vector<double> gains(trials, -1.0);
    parallel_for(static_cast<std::size_t>(trials), threads,
                 [&](std::size_t t) {
      const RVector th = perturb_theta(
          theta_hat, sigma_rel[si],
          derive_seed(seed, si * static_cast<std::size_t>(trials) + t));
      try {
        const NetworkState s(p, LoadVector(th), R);
        const CMatrix h = hc_row * s.Wem() * wd;
        gains[t] = R * h.squaredNorm() / wn * friis;
      } catch (const ResonanceError&) {
      } catch (const ModelViolation&) {
      }
    });
    PerturbationStats st;
    st.sigma_rel = sigma_rel[si];
    double sum = 0.0, sdb = 0.0;
    std::vector<double> dbs;
    st.min_db = std::numeric_limits<double>::infinity();
    st.max_db = -std::numeric_limits<double>::infinity();
    for (double g : gains) {
      if (g < 0.0) {
        ++st.failed_trials;
        continue;
      }
      ++st.trials;
      const double db = to_db_power(g);
      dbs.push_back(db);
      sum += g;
      sdb += db;
      st.min_db = std::min(st.min_db, db);
      st.max_db = std::max(st.max_db, db);
    }
    if (st.trials > 0) {
      st.mean_gain_db = to_db_power(sum / st.trials);
      st.mean_of_db = sdb / st.trials;
      // two passes; the one-pass form cancels badly around 20 dB
      double ss = 0.0;
      for (double db : dbs) ss += (db - st.mean_of_db) * (db - st.mean_of_db);
      st.std_db = std::sqrt(ss / st.trials);
    }
    out.push_back(st);
  }
  return out;
}

}  // namespace dsa
