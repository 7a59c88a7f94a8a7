#include <doctest.h>

#include <cmath>
#include <string>

#include "dsa/errors.hpp"
#include "dsa/usecases.hpp"
#include "../test_util.hpp"

using namespace dsa;
using namespace dsa::test;

TEST_CASE("beamsteer target") {
  const TargetSpec t = target_beamsteer(108, 5, 2.0);
  CHECK(t.Hopt.rows() == 108);
  CHECK(t.Hopt.cols() == 1);
  CHECK(t.Hopt.norm() == std::sqrt(2.0));
  CHECK(t.Hopt(5, 0) == Complex(std::sqrt(2.0), 0.0));
  CHECK(t.k_star == 5);
  CHECK(target_beamsteer(1, 0).Hopt(0, 0) == Complex(1.0, 0.0));
  CHECK_THROWS_AS(target_beamsteer(10, 10), PreconditionError);
  CHECK_THROWS_AS(target_beamsteer(10, -1), PreconditionError);
  CHECK_THROWS_AS(target_beamsteer(10, 1, 0.0), DomainError);
  CHECK(std::string(to_string(TargetKind::SvdMimo)) == "svd-mimo");
}

TEST_CASE("zero-forcing target") {
  Rng rng(1);
  const CMatrix hc = 1e-5 * random_cmatrix(rng, 4, 4);
  const TargetSpec t = target_zf_miso(hc, 4);
  CHECK((t.Hopt - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((t.Hopt - t.Hopt.adjoint()).norm() < 1e-10);
  CHECK((t.Hopt * t.Hopt - t.Hopt).norm() < 1e-10);
  CHECK(t.rank == 4);
  CHECK(t.beta > 0.0);

  CMatrix dup = hc;
  dup.row(3) = dup.row(1);
  try {
    target_zf_miso(dup, 4);
    CHECK(false);
  } catch (const RankError& e) {
    CHECK(std::string(e.what()).find("rank 3") != std::string::npos);
  }
  CHECK_THROWS_AS(target_zf_miso(hc.topRows(3), 4), PreconditionError);
}

TEST_CASE("svd target") {
  Rng rng(2);
  const CMatrix hc = random_cmatrix(rng, 20, 6) * random_cmatrix(rng, 6, 9);
  const TargetSpec t = target_svd_mimo(hc, 4);
  CHECK(t.rank == 6);
  REQUIRE(t.U.cols() == 4);
  REQUIRE(t.V.cols() == 4);
  CHECK((t.V.adjoint() * t.V - CMatrix::Identity(4, 4)).norm() < 1e-12);
  CHECK((t.U.adjoint() * t.U - CMatrix::Identity(4, 4)).norm() < 1e-12);
  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(t.Lambda(i, i).real() >= 0.0);
    CHECK(t.Lambda(i, i).imag() == 0.0);
    if (i > 0) CHECK(t.Lambda(i, i).real() <= t.Lambda(i - 1, i - 1).real());
    Eigen::Index arg = 0;
    t.U.col(i).cwiseAbs().maxCoeff(&arg);
    CHECK(t.U(arg, i).imag() == 0.0);
    CHECK(t.U(arg, i).real() > 0.0);
  }
  const CMatrix core = t.U.adjoint() * hc * t.V;
  CHECK((core - t.Lambda).norm() < 1e-10 * t.Lambda.norm());
  CHECK((t.Hopt - t.U * t.Lambda).norm() == 0.0);

  // full reconstruction before truncation
  const TargetSpec all = target_svd_mimo(hc, 6);
  const CMatrix rec = all.U * all.Lambda * all.V.adjoint();
  CHECK((rec - hc).norm() < 1e-12 * hc.norm());

  try {
    target_svd_mimo(hc, 7);
    CHECK(false);
  } catch (const RankError& e) {
    const std::string m = e.what();
    CHECK(m.find("rank is 6") != std::string::npos);
    CHECK(m.find("dB") != std::string::npos);
  }
  CHECK_THROWS_AS(target_svd_mimo(hc, 0), PreconditionError);
}

TEST_CASE("svd target is reproducible under input phase rotation of rows") {
  Rng rng(3);
  const CMatrix hc = random_cmatrix(rng, 8, 5);
  const TargetSpec a = target_svd_mimo(hc, 3);
  const TargetSpec b = target_svd_mimo(hc * std::polar(1.0, 0.7), 3);
  CHECK((a.U - b.U).norm() < 1e-10);
  CHECK((a.Lambda - b.Lambda).norm() < 1e-12 * a.Lambda.norm());
}

TEST_CASE("user coupling metric") {
  CMatrix d = CMatrix::Zero(3, 3);
  d.diagonal() << Complex(1, 0), Complex(0, 2), Complex(-3, 0);
  const RMatrix c = metric_user_coupling(d);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(c(i, j) == (i == j ? 0.0 : -300.0));
  }
  Rng rng(4);
  const CMatrix h = random_cmatrix(rng, 3, 3);
  const RMatrix base = metric_user_coupling(h);
  CHECK(std::abs(base(0, 1) - 20 * std::log10(std::abs(h(0, 1)) / std::abs(h(0, 0)))) < 1e-12);
  CMatrix scaled = h;
  scaled.row(1) *= Complex(5.0, -2.0);
  CHECK((metric_user_coupling(scaled) - base).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((metric_user_coupling(h * std::polar(1.0, 1.3)) - base).cwiseAbs().maxCoeff() < 1e-12);
  CMatrix z = h;
  z(2, 2) = 0.0;
  CHECK_THROWS_AS(metric_user_coupling(z), DomainError);
  CHECK_THROWS_AS(metric_user_coupling(h.leftCols(2)), PreconditionError);
}

TEST_CASE("layer matrix metric") {
  Rng rng(5);
  const CMatrix hc = random_cmatrix(rng, 10, 7);
  const TargetSpec t = target_svd_mimo(hc, 3);
  // an exact fit reproduces Lambda
  const LayerMatrix m = metric_layer_matrix(t.U, t.U * t.Lambda);
  CHECK((m.lambda_hat - t.Lambda).norm() < 1e-12 * t.Lambda.norm());
  CHECK(min_row_separation_db(m.db) > 200.0);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(m.db(i, i) - 20 * std::log10(t.Lambda(i, i).real())) < 1e-9);
  }
  const CMatrix h = random_cmatrix(rng, 10, 3);
  const LayerMatrix a = metric_layer_matrix(t.U, h);
  const LayerMatrix b = metric_layer_matrix(t.U, h * std::polar(1.0, -2.1));
  CHECK((a.db - b.db).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(metric_layer_matrix(t.U, h.topRows(9)), PreconditionError);
  CHECK_THROWS_AS(metric_layer_matrix(t.U.leftCols(2), h), PreconditionError);

  RMatrix db(2, 2);
  db << -40, -120, -100, -45;
  CHECK(min_row_separation_db(db) == 55.0);
}
