#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bifree/entropy.hpp"
#include "bifree/errors.hpp"
#include "test_support.hpp"

using namespace bifree;

namespace {

const double kLog2PiE = std::log(2 * std::numbers::pi * std::numbers::e);

RealMatrix direct_sum(const RealMatrix& q, const RealMatrix& r) {
  RealMatrix t = RealMatrix::Zero(q.rows() + r.rows(), q.cols() + r.cols());
  t.topLeftCorner(q.rows(), q.cols()) = q;
  t.bottomRightCorner(r.rows(), r.cols()) = r;
  return t;
}

}  // namespace

TEST_CASE("gaussian_chi examples") {
  CHECK(gaussian_chi(CovarianceSpec(1, 1, test::pair_cov(0.5))).value.value() ==
        doctest::Approx(kLog2PiE + 0.5 * std::log(0.75)).epsilon(1e-14));
  CHECK(gaussian_chi(CovarianceSpec(1, 1, test::pair_cov(0.5))).value.value() == doctest::Approx(2.6941).epsilon(1e-4));
  CHECK(gaussian_chi(CovarianceSpec(1, 1, test::pair_cov(1.0))).value.is_neg_infinity());
  CHECK(gaussian_chi(CovarianceSpec(1, 1, test::pair_cov(-1.0))).value.is_neg_infinity());
  CHECK(gaussian_chi(CovarianceSpec(2, 3, RealMatrix::Identity(5, 5))).value.value() ==
        doctest::Approx(2.5 * kLog2PiE));
}

TEST_CASE("gaussian_chi is the differential entropy of the Gaussian") {
  Engine e = make_engine(1);
  for (int trial = 0; trial < 50; ++trial) {
    const RealMatrix a = test::random_psd(4, e) + 0.1 * RealMatrix::Identity(4, 4);
    const Eigen::LLT<RealMatrix> llt(a);
    double half_logdet = 0.0;
    for (int i = 0; i < 4; ++i) half_logdet += std::log(RealMatrix(llt.matrixL())(i, i));
    const double h = 2 * std::log(2 * std::numbers::pi) + 2.0 + half_logdet;
    CHECK(std::abs(gaussian_chi(CovarianceSpec(2, 2, a)).value.value() - h) < 1e-12);
  }
}

TEST_CASE("transform_chi") {
  Engine e = make_engine(2);
  const CovarianceSpec cov(2, 1, test::random_psd(3, e));
  const ChiValue chi = gaussian_chi(cov);
  CHECK(transform_chi(chi, RealMatrix::Identity(2, 2), RealMatrix::Identity(1, 1)).value == chi.value);
  for (int trial = 0; trial < 100; ++trial) {
    const CovarianceSpec a(2, 2, test::random_psd(4, e) + 0.05 * RealMatrix::Identity(4, 4));
    const RealMatrix q = test::random_invertible(2, e);
    const RealMatrix r = test::random_invertible(2, e);
    const RealMatrix t = direct_sum(q, r);
    const RealMatrix pushed = t * a.matrix() * t.transpose();
    const double direct = gaussian_chi(CovarianceSpec(2, 2, 0.5 * (pushed + pushed.transpose()))).value.value();
    CHECK(std::abs(transform_chi(gaussian_chi(a), q, r).value.value() - direct) < 1e-10);
    CHECK(gaussian_delta(CovarianceSpec(2, 2, 0.5 * (pushed + pushed.transpose()))) == gaussian_delta(a));
  }
  RealMatrix singular(2, 2);
  singular << 1, 2, 2, 4;
  CHECK(transform_chi(chi, singular, RealMatrix::Identity(1, 1)).value.is_neg_infinity());
  CHECK(transform_chi(ChiValue{ExtendedReal::neg_infinity()}, RealMatrix::Identity(2, 2), RealMatrix::Identity(1, 1))
            .value.is_neg_infinity());
  CHECK_THROWS_AS(transform_chi(chi, RealMatrix::Identity(3, 3), RealMatrix::Identity(1, 1)), InvalidArgument);
  CHECK(shift_chi(chi).value == chi.value);
}

TEST_CASE("chi_upper_bound") {
  const std::vector<double> ones{1.0, 1.0};
  CHECK(chi_upper_bound(ones).value() == doctest::Approx(kLog2PiE));
  const std::vector<double> zeros{0.0, 0.0};
  CHECK(chi_upper_bound(zeros).is_neg_infinity());
  Engine e = make_engine(3);
  for (int trial = 0; trial < 100; ++trial) {
    const CovarianceSpec a(2, 1, test::random_psd(3, e));
    const std::vector<double> diag{a(0, 0), a(1, 1), a(2, 2)};
    CHECK(gaussian_chi(a).value <= chi_upper_bound(diag));
  }
}

TEST_CASE("subadditivity_gap") {
  const double c = 0.6;
  CHECK(subadditivity_gap(CovarianceSpec(1, 1, test::pair_cov(c)), 1, 0) ==
        doctest::Approx(-0.5 * std::log(1 - c * c)));
  CHECK(subadditivity_gap(CovarianceSpec(1, 1, test::pair_cov(0.0)), 1, 0) == doctest::Approx(0.0));
  Engine e = make_engine(4);
  for (int trial = 0; trial < 200; ++trial) {
    const CovarianceSpec a(2, 2, test::random_psd(4, e));
    CHECK(subadditivity_gap(a, 1, 1) >= -1e-10);
    RealMatrix block = RealMatrix::Zero(4, 4);
    // Variables X1 X2 Y1 Y2; the blocks are {X1, Y1} = {0, 2} and {X2, Y2} = {1, 3}.
    const RealMatrix b1 = test::random_psd(2, e), b2 = test::random_psd(2, e);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        block(2 * i, 2 * j) = b1(i, j);
        block(2 * i + 1, 2 * j + 1) = b2(i, j);
      }
    CHECK(std::abs(subadditivity_gap(CovarianceSpec(2, 2, block), 1, 1)) < 1e-10);
  }
  CHECK_THROWS_AS(subadditivity_gap(CovarianceSpec(1, 1, test::pair_cov(0.1)), 2, 0), InvalidArgument);
}

TEST_CASE("entropy dimension") {
  CHECK(gaussian_delta(CovarianceSpec(1, 1, test::pair_cov(0.3))) == 2);
  CHECK(gaussian_delta(CovarianceSpec(1, 1, test::pair_cov(1.0))) == 1);
  CHECK(gaussian_delta(CovarianceSpec(1, 1, test::pair_cov(-1.0))) == 1);
  CHECK(gaussian_delta(CovarianceSpec(1, 1, RealMatrix::Zero(2, 2))) == 0);
  CHECK(gaussian_delta(CovarianceSpec(3, 2, RealMatrix::Identity(5, 5))) == 5);

  const std::vector<double> grid{1e-4, 1e-6, 1e-8};
  CHECK(std::abs(numeric_delta(CovarianceSpec(1, 1, test::pair_cov(1.0)), grid) - 1.0) < 0.05);
  CHECK(std::abs(numeric_delta(CovarianceSpec(1, 1, RealMatrix::Identity(2, 2)), grid) - 2.0) < 0.05);
  CHECK(std::abs(numeric_delta(CovarianceSpec(1, 1, RealMatrix::Zero(2, 2)), grid) - 0.0) < 0.05);

  Engine e = make_engine(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int rank = trial % 5;
    const CovarianceSpec a(2, 2, test::planted_rank(4, rank, e));
    CHECK(gaussian_delta(a) == rank);
    CHECK(std::abs(numeric_delta(a, grid) - rank) < 0.05);
  }
  const std::vector<double> short_grid{1e-4, 1e-5};
  CHECK_THROWS_AS(numeric_delta(CovarianceSpec(1, 1, test::pair_cov(0.0)), short_grid), InvalidArgument);
  const std::vector<double> narrow{1e-4, 2e-4, 5e-4};
  CHECK_THROWS_AS(numeric_delta(CovarianceSpec(1, 1, test::pair_cov(0.0)), narrow), InvalidArgument);
}
