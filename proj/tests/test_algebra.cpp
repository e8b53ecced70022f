#include <doctest.h>

#include "support.hpp"

using namespace ckit;
using namespace ckit::testing;

TEST_CASE("multiplication basics") {
  MultiMatrixAlgebra b({1, 2});
  AlgebraElement one = AlgebraElement::identity(b);
  auto rng = make_rng(1);
  AlgebraElement x = random_element(rng, b);
  CHECK((mul(one, x) - x).norm() == doctest::Approx(0.0));

  // involution: (1, sigma_x)^2 = 1
  AlgebraElement s = AlgebraElement::zero(b);
  s.blocks[0](0, 0) = 1.0;
  s.blocks[1] << 0, 1, 1, 0;
  CHECK((mul(s, s) - one).norm() < 1e-14);
}

TEST_CASE("product agrees with the dense block-diagonal embedding") {
  MultiMatrixAlgebra b({1, 2, 3});
  auto rng = make_rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    AlgebraElement x = random_element(rng, b), y = random_element(rng, b);
    Mat dense = dense_embedding(x) * dense_embedding(y);
    CHECK((dense - dense_embedding(mul(x, y))).norm() < 1e-12);
    // adjoint compatibility (ab)* = b*a*
    CHECK((mul(x, y).adjoint() - mul(y.adjoint(), x.adjoint())).norm() < 1e-12);
  }
}

TEST_CASE("C* identity") {
  MultiMatrixAlgebra b({2, 3});
  auto rng = make_rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    AlgebraElement x = random_element(rng, b);
    double lhs = mul(x.adjoint(), x).norm();
    double rhs = x.norm() * x.norm();
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, rhs));
  }
}

TEST_CASE("psd_sqrt") {
  MultiMatrixAlgebra b({2});
  AlgebraElement d = AlgebraElement::zero(b);
  d.blocks[0] << 4, 0, 0, 9;
  AlgebraElement s = psd_sqrt(d);
  CHECK(s.blocks[0](0, 0).real() == doctest::Approx(2.0));
  CHECK(s.blocks[0](1, 1).real() == doctest::Approx(3.0));

  CHECK((psd_sqrt(AlgebraElement::identity(b)) - AlgebraElement::identity(b)).norm() < 1e-14);

  MultiMatrixAlgebra big({1, 2, 3});
  auto rng = make_rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    AlgebraElement x = random_element(rng, big);
    AlgebraElement p = mul(x.adjoint(), x);
    AlgebraElement r = psd_sqrt(p);
    CHECK((mul(r, r) - p).norm() < 1e-10 * std::max(1.0, p.norm()));
    CHECK(min_eigenvalue(r) > -1e-12);
  }

  AlgebraElement neg = AlgebraElement::zero(b);
  neg.blocks[0] << -1, 0, 0, 1;
  CHECK_THROWS_AS(psd_sqrt(neg), NotPositiveError);
}

TEST_CASE("invert") {
  MultiMatrixAlgebra b({1, 2});
  AlgebraElement two = AlgebraElement::zero(b);
  two.blocks[0](0, 0) = 2.0;
  two.blocks[1] = 2.0 * Mat::Identity(2, 2);
  AlgebraElement half = invert(two);
  CHECK((mul(two, half) - AlgebraElement::identity(b)).norm() < 1e-14);
  CHECK(half.blocks[0](0, 0).real() == doctest::Approx(0.5));

  auto rng = make_rng(5);
  MultiMatrixAlgebra big({2, 3});
  for (int trial = 0; trial < 10; ++trial) {
    AlgebraElement x = random_element(rng, big);
    x += 4.0 * AlgebraElement::identity(big);  // keep it well conditioned
    AlgebraElement inv = invert(x);
    CHECK((mul(x, inv) - AlgebraElement::identity(big)).norm() < 1e-9);
    CHECK((invert(inv) - x).norm() < 1e-8 * std::max(1.0, x.norm()));
  }

  AlgebraElement sing = AlgebraElement::zero(b);
  sing.blocks[0](0, 0) = 1.0;
  sing.blocks[1] << 1, 0, 0, 0;
  try {
    invert(sing);
    CHECK(false);
  } catch (const NotInvertibleError& err) {
    CHECK(err.block == 1);
    CHECK(err.singular_value < 1e-12);
  }
}

TEST_CASE("parent mismatch is a structural error") {
  MultiMatrixAlgebra a({2}), b({1, 2});
  CHECK_THROWS_AS(mul(AlgebraElement::identity(a), AlgebraElement::identity(b)), StructuralError);
}

TEST_CASE("monotone calculus on a shared eigenbasis") {
  // psd_sqrt preserves order for commuting positive elements
  MultiMatrixAlgebra b({3});
  auto rng = make_rng(6);
  Mat u = random_unitary(rng, 3);
  Eigen::VectorXd lo(3), hi(3);
  lo << 0.5, 1.0, 2.0;
  hi << 1.0, 3.0, 2.5;
  AlgebraElement x = AlgebraElement::zero(b), y = AlgebraElement::zero(b);
  x.blocks[0] = u * lo.asDiagonal() * u.adjoint();
  y.blocks[0] = u * hi.asDiagonal() * u.adjoint();
  AlgebraElement diff = psd_sqrt(y) - psd_sqrt(x);
  CHECK(min_eigenvalue(diff) > -1e-12);
}
