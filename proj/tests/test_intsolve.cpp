#include <doctest.h>

#include "support.hpp"
#include "ckit/intsolve.hpp"

using namespace ckit;

namespace {

bool brute_force_fixed(const IMat& mu, bool transpose, int cap = 6) {
  int k = static_cast<int>(mu.rows());
  std::vector<long long> m(static_cast<size_t>(k), 1);
  while (true) {
    bool ok = true;
    for (int j = 0; j < k && ok; ++j) {
      long long sum = 0;
      for (int i = 0; i < k; ++i) sum += (transpose ? mu(i, j) : mu(j, i)) * m[static_cast<size_t>(i)];
      if (sum != m[static_cast<size_t>(j)]) ok = false;
    }
    if (ok) return true;
    int pos = 0;
    while (pos < k) {
      if (m[static_cast<size_t>(pos)] < cap) {
        ++m[static_cast<size_t>(pos)];
        for (int i = 0; i < pos; ++i) m[static_cast<size_t>(i)] = 1;
        break;
      }
      ++pos;
    }
    if (pos == k) return false;
  }
}

}  // namespace

TEST_CASE("linear feasibility basics") {
  LinConstraint c1{{Rat(1)}, Rel::GE, Rat(1)};
  LinConstraint c2{{Rat(1)}, Rel::LE, Rat(2)};
  Feasibility f = solve_linear_feasibility(1, {c1, c2});
  CHECK(f.feasible);
  CHECK(Rat(1) <= f.point[0]);
  CHECK(f.point[0] <= Rat(2));

  LinConstraint c3{{Rat(1)}, Rel::LE, Rat(0)};
  Feasibility g = solve_linear_feasibility(1, {c1, c3});
  CHECK_FALSE(g.feasible);
  CHECK(!g.certificate.empty());
}

TEST_CASE("positive fixed vectors") {
  CHECK(positive_fixed_vector(mu_identity(3), true).exists);

  IMat anti(2, 2);
  anti << 0, 1, 1, 0;
  FixedVectorResult r = positive_fixed_vector(anti, true);
  CHECK(r.exists);
  CHECK(r.vec[0] == r.vec[1]);

  IMat cuntz(1, 1);
  cuntz << 2;
  CHECK_FALSE(positive_fixed_vector(cuntz, true).exists);
  CHECK_FALSE(positive_fixed_vector(cuntz, false).exists);

  IMat nilp(2, 2);
  nilp << 1, 1, 0, 1;
  CHECK_FALSE(positive_fixed_vector(nilp, true).exists);
}

TEST_CASE("subinvariant vectors") {
  IMat cuntz(1, 1);
  cuntz << 2;
  CHECK_FALSE(positive_subinvariant_vector(cuntz).exists);

  IMat zero(1, 1);
  zero << 0;
  FixedVectorResult r = positive_subinvariant_vector(zero);
  CHECK(r.exists);

  IMat anti(2, 2);
  anti << 0, 1, 1, 0;
  CHECK(positive_subinvariant_vector(anti).exists);
}

TEST_CASE("fixed vector above a floor") {
  IMat anti(2, 2);
  anti << 0, 1, 1, 0;
  FixedVectorResult r = positive_fixed_vector_above(anti, {1, 3});
  CHECK(r.exists);
  CHECK(r.vec[0] >= 1);
  CHECK(r.vec[1] >= 3);
  CHECK(r.vec[0] == r.vec[1]);

  IMat cuntz(1, 1);
  cuntz << 3;
  CHECK_FALSE(positive_fixed_vector_above(cuntz, {1}).exists);
}

TEST_CASE("agreement with brute force on an exhaustive small sweep") {
  for (int k = 1; k <= 2; ++k) {
    std::vector<int> entries(static_cast<size_t>(k * k), 0);
    while (true) {
      IMat mu(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) mu(i, j) = entries[static_cast<size_t>(i * k + j)];
      for (bool transpose : {false, true}) {
        bool exact = positive_fixed_vector(mu, transpose).exists;
        bool brute = brute_force_fixed(mu, transpose);
        CHECK(exact == brute);
      }
      size_t pos = 0;
      while (pos < entries.size() && entries[pos] == 2) entries[pos++] = 0;
      if (pos == entries.size()) break;
      ++entries[pos];
    }
  }
}
