#include <doctest.h>

#include "ckit/morita.hpp"
#include "support.hpp"

using namespace ckit;
using namespace ckit::testing;

TEST_CASE("trivial correspondence is a Morita equivalence") {
  MultiMatrixAlgebra b({1, 2});
  MoritaCheck r = is_morita_equivalence(trivial_correspondence(b));
  REQUIRE(r.ok);
  CHECK(r.witness->perm == std::vector<int>{0, 1});
  CHECK(r.witness->left_identity_residual < 1e-9);
  CHECK(r.witness->right_identity_residual < 1e-9);
}

TEST_CASE("C^n implements the equivalence between M_n and C") {
  for (int n = 2; n <= 3; ++n) {
    MultiMatrixAlgebra mn({n}), c({1});
    IMat one(1, 1);
    one << 1;
    Correspondence m = from_multiplicity(mn, c, one);
    CHECK(m.module.mults == std::vector<int>{n});
    MoritaCheck r = is_morita_equivalence(m);
    REQUIRE(r.ok);
  }
}

TEST_CASE("Example 3.1 is a self Morita equivalence") {
  MoritaCheck r = is_morita_equivalence(example31_explicit());
  REQUIRE(r.ok);
  CHECK(r.witness->perm == std::vector<int>{1, 0});
}

TEST_CASE("non-equivalences are rejected with a reason") {
  MultiMatrixAlgebra c({1});
  IMat two(1, 1);
  two << 2;
  MoritaCheck r = is_morita_equivalence(from_multiplicity(c, c, two));
  CHECK_FALSE(r.ok);
  CHECK(!r.reason.empty());
}

TEST_CASE("module transport") {
  MultiMatrixAlgebra b({1, 2});
  MoritaEquivalence triv = *is_morita_equivalence(trivial_correspondence(b)).witness;
  HilbertModule f(b, {3, 2});
  TransportedModule t = transport_module(f, triv);
  CHECK(t.module.mults == f.mults);

  // C^m over M_n transported along C^n lands on the Hilbert space C^m
  MultiMatrixAlgebra mn({2}), c({1});
  IMat one(1, 1);
  one << 1;
  MoritaEquivalence m = *is_morita_equivalence(from_multiplicity(mn, c, one)).witness;
  HilbertModule g(mn, {3});
  TransportedModule tg = transport_module(g, m);
  CHECK(tg.module.coeff.block_dims == std::vector<int>{1});
  CHECK(tg.module.mults == std::vector<int>{3});

  // round trip preserves inner products through the tensor coordinates
  auto rng = make_rng(41);
  MoritaEquivalence e31 = *is_morita_equivalence(example31_explicit()).witness;
  TransportedModule once = transport_module(f, e31);
  for (int trial = 0; trial < 4; ++trial) {
    ModuleElement x = random_module_element(rng, f);
    ModuleElement y = random_module_element(rng, f);
    // the transport coordinates preserve the balanced inner product
    ModuleElement w = random_module_element(rng, e31.m.module);
    AlgebraElement lhs = inner(once.witness.apply(x, w), once.witness.apply(y, w));
    AlgebraElement rhs = inner(w, e31.m.left_mul(inner(x, y), w));
    CHECK((lhs - rhs).norm() < 1e-10 * std::max(1.0, rhs.norm()));
  }
}

TEST_CASE("correspondence transport obeys the conjugation law") {
  Correspondence e = example31_explicit();
  MultiMatrixAlgebra b = e.left;

  MoritaEquivalence triv = *is_morita_equivalence(trivial_correspondence(b)).witness;
  TransportedCorrespondence same = transport_correspondence(e, triv);
  CHECK(extract_multiplicity(same.corr) == example31_mu());
  auto wit = iso_witness(same.corr, e);
  REQUIRE(wit);
  CHECK(wit->residual < 1e-9);

  // along the swap equivalence to a relabeled algebra
  MultiMatrixAlgebra c({2, 1});
  Correspondence m = canonical_morita(b, c, {1, 0});
  MoritaEquivalence me = *is_morita_equivalence(m).witness;
  TransportedCorrespondence moved = transport_correspondence(e, me);
  CHECK(moved.mu_law_residual == 0.0);
  CHECK(extract_multiplicity(moved.corr) == example31_mu());  // antidiagonal survives the swap

  // and back
  MoritaEquivalence back = *is_morita_equivalence(canonical_morita(c, b, {1, 0})).witness;
  TransportedCorrespondence again = transport_correspondence(moved.corr, back);
  CHECK(extract_multiplicity(again.corr) == example31_mu());
}

TEST_CASE("Morita decision on correspondences") {
  Correspondence e = example31_explicit();
  MoritaDecision self = correspondences_morita_equivalent(e, e);
  CHECK(self.equivalent);
  CHECK(self.perm == std::vector<int>{0, 1});
  CHECK(self.intertwine_residual < 1e-8);

  MoritaDecision no =
      correspondences_morita_equivalent(e, trivial_correspondence(e.left));
  CHECK_FALSE(no.equivalent);

  // relabeled copy over the swapped algebra
  MultiMatrixAlgebra c({2, 1});
  IMat moved(2, 2);
  moved << 0, 1, 1, 0;  // the antidiagonal survives the swap
  Correspondence f = from_multiplicity(c, c, moved);
  MoritaDecision yes = correspondences_morita_equivalent(e, f);
  CHECK(yes.equivalent);
}

TEST_CASE("Morita equivalence of correspondences is an equivalence relation") {
  auto rng = make_rng(42);
  MultiMatrixAlgebra b({1, 2});
  std::vector<Correspondence> pool;
  pool.push_back(example31_explicit());
  pool.push_back(from_multiplicity(b, b, example31_mu()));
  pool.push_back(trivial_correspondence(b));
  pool.push_back(random_twisted(rng, b, b, mu_identity(2)));

  for (size_t i = 0; i < pool.size(); ++i) {
    CHECK(correspondences_morita_equivalent(pool[i], pool[i]).equivalent);  // reflexive
    for (size_t j = 0; j < pool.size(); ++j) {
      bool ij = correspondences_morita_equivalent(pool[i], pool[j]).equivalent;
      bool ji = correspondences_morita_equivalent(pool[j], pool[i]).equivalent;
      CHECK(ij == ji);  // symmetric
      for (size_t k = 0; k < pool.size(); ++k) {
        bool jk = correspondences_morita_equivalent(pool[j], pool[k]).equivalent;
        bool ik = correspondences_morita_equivalent(pool[i], pool[k]).equivalent;
        if (ij && jk) CHECK(ik);  // transitive
      }
    }
  }
}

TEST_CASE("slice transport") {
  Correspondence e = example31_explicit();
  ProductSystemSlice s = build_slice(e, 3);

  MoritaEquivalence triv = *is_morita_equivalence(trivial_correspondence(e.left)).witness;
  TransportedSlice ts = product_system_transport(s, triv);
  CHECK(ts.levelwise_residual < 1e-8);
  CHECK(ts.cocycle_residual < 1e-8);

  MultiMatrixAlgebra c({2, 1});
  MoritaEquivalence swap = *is_morita_equivalence(canonical_morita(e.left, c, {1, 0})).witness;
  TransportedSlice moved = product_system_transport(s, swap);
  CHECK(moved.levelwise_residual < 1e-8);
  CHECK(moved.cocycle_residual < 1e-8);
  // the alternating multiplicity pattern survives
  CHECK(extract_multiplicity(moved.slice.levels[2]) == mu_identity(2));
}

TEST_CASE("transported slices of unital slices keep a unital unit") {
  MultiMatrixAlgebra b({1, 2}), c({2, 1});
  ProductSystemSlice s = build_slice(trivial_correspondence(b), 3);
  MoritaEquivalence swap = *is_morita_equivalence(canonical_morita(b, c, {1, 0})).witness;
  TransportedSlice ts = product_system_transport(s, swap);
  TransportedUnit u = transport_unit(ts);
  REQUIRE(u.exists);
  CHECK(u.unit->unital);
  CHECK(u.unit->multiplicativity_defect < 1e-9);
}

TEST_CASE("theorem 5.12 shadow on a small sweep") {
  // the fixed-vector criterion matches the existence of a transported
  // correspondence carrying a stable unital chain
  MultiMatrixAlgebra b({1, 2});
  for (int a11 = 0; a11 <= 2; ++a11)
    for (int a12 = 0; a12 <= 2; ++a12)
      for (int a21 = 0; a21 <= 2; ++a21)
        for (int a22 = 0; a22 <= 2; ++a22) {
          IMat mu(2, 2);
          mu << a11, a12, a21, a22;
          if (mu.colwise().sum().minCoeff() == 0 || mu.rowwise().sum().minCoeff() == 0) continue;
          Correspondence e = from_multiplicity(b, b, mu);
          FixedVectorResult fv = positive_fixed_vector(mu, true);
          if (!fv.exists) continue;
          // transport to the algebra with dims m: the result has mults = dims,
          // so every level of its slice carries a unit vector
          std::vector<int> dims(fv.vec.begin(), fv.vec.end());
          MultiMatrixAlgebra c(dims);
          MoritaEquivalence m = *is_morita_equivalence(canonical_morita(b, c, {0, 1})).witness;
          TransportedCorrespondence t = transport_correspondence(e, m);
          CHECK(unit_vector_exists(t.corr.module).exists);
          ProductSystemSlice ts = build_slice(t.corr, 2);
          for (int lvl = 1; lvl <= 2; ++lvl)
            CHECK(unit_vector_exists(ts.level_module(lvl)).exists);
        }
}
