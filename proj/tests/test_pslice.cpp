#include <doctest.h>

#include "ckit/pslice.hpp"
#include "support.hpp"

using namespace ckit;
using namespace ckit::testing;

TEST_CASE("slice of Example 3.1 alternates between E and B") {
  Correspondence e = example31_explicit();
  ProductSystemSlice s = build_slice(e, 4);
  IMat mu = example31_mu();
  IMat power = mu_identity(2);
  for (int t = 1; t <= 4; ++t) {
    power = mu_product(power, mu);
    CHECK(extract_multiplicity(s.levels[static_cast<size_t>(t)]) == power);
  }
  // even levels look like B, odd levels like E
  CHECK(s.levels[2].module.mults == std::vector<int>{1, 2});
  CHECK(s.levels[3].module.mults == std::vector<int>{2, 1});
  CHECK(s.associativity_defect() < 1e-8);
}

TEST_CASE("slice of the truncated shift correspondence") {
  int k = 4;
  Correspondence e = from_multiplicity(example102_algebra(k), example102_algebra(k),
                                       example102_mu(k));
  ProductSystemSlice s = build_slice(e, 3);
  IMat power = mu_identity(k);
  for (int t = 1; t <= 3; ++t) {
    power = mu_product(power, example102_mu(k));
    CHECK(extract_multiplicity(s.levels[static_cast<size_t>(t)]) == power);
  }
  CHECK(s.associativity_defect() < 1e-8);
}

TEST_CASE("depth zero keeps only the trivial level") {
  MultiMatrixAlgebra b({1, 2});
  ProductSystemSlice s = build_slice(trivial_correspondence(b), 0);
  CHECK(s.levels.size() == 1);
  CHECK(corr_is_trivial(s.levels[0]));
}

TEST_CASE("trivial fast path multiplies") {
  MultiMatrixAlgebra b({3});
  ProductSystemSlice s = build_slice(trivial_correspondence(b), 3);
  CHECK(s.trivial_base);
  auto rng = make_rng(31);
  ModuleElement x = random_module_element(rng, s.level_module(1));
  ModuleElement y = random_module_element(rng, s.level_module(2));
  ModuleElement prod = s.mult(1, 2, x, y);
  CHECK((prod.blocks[0] - x.blocks[0] * y.blocks[0]).norm() < 1e-13);
  CHECK(s.associativity_defect() < 1e-12);
}

TEST_CASE("units and their coherence") {
  Correspondence e = example31_explicit();
  Correspondence e2 = corr_power(e, 2);
  ProductSystemSlice s = build_slice(e2, 3);
  UnitVectorDecision d = unit_vector_exists(e2.module);
  REQUIRE(d.exists);
  PSUnit u = make_unit(s, d.certificate->element);
  CHECK(u.unital);
  CHECK(u.unitality_defect < 1e-10);
  CHECK(u.multiplicativity_defect < 1e-9);

  // the embeddings xi_s o id are isometries
  auto rng = make_rng(32);
  for (int t = 1; t <= 2; ++t)
    for (int trial = 0; trial < 4; ++trial) {
      ModuleElement x = random_module_element(rng, s.level_module(t));
      ModuleElement y = random_module_element(rng, s.level_module(t));
      AlgebraElement lhs = inner(s.mult(1, t, u.xi[1], x), s.mult(1, t, u.xi[1], y));
      CHECK((lhs - inner(x, y)).norm() < 1e-10 * std::max(1.0, inner(x, y).norm()));
    }
}

TEST_CASE("non-unit vectors are flagged") {
  MultiMatrixAlgebra b({2});
  ProductSystemSlice s = build_slice(trivial_correspondence(b), 2);
  ModuleElement v = ModuleElement::zero(s.level_module(1));
  v.blocks[0] << 0, 0, 1, 0;  // truncated shift on C^2, <v,v> = diag(1,0)
  PSUnit u = make_unit(s, v);
  CHECK_FALSE(u.unital);
  CHECK(u.unitality_defect == doctest::Approx(1.0));
  CHECK(u.multiplicativity_defect < 1e-14);  // powers still multiply
}
