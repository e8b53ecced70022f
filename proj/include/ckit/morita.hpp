#pragma once

#include "ckit/pslice.hpp"

namespace ckit {

/// Isomorphism of multi-matrix algebras: a block permutation together with a
/// unitary per source block, phi(e^{(i)}_{pq}) = U_i e_pq U_i* placed in
/// destination block perm[i].
struct AlgebraIso {
  MultiMatrixAlgebra src, dst;
  std::vector<int> perm;
  std::vector<Mat> unitary;

  AlgebraElement apply(const AlgebraElement& a) const;
  AlgebraIso inverse() const;
  static AlgebraIso identity(const MultiMatrixAlgebra& alg);
};

/// Reindex the coefficient algebra of a module/correspondence along an
/// isomorphism (elements pick up the block unitaries on the right).
HilbertModule relabel_module(const HilbertModule& m, const AlgebraIso& iso);
ModuleElement relabel_element(const ModuleElement& x, const AlgebraIso& iso);
Correspondence relabel_right(const Correspondence& e, const AlgebraIso& iso);
/// Precompose the left action with iso: src' -> e.left.
Correspondence relabel_left(const Correspondence& e, const AlgebraIso& iso);

/// The identification of the left algebra with the compacts of a permutation
/// type equivalence, extracted from the canonical form of the action.
AlgebraIso morita_lambda(const Correspondence& m, double tol = kDefaultTol);

struct MoritaEquivalence {
  Correspondence m;                    // from A to B
  std::vector<int> perm;               // A block i acts on module block perm[i]
  AlgebraIso lambda;                   // A -> K(M)
  double right_identity_residual = 0;  // M* o M vs trivial over B
  double left_identity_residual = 0;   // M o M* vs trivial over A
};

struct MoritaCheck {
  bool ok = false;
  std::string reason;
  std::optional<MoritaEquivalence> witness;
};

/// Decides whether M is a Morita equivalence by computing both tensor
/// identities and exhibiting the witnesses.
MoritaCheck is_morita_equivalence(const Correspondence& m, double tol = kDefaultTol);

/// Permutation-type equivalence between any two algebras with equal block
/// count (module block perm[i] carries a copy of C^{a_i}).
Correspondence canonical_morita(const MultiMatrixAlgebra& a, const MultiMatrixAlgebra& b,
                                const std::vector<int>& perm);

struct TransportedModule {
  HilbertModule module;
  TensorData witness;  // F o M with coordinates
};
TransportedModule transport_module(const HilbertModule& f, const MoritaEquivalence& m,
                                   double tol = kDefaultTol);

struct TransportedCorrespondence {
  Correspondence corr;  // M* o E o M
  double mu_law_residual;  // integer check mu' = P^T mu P, 0 when exact
};
TransportedCorrespondence transport_correspondence(const Correspondence& e,
                                                   const MoritaEquivalence& m,
                                                   double tol = kDefaultTol);

struct MoritaDecision {
  bool equivalent = false;
  std::vector<int> perm;
  std::optional<MoritaEquivalence> witness;
  double intertwine_residual = -1.0;  // || E o M ~ M o F || witness residual
};

/// Exhaustive permutation search (block count capped at 8), then a numerical
/// verification of E o M = M o F for the found witness.
MoritaDecision correspondences_morita_equivalent(const Correspondence& e,
                                                 const Correspondence& f,
                                                 double tol = kDefaultTol);

struct TransportedSlice {
  ProductSystemSlice slice;           // slice of the transported base
  double levelwise_residual;          // max over levels of transport-vs-level witness
  double cocycle_residual;            // associativity of the transported slice
};
TransportedSlice product_system_transport(const ProductSystemSlice& s,
                                          const MoritaEquivalence& m,
                                          double tol = kDefaultTol);

struct TransportedUnit {
  bool exists = false;
  std::optional<PSUnit> unit;  // unital unit of the transported slice
};
/// A unital unit for the transported slice, when the transported base admits
/// a unit vector.
TransportedUnit transport_unit(const TransportedSlice& ts, double tol = kDefaultTol);

}  // namespace ckit
