#pragma once

#include "ckit/intsolve.hpp"
#include "ckit/morita.hpp"
#include "ckit/pslice.hpp"

namespace ckit {

/// Unital *-endomorphism of a multi-matrix algebra, given by the images of
/// the matrix units. The carrier reuses the correspondence machinery (an
/// endomorphism is a left action of D on the module D).
struct Endomorphism {
  MultiMatrixAlgebra domain;
  Correspondence carrier;  // left = domain, module = (domain, dims)

  AlgebraElement apply(const AlgebraElement& a) const;
  AlgebraElement unit_image(int i, int p, int q) const;
  void validate(double tol = kDefaultTol) const { carrier.validate(tol); }
  bool unital(double tol = kDefaultTol) const;
  bool faithful(double tol = kDefaultTol) const { return carrier.is_faithful(tol); }
  IMat multiplicity(double tol = kDefaultTol) const { return extract_multiplicity(carrier, tol); }
};

Endomorphism endomorphism_from_images(const MultiMatrixAlgebra& domain,
                                      std::vector<std::vector<AlgebraElement>> images,
                                      double tol = kDefaultTol);
/// Canonical endomorphism with multiplicity pattern mu (requires
/// sum_i d_i mu_ij = d_j), optionally twisted by unitaries per block.
Endomorphism endomorphism_from_multiplicity(const MultiMatrixAlgebra& domain, const IMat& mu,
                                            std::vector<Mat> twists = {});
Endomorphism identity_endomorphism(const MultiMatrixAlgebra& domain);

struct CorrespondenceOf {
  Correspondence e_theta;          // over B
  TensorData inner;                // F* o (theta F)
  TensorData outer;                // F o E_theta
  std::vector<Mat> w;              // unitary F o E_theta -> F per block
  double well_defined_residual;    // solve residual on the spanning set
  double unitary_residual;         // || w w* - 1 ||
  double conjugation_residual;     // || theta(a) - w (a o id) w* || over units
};

/// The correspondence of a unital endomorphism of B^a(F), together with the
/// explicit unitary x o (y* o z) -> theta(x y*) z and the verification of
/// theta(a) = a o id under it.
CorrespondenceOf correspondence_of(const Endomorphism& theta, const HilbertModule& f,
                                   double tol = kDefaultTol);

struct EndoExistence {
  bool exists;
  std::vector<long long> m;  // positive integer with mu^T m = m
  std::string certificate;
};
/// Finite existence test for a unital endomorphism with correspondence E.
EndoExistence endo_exists(const Correspondence& e, double tol = kDefaultTol);
/// Same decision for semigroups of possibly non-unital endomorphisms:
/// (mu^T m)_j <= m_j.
EndoExistence esemigroup_exists(const Correspondence& e, double tol = kDefaultTol);

struct EndoConstruction {
  HilbertModule f;
  Endomorphism theta;
  double roundtrip_residual;  // correspondence_of(theta, F) vs E witness
};
/// Builds F with mults m and theta(a) = a o id_E in normal-form coordinates;
/// verifies the round trip back to E.
EndoConstruction endo_construct(const Correspondence& e, const std::vector<long long>& m,
                                double tol = kDefaultTol);

struct DilationReport {
  std::vector<double> unit_defect;    // || <xi_t, xi_t> - 1 || per level
  std::vector<double> mult_defect;    // multiplicativity defect per support level
  std::vector<double> compat_defect;  // embedding compatibility per support level
  double unitality_defect = 0.0;      // || theta(1) - 1 ||
};

/// Finite shadow of the inductive-limit dilation: E_N materialized, the
/// shifted action compressed back along the unit embedding chain. Interior
/// defects vanish; truncation defects are reported, not hidden.
struct InductiveDilation {
  ProductSystemSlice slice;  // depth N+1
  int level;
  PSUnit unit;
  std::vector<Mat> embed;    // beta: E_N -> E_{N+1}, per module block
  DilationReport report;

  /// theta(a) = beta* (a o id) beta on B^a(E_N), evaluated lazily.
  std::vector<Mat> theta_apply(const std::vector<Mat>& a) const;
  /// Chain embedding E_t -> E_N along the unit.
  ModuleElement chain_embed(int t, const ModuleElement& x) const;
};

InductiveDilation inductive_dilation(const Correspondence& e, const ModuleElement& xi1, int level,
                                     double tol = kDefaultTol, int max_generators = 12);

struct ConjugacyResult {
  bool conjugate = false;
  std::vector<int> perm;
  double residual = -1.0;  // witness residual of E1 o M vs M o E2
};

/// Searches permutation-type Morita equivalences M with F2 = F1 o M and
/// E_theta1 o M = M o E_theta2.
ConjugacyResult conjugacy_check(const Endomorphism& t1, const HilbertModule& f1,
                                const Endomorphism& t2, const HilbertModule& f2,
                                double tol = kDefaultTol);

struct TransportedEndomorphism {
  Endomorphism theta;       // on B^a(F o M)
  HilbertModule f;          // F o M
  double correspondence_residual;  // E_theta' vs transported E_theta
};
TransportedEndomorphism transport_endomorphism(const Endomorphism& theta, const HilbertModule& f,
                                               const MoritaEquivalence& m,
                                               double tol = kDefaultTol);

}  // namespace ckit
