#pragma once

#include "ckit/commutant.hpp"

namespace ckit {

/// Invariant checks for a pair (pi, eta) on a common space.
struct RepCheck {
  double covariance = 0.0;   // eta(x)* eta(y) - pi(<x,y>)
  double bimodule = 0.0;     // eta(b x b') - pi(b) eta(x) pi(b')
  bool nondegenerate = false;
  bool faithful = false;
};
RepCheck check_representation(const Correspondence& e, const CorrRepData& rep,
                              double tol = kDefaultTol);

struct InducedRep {
  int dim_h = 0;
  Mat coords;                  // dim_h x (units * dimG); eta(u_a) = slice a
  ConcreteRep rho;             // the induced representation of B on H
  std::vector<Mat> eta_units;  // G -> H per module unit
  std::vector<int> h_mult;     // multiplicity vector of rho, = mu g
};

/// H = E (x) G through the scalar Gram of unit (x) basis vectors.
InducedRep induced_representation(const Correspondence& e, const ConcreteRep& pi,
                                  double tol = kDefaultTol);

struct RepExistence {
  bool exists;
  std::vector<long long> g;
  std::string certificate;
};
/// Finite existence test for a faithful nondegenerate representation:
/// positive integer g with mu g = g.
RepExistence rep_exists(const Correspondence& e, double tol = kDefaultTol);

struct RepConstruction {
  RepresentedAlgebra base;  // B with multiplicity g
  CorrRepData rep;          // (pi, eta) on G
  RepCheck check;
  double unitary_residual;  // u u* - 1 for the intertwining unitary
};
RepConstruction rep_construct(const Correspondence& e, const std::vector<long long>& g,
                              double tol = kDefaultTol);

struct FockResult {
  CorrRepData rep;                 // isometric representation on the truncated Fock space
  std::vector<int> level_offset;   // offsets of E_n (x) G inside H, size N+2
  double covariance_interior;      // below the truncation level
  double covariance_boundary;      // at the truncation level
  double vacuum_defect;            // norm of the projection onto level 0 (exactly 1)
  double interior_leakage;         // nondegeneracy defect away from the vacuum
};
FockResult fock_representation(const Correspondence& e, const RepresentedAlgebra& base, int n,
                               double tol = kDefaultTol);

struct EmbeddedEndomorphism {
  int dim_h = 0;
  Mat u;                      // unitary on H = F (x) G
  double well_defined_residual;
  double unitary_residual;
  double conjugation_residual;  // u (a o id) u* - theta(a) o id
};
/// Realizes theta as the restriction of an inner automorphism of B(H),
/// H = F (x) G, via x o eta(y* o z) g -> theta(x y*) z o g.
EmbeddedEndomorphism embed_endomorphism(const Endomorphism& theta, const HilbertModule& f,
                                        const CorrRepData& rep, double tol = kDefaultTol);

struct ExtensionResult {
  bool feasible = false;
  std::vector<long long> h;    // enlarged multiplicity vector when feasible
  std::string certificate;     // infeasibility reason otherwise
  CorrRepData tau;             // nondegenerate extension on K
  RepresentedAlgebra enlarged; // B with multiplicity h
  double extension_residual = 0.0;  // tau restricted to G vs sigma
  RepCheck check;
};
/// Nondegenerate extension of an isometric representation, finite variant:
/// search h >= g with mu h = h and extend on K = G (+) L.
ExtensionResult extend_representation(const Correspondence& e, const CorrRepData& sigma,
                                      double tol = kDefaultTol);

struct SliceRepresentation {
  std::vector<std::vector<Mat>> eta_levels;  // eta_n on module units of E_n, n >= 1
  double multiplicativity_residual;
  double covariance_residual;
};
SliceRepresentation slice_representation(const Correspondence& e, const CorrRepData& rep, int n,
                                         double tol = kDefaultTol);

}  // namespace ckit
