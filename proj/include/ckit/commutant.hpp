#pragma once

#include "ckit/dynamics.hpp"

namespace ckit {

/// A multi-matrix algebra acting on G = (+)_i C^{n_i} (x) C^{g_i} with block
/// multiplicities g, optionally conjugated by a unitary twist of G. The
/// commutant is the same data with dims and multiplicities swapped.
struct RepresentedAlgebra {
  MultiMatrixAlgebra alg;
  std::vector<int> mult;
  Mat twist;  // unitary on G; empty means identity

  RepresentedAlgebra() = default;
  RepresentedAlgebra(MultiMatrixAlgebra a, std::vector<int> g, Mat u = Mat());

  int dim_space() const;
  int offset(int i) const;  // start of block i in natural coordinates
  bool has_twist() const { return twist.size() != 0; }

  Mat embed(const AlgebraElement& b) const;
  Mat embed_commutant(const AlgebraElement& c) const;  // c over dims g
  MultiMatrixAlgebra commutant_algebra() const { return MultiMatrixAlgebra(mult); }
  /// Best block-multiple approximation of x in the embedded algebra /
  /// commutant; *residual (if given) receives the distance.
  AlgebraElement extract(const Mat& x, double* residual = nullptr) const;
  AlgebraElement extract_commutant(const Mat& x, double* residual = nullptr) const;
  RepresentedAlgebra commutant() const;
};

/// A representation of a multi-matrix algebra by explicit matrix-unit images.
struct ConcreteRep {
  MultiMatrixAlgebra alg;
  int dim = 0;
  std::vector<std::vector<Mat>> images;  // images[i][p*n_i+q]

  Mat unit(int i, int p, int q) const { return images[static_cast<size_t>(i)][static_cast<size_t>(p * alg.dim(i) + q)]; }
  Mat image(const AlgebraElement& b) const;
  std::vector<int> mult_vector(double tol = kDefaultTol) const;
  void validate(double tol = kDefaultTol) const;
};

ConcreteRep natural_rep(const RepresentedAlgebra& ra);
ConcreteRep commutant_rep(const RepresentedAlgebra& ra);

struct IntertwinerSpace {
  std::vector<Mat> basis;  // operators G -> H, Hilbert-Schmidt orthonormal
  std::vector<int> dim_per_block;
  double residual = 0.0;  // worst intertwining defect over basis x generators
};

/// {x : rho(b) x = x pi(b)} via central decomposition and canonical forms of
/// both representations; dimension sum_i h_i g_i.
IntertwinerSpace intertwiners(const ConcreteRep& rho, const ConcreteRep& pi,
                              double tol = kDefaultTol);

/// A correspondence over B together with a represented copy of B; carries the
/// concrete Stinespring data on H = E (x) G.
struct RepresentedCorrespondence {
  Correspondence corr;
  RepresentedAlgebra rep;

  int dim_h() const;
  int h_offset(int j) const;
  Mat eta(const ModuleElement& x) const;          // G -> H
  Mat stinespring(const AlgebraElement& b) const; // lambda(b) o id on H
  Mat lifting(const AlgebraElement& c) const;     // id o c, c over dims g
  ConcreteRep stinespring_rep() const;
};

RepresentedCorrespondence represent(const Correspondence& corr, const RepresentedAlgebra& rep);

struct CommutantResult {
  Correspondence corr_prime;               // over B' = (dims g)
  RepresentedCorrespondence represented;   // E' over B' on the same G
  std::vector<Mat> unit_ops;               // concrete intertwiner per module unit of E'
  IMat mu_prime;                           // asserted equal to mu^T
  double residual = 0.0;
};

CommutantResult commutant_correspondence(const RepresentedCorrespondence& rc,
                                         double tol = kDefaultTol);

struct DoubleCommutantResult {
  bool ok = false;
  double residual = 0.0;  // witness residual of E'' vs E
};
DoubleCommutantResult double_commutant_check(const RepresentedCorrespondence& rc,
                                             double tol = kDefaultTol);

/// Representation data of a correspondence on a concrete space: pi plus the
/// images of the module units under eta.
struct CorrRepData {
  ConcreteRep pi;
  std::vector<Mat> eta_units;  // one operator per module unit
};

struct Theorem95EndoToRep {
  CommutantResult commutant;  // E' of the represented E_theta
  CorrRepData rep_prime;      // (pi', eta') of E' on K = F o G
  double residual = 0.0;
};

/// theta on B^a(F) with correspondence E_theta; produces the faithful
/// nondegenerate representation of the commutant on K = F (x) G.
Theorem95EndoToRep theorem95_endo_to_rep(const Endomorphism& theta, const HilbertModule& f,
                                         const RepresentedAlgebra& rep,
                                         double tol = kDefaultTol);

struct Theorem95RepToEndo {
  HilbertModule f;
  Endomorphism theta;
  double residual = 0.0;  // includes the round-trip correspondence witness
};

/// Reverse direction: from a faithful nondegenerate representation of E'
/// back to an endomorphism of B^a(F), F the intertwiner module in B(G,K).
Theorem95RepToEndo theorem95_rep_to_endo(const RepresentedCorrespondence& rc,
                                         const CommutantResult& cm, const CorrRepData& rep_prime,
                                         double tol = kDefaultTol);

struct AmplificationInduction {
  std::vector<Mat> onb_ops;                // e'_k : G -> H
  std::vector<AlgebraElement> projections; // p'_k in B'
  Mat isometry;                            // V : H -> G^{#S}
  double residual = 0.0;
};

/// Exhibits a representation of B as the compression of an amplification of
/// the defining representation to the invariant subspace (+)_k p'_k G.
AmplificationInduction amplification_induction(const RepresentedAlgebra& ra,
                                               const ConcreteRep& pi,
                                               double tol = kDefaultTol);

}  // namespace ckit
