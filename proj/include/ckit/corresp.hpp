#pragma once

#include <functional>
#include <optional>

#include "ckit/hilbmod.hpp"

namespace ckit {

/// Integer (Bratteli) multiplicity matrix; entry (i,j) counts how often left
/// block i acts on right-module block j.
using IMat = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

Mat kron(const Mat& a, const Mat& b);

/// A correspondence: Hilbert module plus a unital left action given by the
/// images of the matrix units of the left algebra. Canonical instances keep
/// mu and optional block twists and synthesize images on demand, so large
/// canonical actions never materialize a full table.
struct Correspondence {
  MultiMatrixAlgebra left;
  HilbertModule module;

  bool canonical = false;
  IMat mu;                              // filled for canonical actions
  std::vector<Mat> twists;              // optional unitaries per module block
  std::vector<std::vector<ModuleOperator>> table;  // explicit action images

  int left_blocks() const { return left.blocks(); }
  int right_blocks() const { return module.blocks(); }

  /// Image of the left matrix unit e^{(i)}_{pq} as an operator on the module.
  ModuleOperator act(int i, int p, int q) const;
  /// Single module block of act(i,p,q).
  Mat act_block(int i, int p, int q, int j) const;
  ModuleOperator apply_left(const AlgebraElement& a) const;
  ModuleElement left_mul(const AlgebraElement& a, const ModuleElement& x) const;

  /// Checks the *-homomorphism relations, adjoints and unitality of the
  /// stored table. No-op for canonical actions.
  void validate(double tol = kDefaultTol) const;
  bool is_faithful(double tol = kDefaultTol) const;
  bool is_full() const { return module.full(); }
};

/// Trivial correspondence B over B: module mults = dims, left action = left
/// multiplication.
Correspondence trivial_correspondence(const MultiMatrixAlgebra& alg);

/// Canonical correspondence with the given multiplicity matrix; mults of the
/// right module are forced to sum_i a_i mu_ij. Optional unitary twists
/// conjugate the canonical action per module block.
Correspondence from_multiplicity(const MultiMatrixAlgebra& left, const MultiMatrixAlgebra& right,
                                 const IMat& mu, std::vector<Mat> twists = {});

/// Extracts mu_ij = rank of act(i,0,0) on right block j; enforces
/// integrality and the dimension count sum_i a_i mu_ij = m_j.
IMat extract_multiplicity(const Correspondence& e, double tol = kDefaultTol);

bool corr_is_trivial(const Correspondence& e, double tol = kDefaultTol);

/// Canonical decomposition of a representation of a multi-matrix algebra on
/// C^D: multiplicity vector and a unitary W with images = W (e_pq x I) W*.
struct RepCanon {
  std::vector<int> mult;
  Mat basis;  // D x D unitary
};
RepCanon canonicalize_rep(const MultiMatrixAlgebra& alg,
                          const std::function<Mat(int, int, int)>& image, int dim,
                          double tol = kDefaultTol);

/// Per-module-block canonical form of a correspondence's left action.
struct CorrCanon {
  IMat mu;
  std::vector<Mat> block_basis;  // unitary per module block
};
CorrCanon canonical_form(const Correspondence& e, double tol = kDefaultTol);

/// Explicit bimodule unitary between two correspondences over the same pair
/// of algebras (blockwise left multiplication intertwining the actions), or
/// nullopt when the multiplicity matrices differ.
struct IsoWitness {
  std::vector<Mat> unitary;  // per module block
  double residual;
};
std::optional<IsoWitness> iso_witness(const Correspondence& e, const Correspondence& f,
                                      double tol = kDefaultTol);

/// Bilinear structure of a tensor product (left factor) o (right factor),
/// materialized through the Gram-quotient construction. apply() evaluates
/// x o y in normal-form coordinates; left_operator() pushes an operator a on
/// the left factor through to a o id.
struct TensorData {
  HilbertModule left_shape;
  Correspondence right;
  HilbertModule result;
  std::vector<std::vector<Mat>> ck;        // [left block j][result block l]
  std::vector<std::vector<int>> rho;       // numerical ranks, = mu of right factor

  int band_offset(int j, int l) const;
  ModuleElement apply(const ModuleElement& x, const ModuleElement& y) const;
  ModuleOperator left_operator(const ModuleOperator& a) const;
};

/// F o E for a plain module F and a correspondence E over F's coefficients.
TensorData tensor_module(const HilbertModule& f, const Correspondence& e,
                         double tol = kDefaultTol);

struct CorrTensorResult {
  Correspondence corr;
  TensorData data;
};

/// Interior tensor product of correspondences with the integer product
/// mu_E mu_F as a mandatory cross-check (mismatch is a hard error).
CorrTensorResult tensor(const Correspondence& e, const Correspondence& f,
                        double tol = kDefaultTol);

/// E* as a correspondence from B to K(E) (requires E full); the element
/// bijection is dual_element on the underlying modules.
Correspondence dual_correspondence(const Correspondence& e);
Correspondence dual_module_correspondence(const HilbertModule& mod);

/// E viewed as a correspondence from K(E) to B with the tautological action.
Correspondence operator_side_view(const HilbertModule& mod);

Correspondence direct_sum(const Correspondence& a, const Correspondence& b,
                          double tol = kDefaultTol);
Correspondence corr_power(const Correspondence& e, int n, double tol = kDefaultTol);

/// M_n(E) over M_n(B) with the entrywise operations.
Correspondence amplify(const Correspondence& e, int n);
MultiMatrixAlgebra amplify_algebra(const MultiMatrixAlgebra& alg, int n);

struct AmplificationUnitVector {
  bool criterion;                        // per-block m_j >= n_j, independent of n
  std::optional<UnitVector> certificate; // slicing-pattern vector when criterion holds
  int failing_block = -1;
  double search_best_defect = -1.0;      // min ||<X,X>-1|| over the randomized search
  std::string rank_bound;                // textual certificate for the failing block
};

/// Decides unit-vector existence in M_n(E) and, when the criterion fails,
/// also runs a randomized search and reports both verdicts.
AmplificationUnitVector unit_vector_in_amplification(const Correspondence& e, int n,
                                                     int search_samples = 64,
                                                     double tol = kDefaultTol);

IMat mu_product(const IMat& a, const IMat& b);
IMat mu_identity(int k);

}  // namespace ckit
