#pragma once

#include <optional>

#include "ckit/algebra.hpp"

namespace ckit {

/// Block-rectangular normal form of a Hilbert module over a multi-matrix
/// algebra: block i of an element is an m_i x n_i matrix, <x,y> = x* y
/// blockwise.
struct HilbertModule {
  MultiMatrixAlgebra coeff;
  std::vector<int> mults;  // m_i >= 0

  HilbertModule() = default;
  HilbertModule(MultiMatrixAlgebra alg, std::vector<int> m);

  int blocks() const { return coeff.blocks(); }
  int mult(int i) const { return mults[static_cast<size_t>(i)]; }
  int dim(int i) const { return coeff.dim(i); }
  int total_dim() const;  // sum of m_i * n_i
  bool full() const;      // all m_i >= 1

  bool operator==(const HilbertModule& o) const { return coeff == o.coeff && mults == o.mults; }
  bool operator!=(const HilbertModule& o) const { return !(*this == o); }
};

struct ModuleElement {
  HilbertModule parent;
  std::vector<Mat> blocks;  // m_i x n_i

  ModuleElement() = default;
  ModuleElement(HilbertModule mod, std::vector<Mat> blks);

  static ModuleElement zero(const HilbertModule& mod);
  /// Standard basis element: 1 at entry (r,s) of block `block`.
  static ModuleElement unit(const HilbertModule& mod, int block, int r, int s);

  double norm() const;  // sqrt of ||<x,x>||
  ModuleElement& operator+=(const ModuleElement& o);
  ModuleElement& operator-=(const ModuleElement& o);
  ModuleElement& operator*=(cxd s);
};

ModuleElement operator+(ModuleElement a, const ModuleElement& b);
ModuleElement operator-(ModuleElement a, const ModuleElement& b);
ModuleElement operator*(cxd s, ModuleElement a);

/// Right action x.b, blockwise x_i b_i.
ModuleElement rmul(const ModuleElement& x, const AlgebraElement& b);

/// Coefficient-valued inner product <x,y> = x* y blockwise.
AlgebraElement inner(const ModuleElement& x, const ModuleElement& y);

/// An adjointable operator on a module in normal form: left multiplication by
/// a block-diagonal matrix (one m_i x m_i block per module block).
struct ModuleOperator {
  HilbertModule parent;
  std::vector<Mat> blocks;

  ModuleOperator() = default;
  ModuleOperator(HilbertModule mod, std::vector<Mat> blks);

  static ModuleOperator zero(const HilbertModule& mod);
  static ModuleOperator identity(const HilbertModule& mod);

  ModuleOperator adjoint() const;
  double norm() const;
  ModuleElement apply(const ModuleElement& x) const;

  ModuleOperator& operator+=(const ModuleOperator& o);
  ModuleOperator& operator-=(const ModuleOperator& o);
  ModuleOperator& operator*=(cxd s);
};

ModuleOperator operator+(ModuleOperator a, const ModuleOperator& b);
ModuleOperator operator-(ModuleOperator a, const ModuleOperator& b);
ModuleOperator operator*(cxd s, ModuleOperator a);
ModuleOperator compose(const ModuleOperator& a, const ModuleOperator& b);

/// Rank-one operator x y* : z -> x <y,z>.
ModuleOperator rank_one(const ModuleElement& x, const ModuleElement& y);

/// A module presented by abstract generators and a coefficient-valued Gram
/// matrix G_ab = <g_a, g_b>.
struct PresentedModule {
  MultiMatrixAlgebra coeff;
  std::vector<std::vector<AlgebraElement>> gram;  // p x p, Hermitian

  int generators() const { return static_cast<int>(gram.size()); }
  void check_shape() const;
};

/// Formal right-linear combination sum_a g_a c_a of the generators of a
/// PresentedModule.
struct PresentedElement {
  std::vector<AlgebraElement> coeffs;  // one per generator
};

AlgebraElement presented_inner(const PresentedModule& m, const PresentedElement& x,
                               const PresentedElement& y);

struct UnitVector {
  ModuleElement element;  // <xi,xi> = 1 within tolerance
};

struct QuasiONBPair {
  ModuleElement e;
  AlgebraElement p;  // Hermitian projection, <e,e> = p
};

struct QuasiONB {
  std::vector<QuasiONBPair> pairs;
};

/// Quasi orthonormal basis of a presented module, as formal combinations.
struct PresentedQuasiONB {
  std::vector<PresentedElement> elements;
  std::vector<AlgebraElement> projections;
};

struct NormalizedModule {
  HilbertModule module;
  std::vector<ModuleElement> coords;  // normal-form coordinates of each generator
};

struct UnitVectorDecision {
  bool exists;
  std::optional<UnitVector> certificate;  // set when exists
  int failing_block = -1;                 // set when !exists: first block with m_i < n_i
};

struct Lemma32Result {
  int copies;            // minimal N with E^N admitting a unit vector
  HilbertModule power;   // E^N
  UnitVector xi;         // built by the invertibility recipe
  double cauchy_schwarz_lower_bound;  // certified lower bound on <X,X>
};

/// Dual module E* over the operator algebra of E (requires all mults >= 1 so
/// that the coefficient algebra of the dual is a genuine multi-matrix
/// algebra). The element bijection is x -> blockwise adjoint.
HilbertModule dual(const HilbertModule& mod);
ModuleElement dual_element(const HilbertModule& dual_mod, const ModuleElement& x);

HilbertModule direct_sum(const HilbertModule& a, const HilbertModule& b);
HilbertModule module_power(const HilbertModule& mod, int n);

/// True iff m_i >= n_i for every block; the certificate stacks an identity
/// atop zeros per block. On failure reports the first deficient block.
UnitVectorDecision unit_vector_exists(const HilbertModule& mod);

/// Minimal N such that E^N has a unit vector, together with a unit vector
/// built by the generic recipe: solve sum <x_j, y_j> = 1, certify <X,X>
/// invertible through the Cauchy-Schwarz bound, return X sqrt(<X,X>)^-1.
Lemma32Result lemma32_unit_vector(const HilbertModule& mod, double tol = kDefaultTol);

/// Greedy quasi orthonormal basis from a presentation.
PresentedQuasiONB quasi_onb(const PresentedModule& m, double tol = kDefaultTol);

/// Quasi orthonormal basis of a normal-form module.
QuasiONB quasi_onb(const HilbertModule& mod, double tol = kDefaultTol);

/// Reduce a presentation to normal form; coordinates preserve the Gram.
NormalizedModule normalize(const PresentedModule& m, double tol = kDefaultTol);

/// Verification helpers.
double quasi_onb_defect(const QuasiONB& b, const HilbertModule& mod);

}  // namespace ckit
