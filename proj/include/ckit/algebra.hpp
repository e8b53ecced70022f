#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ckit {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kDefaultTol = 1e-9;

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Mismatched parents, malformed shapes, bad descriptors.
class StructuralError : public Error {
public:
  using Error::Error;
};

/// Violated operation precondition (e.g. module not full).
class PreconditionError : public Error {
public:
  using Error::Error;
};

class NotPositiveError : public Error {
public:
  NotPositiveError(const std::string& what, int block, double eigenvalue)
      : Error(what), block(block), eigenvalue(eigenvalue) {}
  int block;
  double eigenvalue;
};

class NotInvertibleError : public Error {
public:
  NotInvertibleError(const std::string& what, int block, double singular_value)
      : Error(what), block(block), singular_value(singular_value) {}
  int block;
  double singular_value;
};

/// A left action table that fails the *-homomorphism / integrality checks.
class InconsistentActionError : public Error {
public:
  using Error::Error;
};

/// Finite direct sum of full complex matrix blocks M_{n_1} + ... + M_{n_k}.
struct MultiMatrixAlgebra {
  std::vector<int> block_dims;

  MultiMatrixAlgebra() = default;
  explicit MultiMatrixAlgebra(std::vector<int> dims);

  int blocks() const { return static_cast<int>(block_dims.size()); }
  int dim(int i) const { return block_dims[static_cast<size_t>(i)]; }
  int total_dim() const;  // sum of n_i^2, the element storage size

  bool operator==(const MultiMatrixAlgebra& o) const { return block_dims == o.block_dims; }
  bool operator!=(const MultiMatrixAlgebra& o) const { return !(*this == o); }
  std::string str() const;
};

struct AlgebraElement {
  MultiMatrixAlgebra parent;
  std::vector<Mat> blocks;

  AlgebraElement() = default;
  AlgebraElement(MultiMatrixAlgebra alg, std::vector<Mat> blks);

  static AlgebraElement zero(const MultiMatrixAlgebra& alg);
  static AlgebraElement identity(const MultiMatrixAlgebra& alg);
  static AlgebraElement matrix_unit(const MultiMatrixAlgebra& alg, int block, int p, int q);

  AlgebraElement adjoint() const;
  double norm() const;  // max spectral norm over blocks

  AlgebraElement& operator+=(const AlgebraElement& o);
  AlgebraElement& operator-=(const AlgebraElement& o);
  AlgebraElement& operator*=(cxd s);
};

AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b);
AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b);
AlgebraElement operator*(cxd s, AlgebraElement a);

/// Blockwise matrix product. Throws StructuralError on parent mismatch.
AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b);

bool is_hermitian(const AlgebraElement& a, double tol = kDefaultTol);

/// Hermitian square root of a positive element; eigenvalues in [-tol*scale, 0]
/// are clipped to zero, anything below that raises NotPositiveError.
AlgebraElement psd_sqrt(const AlgebraElement& a, double tol = kDefaultTol);

/// Blockwise inverse; raises NotInvertibleError (with block index and the
/// offending singular value) if any block is singular at tolerance tol.
AlgebraElement invert(const AlgebraElement& a, double tol = kDefaultTol);

/// Spectral projection of a Hermitian PSD element onto eigenvalues > tol*max.
AlgebraElement support_projection(const AlgebraElement& a, double tol = kDefaultTol);

/// f(a) with f(x) = 1/sqrt(x) on the support, 0 on the kernel.
AlgebraElement pinv_sqrt(const AlgebraElement& a, double tol = kDefaultTol);

double min_eigenvalue(const AlgebraElement& a);

}  // namespace ckit
