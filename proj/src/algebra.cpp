#include "ckit/algebra.hpp"

#include <Eigen/Eigenvalues>
#include <sstream>

namespace ckit {

namespace {

void require_same_parent(const AlgebraElement& a, const AlgebraElement& b, const char* op) {
  if (a.parent != b.parent)
    throw StructuralError(std::string(op) + ": elements live in different algebras (" +
                          a.parent.str() + " vs " + b.parent.str() + ")");
}

double spectral_norm(const Mat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  // singular values derived from the Hermitian eigenproblem of m* m
  Eigen::SelfAdjointEigenSolver<Mat> es(m.adjoint() * m);
  double top = es.eigenvalues().maxCoeff();
  return top > 0 ? std::sqrt(top) : 0.0;
}

}  // namespace

MultiMatrixAlgebra::MultiMatrixAlgebra(std::vector<int> dims) : block_dims(std::move(dims)) {
  if (block_dims.empty()) throw StructuralError("algebra needs at least one block");
  for (int n : block_dims)
    if (n < 1) throw StructuralError("algebra block dimensions must be >= 1");
}

int MultiMatrixAlgebra::total_dim() const {
  int t = 0;
  for (int n : block_dims) t += n * n;
  return t;
}

std::string MultiMatrixAlgebra::str() const {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < block_dims.size(); ++i) os << (i ? "," : "") << block_dims[i];
  os << "]";
  return os.str();
}

AlgebraElement::AlgebraElement(MultiMatrixAlgebra alg, std::vector<Mat> blks)
    : parent(std::move(alg)), blocks(std::move(blks)) {
  if (static_cast<int>(blocks.size()) != parent.blocks())
    throw StructuralError("element has wrong number of blocks");
  for (int i = 0; i < parent.blocks(); ++i)
    if (blocks[i].rows() != parent.dim(i) || blocks[i].cols() != parent.dim(i))
      throw StructuralError("element block " + std::to_string(i) + " has wrong shape");
}

AlgebraElement AlgebraElement::zero(const MultiMatrixAlgebra& alg) {
  std::vector<Mat> b;
  b.reserve(alg.blocks());
  for (int i = 0; i < alg.blocks(); ++i) b.push_back(Mat::Zero(alg.dim(i), alg.dim(i)));
  return {alg, std::move(b)};
}

AlgebraElement AlgebraElement::identity(const MultiMatrixAlgebra& alg) {
  std::vector<Mat> b;
  b.reserve(alg.blocks());
  for (int i = 0; i < alg.blocks(); ++i) b.push_back(Mat::Identity(alg.dim(i), alg.dim(i)));
  return {alg, std::move(b)};
}

AlgebraElement AlgebraElement::matrix_unit(const MultiMatrixAlgebra& alg, int block, int p, int q) {
  AlgebraElement e = zero(alg);
  e.blocks[block](p, q) = 1.0;
  return e;
}

AlgebraElement AlgebraElement::adjoint() const {
  AlgebraElement r = *this;
  for (auto& b : r.blocks) b = b.adjoint().eval();
  return r;
}

double AlgebraElement::norm() const {
  double m = 0.0;
  for (const auto& b : blocks) m = std::max(m, spectral_norm(b));
  return m;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& o) {
  require_same_parent(*this, o, "add");
  for (size_t i = 0; i < blocks.size(); ++i) blocks[i] += o.blocks[i];
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& o) {
  require_same_parent(*this, o, "sub");
  for (size_t i = 0; i < blocks.size(); ++i) blocks[i] -= o.blocks[i];
  return *this;
}

AlgebraElement& AlgebraElement::operator*=(cxd s) {
  for (auto& b : blocks) b *= s;
  return *this;
}

AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
AlgebraElement operator*(cxd s, AlgebraElement a) { return a *= s; }

AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_parent(a, b, "mul");
  AlgebraElement r = a;
  for (size_t i = 0; i < r.blocks.size(); ++i) r.blocks[i] = a.blocks[i] * b.blocks[i];
  return r;
}

bool is_hermitian(const AlgebraElement& a, double tol) {
  double scale = std::max(a.norm(), 1.0);
  for (const auto& b : a.blocks)
    if ((b - b.adjoint()).norm() > tol * scale) return false;
  return true;
}

namespace {

// Apply f to the eigenvalues of a Hermitian element, with a PSD sanity check.
template <typename F>
AlgebraElement hermitian_calculus(const AlgebraElement& a, double tol, const char* op, F f,
                                  bool reject_negative) {
  if (!is_hermitian(a, std::max(tol, 1e-12) * 1e3))
    throw PreconditionError(std::string(op) + ": element is not Hermitian");
  AlgebraElement r = a;
  double scale = std::max(a.norm(), 1.0);
  for (int i = 0; i < a.parent.blocks(); ++i) {
    Mat h = 0.5 * (a.blocks[i] + a.blocks[i].adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Eigen::VectorXd ev = es.eigenvalues();
    if (reject_negative && ev.size() > 0 && ev.minCoeff() < -tol * scale)
      throw NotPositiveError(std::string(op) + ": negative eigenvalue in block " + std::to_string(i),
                             i, ev.minCoeff());
    Eigen::VectorXd fv(ev.size());
    for (int j = 0; j < ev.size(); ++j) fv(j) = f(ev(j), scale);
    r.blocks[i] = es.eigenvectors() * fv.asDiagonal() * es.eigenvectors().adjoint();
  }
  return r;
}

}  // namespace

AlgebraElement psd_sqrt(const AlgebraElement& a, double tol) {
  return hermitian_calculus(
      a, tol, "psd_sqrt", [](double x, double) { return x > 0 ? std::sqrt(x) : 0.0; }, true);
}

AlgebraElement support_projection(const AlgebraElement& a, double tol) {
  double top = 0.0;
  for (const auto& b : a.blocks)
    if (b.size() > 0) {
      Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (b + b.adjoint())));
      if (es.eigenvalues().size() > 0) top = std::max(top, es.eigenvalues().maxCoeff());
    }
  double thr = tol * std::max(top, 1.0);
  return hermitian_calculus(
      a, tol, "support_projection", [thr](double x, double) { return x > thr ? 1.0 : 0.0; },
      false);
}

AlgebraElement pinv_sqrt(const AlgebraElement& a, double tol) {
  double top = std::max(a.norm(), 1.0);
  double thr = tol * top;
  return hermitian_calculus(
      a, tol, "pinv_sqrt",
      [thr](double x, double) { return x > thr ? 1.0 / std::sqrt(x) : 0.0; }, false);
}

double min_eigenvalue(const AlgebraElement& a) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : a.blocks) {
    if (b.size() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (b + b.adjoint())));
    m = std::min(m, es.eigenvalues().minCoeff());
  }
  return m;
}

AlgebraElement invert(const AlgebraElement& a, double tol) {
  AlgebraElement r = a;
  double scale = std::max(a.norm(), 1.0);
  for (int i = 0; i < a.parent.blocks(); ++i) {
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(a.blocks[i].adjoint() * a.blocks[i]));
    double lo = es.eigenvalues().minCoeff();
    double smin = lo > 0 ? std::sqrt(lo) : 0.0;
    if (smin <= tol * scale)
      throw NotInvertibleError("invert: block " + std::to_string(i) + " is singular", i, smin);
    r.blocks[i] = a.blocks[i].partialPivLu().inverse();
  }
  return r;
}

}  // namespace ckit
