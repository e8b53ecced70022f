#pragma once

#include <random>

#include "ckit/commutant.hpp"
#include "ckit/corresp.hpp"

namespace ckit::testing {

inline std::mt19937_64 make_rng(uint64_t seed) { return std::mt19937_64(seed); }

inline Mat random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = cxd(gauss(rng), gauss(rng));
  return m;
}

inline Mat random_unitary(std::mt19937_64& rng, int n) {
  if (n == 0) return Mat(0, 0);
  Eigen::HouseholderQR<Mat> qr(random_matrix(rng, n, n));
  Mat q = qr.householderQ();
  // fix the phases so the result is reproducible across runs
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    cxd d = r(i, i);
    if (std::abs(d) > 1e-14) q.col(i) *= d / std::abs(d);
  }
  return q;
}

inline AlgebraElement random_element(std::mt19937_64& rng, const MultiMatrixAlgebra& alg) {
  AlgebraElement e = AlgebraElement::zero(alg);
  for (int i = 0; i < alg.blocks(); ++i) e.blocks[i] = random_matrix(rng, alg.dim(i), alg.dim(i));
  return e;
}

inline ModuleElement random_module_element(std::mt19937_64& rng, const HilbertModule& mod) {
  ModuleElement x = ModuleElement::zero(mod);
  for (int i = 0; i < mod.blocks(); ++i) x.blocks[i] = random_matrix(rng, mod.mult(i), mod.dim(i));
  return x;
}

/// Dense block-diagonal embedding of a multi-matrix algebra element; the
/// oracle route for products and norms.
inline Mat dense_embedding(const AlgebraElement& e) {
  int total = 0;
  for (const auto& b : e.blocks) total += static_cast<int>(b.rows());
  Mat m = Mat::Zero(total, total);
  int off = 0;
  for (const auto& b : e.blocks) {
    m.block(off, off, b.rows(), b.cols()) = b;
    off += static_cast<int>(b.rows());
  }
  return m;
}

/// The correspondence of Example 3.1 with the action written out explicitly
/// (inherited from the 3x3 matrix picture), not synthesized from mu.
inline Correspondence example31_explicit() {
  MultiMatrixAlgebra b({1, 2});
  Correspondence e;
  e.left = b;
  e.module = HilbertModule(b, {2, 1});
  e.table.resize(2);
  {  // block 1 of B acts on the row part only
    ModuleOperator op = ModuleOperator::zero(e.module);
    op.blocks[1](0, 0) = 1.0;
    e.table[0].push_back(op);
  }
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) {  // M_2 acts on the column part
      ModuleOperator op = ModuleOperator::zero(e.module);
      op.blocks[0](p, q) = 1.0;
      e.table[1].push_back(op);
    }
  return e;
}

inline IMat example31_mu() {
  IMat mu(2, 2);
  mu << 0, 1, 1, 0;
  return mu;
}

/// Truncated Example 10.2 multiplicity matrix on k blocks.
inline IMat example102_mu(int k) {
  IMat mu = IMat::Zero(k, k);
  mu(0, 0) = 1;
  for (int n = 0; n + 1 < k; ++n) mu(n, n + 1) = 1;
  return mu;
}

inline MultiMatrixAlgebra example102_algebra(int k) {
  std::vector<int> dims;
  for (int i = 1; i <= k; ++i) dims.push_back(i);
  return MultiMatrixAlgebra(dims);
}

inline Correspondence random_twisted(std::mt19937_64& rng, const MultiMatrixAlgebra& left,
                                     const MultiMatrixAlgebra& right, const IMat& mu) {
  std::vector<Mat> twists;
  for (int j = 0; j < right.blocks(); ++j) {
    long long m = 0;
    for (int i = 0; i < left.blocks(); ++i) m += left.dim(i) * mu(i, j);
    twists.push_back(random_unitary(rng, static_cast<int>(m)));
  }
  return from_multiplicity(left, right, mu, std::move(twists));
}

/// Dense nullspace oracle for intertwiner spaces: stacks the vectorized
/// equations rho(b) X - X pi(b) = 0 over matrix-unit generators.
inline std::vector<Mat> dense_intertwiners(const ConcreteRep& rho, const ConcreteRep& pi,
                                           double tol = 1e-9) {
  int dh = rho.dim, dg = pi.dim;
  int gens = 0;
  for (int i = 0; i < rho.alg.blocks(); ++i) gens += rho.alg.dim(i) * rho.alg.dim(i);
  Mat a = Mat::Zero(gens * dh * dg, dh * dg);
  int row = 0;
  for (int i = 0; i < rho.alg.blocks(); ++i)
    for (int p = 0; p < rho.alg.dim(i); ++p)
      for (int q = 0; q < rho.alg.dim(i); ++q) {
        // vec(rho X) = (I (x) rho) vec(X), vec(X pi) = (pi^T (x) I) vec(X)
        Mat lhs = kron(Mat::Identity(dg, dg), rho.unit(i, p, q)) -
                  kron(pi.unit(i, p, q).transpose(), Mat::Identity(dh, dh));
        a.middleRows(row, dh * dg) = lhs;
        row += dh * dg;
      }
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinV);
  std::vector<Mat> basis;
  for (int c = 0; c < svd.matrixV().cols(); ++c) {
    if (c < svd.singularValues().size() && svd.singularValues()(c) > tol * std::sqrt(1.0 * gens))
      continue;
    Mat x(dh, dg);
    for (int col = 0; col < dg; ++col) x.col(col) = svd.matrixV().col(c).segment(col * dh, dh);
    basis.push_back(x);
  }
  // JacobiSVD orders singular values descending; nullspace = trailing columns
  std::vector<Mat> out;
  int rank = 0;
  for (int c = 0; c < svd.singularValues().size(); ++c)
    if (svd.singularValues()(c) > 1e-8) ++rank;
  out.clear();
  for (int c = rank; c < svd.matrixV().cols(); ++c) {
    Mat x(dh, dg);
    for (int col = 0; col < dg; ++col) x.col(col) = svd.matrixV().col(c).segment(col * dh, dh);
    out.push_back(x);
  }
  return out;
}

}  // namespace ckit::testing
