#include "ckit/corresp.hpp"

#include <Eigen/Eigenvalues>
#include <random>
#include <sstream>

namespace ckit {

Mat kron(const Mat& a, const Mat& b) {
  Mat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

IMat mu_product(const IMat& a, const IMat& b) {
  if (a.cols() != b.rows()) throw StructuralError("mu_product: shape mismatch");
  return a * b;
}

IMat mu_identity(int k) { return IMat::Identity(k, k); }

namespace {

Mat canonical_action_block(const IMat& mu, const MultiMatrixAlgebra& left,
                           const std::vector<int>& mults, int i, int p, int q, int j) {
  int mj = mults[static_cast<size_t>(j)];
  Mat m = Mat::Zero(mj, mj);
  int off = 0;
  for (int i2 = 0; i2 < i; ++i2) off += left.dim(i2) * static_cast<int>(mu(i2, j));
  int rep = static_cast<int>(mu(i, j));
  for (int t = 0; t < rep; ++t) m(off + p * rep + t, off + q * rep + t) = 1.0;
  return m;
}

}  // namespace

ModuleOperator Correspondence::act(int i, int p, int q) const {
  if (!canonical) return table[i][static_cast<size_t>(p * left.dim(i) + q)];
  std::vector<Mat> blocks;
  blocks.reserve(module.blocks());
  for (int j = 0; j < module.blocks(); ++j) blocks.push_back(act_block(i, p, q, j));
  return {module, std::move(blocks)};
}

Mat Correspondence::act_block(int i, int p, int q, int j) const {
  if (!canonical) return table[i][static_cast<size_t>(p * left.dim(i) + q)].blocks[j];
  Mat m = canonical_action_block(mu, left, module.mults, i, p, q, j);
  if (!twists.empty()) m = twists[j] * m * twists[j].adjoint();
  return m;
}

ModuleOperator Correspondence::apply_left(const AlgebraElement& a) const {
  if (a.parent != left) throw StructuralError("apply_left: algebra mismatch");
  ModuleOperator r = ModuleOperator::zero(module);
  for (int i = 0; i < left.blocks(); ++i)
    for (int p = 0; p < left.dim(i); ++p)
      for (int q = 0; q < left.dim(i); ++q) {
        cxd c = a.blocks[i](p, q);
        if (c == cxd(0.0)) continue;
        for (int j = 0; j < module.blocks(); ++j) r.blocks[j] += c * act_block(i, p, q, j);
      }
  return r;
}

ModuleElement Correspondence::left_mul(const AlgebraElement& a, const ModuleElement& x) const {
  return apply_left(a).apply(x);
}

void Correspondence::validate(double tol) const {
  if (static_cast<int>(module.mults.size()) != module.coeff.blocks())
    throw StructuralError("correspondence module malformed");
  if (canonical) {
    for (int j = 0; j < module.blocks(); ++j) {
      long long need = 0;
      for (int i = 0; i < left.blocks(); ++i) need += left.dim(i) * mu(i, j);
      if (need != module.mult(j))
        throw InconsistentActionError("canonical action does not exhaust module block " +
                                      std::to_string(j));
      if (!twists.empty() &&
          (twists[j].adjoint() * twists[j] - Mat::Identity(module.mult(j), module.mult(j)))
                  .norm() > 1e3 * tol)
        throw StructuralError("correspondence twist is not unitary");
    }
    return;
  }
  // adjoint and product relations on matrix units
  ModuleOperator sum = ModuleOperator::zero(module);
  for (int i = 0; i < left.blocks(); ++i) {
    for (int p = 0; p < left.dim(i); ++p) {
      sum += act(i, p, p);
      for (int q = 0; q < left.dim(i); ++q) {
        if ((act(i, p, q).adjoint() - act(i, q, p)).norm() > 1e3 * tol)
          throw InconsistentActionError("left action is not adjoint-compatible");
        for (int i2 = 0; i2 < left.blocks(); ++i2)
          for (int r = 0; r < left.dim(i2); ++r)
            for (int s = 0; s < left.dim(i2); ++s) {
              ModuleOperator prod = compose(act(i, p, q), act(i2, r, s));
              if (i == i2 && q == r) prod -= act(i, p, s);
              if (prod.norm() > 1e3 * tol)
                throw InconsistentActionError("left action violates the unit relations");
            }
      }
    }
  }
  if ((sum - ModuleOperator::identity(module)).norm() > 1e3 * tol)
    throw InconsistentActionError("left action is not unital");
}

bool Correspondence::is_faithful(double tol) const {
  for (int i = 0; i < left.blocks(); ++i) {
    double n = 0.0;
    for (int j = 0; j < module.blocks(); ++j) n = std::max(n, act_block(i, 0, 0, j).norm());
    if (n <= tol) return false;
  }
  return true;
}

Correspondence trivial_correspondence(const MultiMatrixAlgebra& alg) {
  Correspondence e;
  e.left = alg;
  e.module = HilbertModule(alg, alg.block_dims);
  e.canonical = true;
  e.mu = mu_identity(alg.blocks());
  return e;
}

Correspondence from_multiplicity(const MultiMatrixAlgebra& left, const MultiMatrixAlgebra& right,
                                 const IMat& mu, std::vector<Mat> twists) {
  if (mu.rows() != left.blocks() || mu.cols() != right.blocks())
    throw StructuralError("from_multiplicity: mu has wrong shape");
  if ((mu.array() < 0).any()) throw StructuralError("from_multiplicity: mu must be nonnegative");
  std::vector<int> mults(static_cast<size_t>(right.blocks()), 0);
  for (int j = 0; j < right.blocks(); ++j) {
    long long m = 0;
    for (int i = 0; i < left.blocks(); ++i) m += left.dim(i) * mu(i, j);
    mults[static_cast<size_t>(j)] = static_cast<int>(m);
  }
  Correspondence e;
  e.left = left;
  e.module = HilbertModule(right, mults);
  e.canonical = true;
  e.mu = mu;
  if (!twists.empty()) {
    if (static_cast<int>(twists.size()) != right.blocks())
      throw StructuralError("from_multiplicity: wrong number of twists");
    for (int j = 0; j < right.blocks(); ++j)
      if (twists[j].rows() != mults[static_cast<size_t>(j)] ||
          (twists[j].adjoint() * twists[j] -
           Mat::Identity(twists[j].rows(), twists[j].rows()))
                  .norm() > 1e-8)
        throw StructuralError("from_multiplicity: twist " + std::to_string(j) +
                              " is not a unitary of the right size");
    e.twists = std::move(twists);
  }
  return e;
}

IMat extract_multiplicity(const Correspondence& e, double tol) {
  int h = e.left_blocks(), k = e.right_blocks();
  IMat mu(h, k);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < k; ++j) {
      Mat p = e.act_block(i, 0, 0, j);
      if ((p - p.adjoint()).norm() > 1e3 * tol || (p * p - p).norm() > 1e3 * tol)
        throw InconsistentActionError("extract_multiplicity: act(e_11) is not a projection");
      double tr = p.trace().real();
      long long r = std::llround(tr);
      if (std::abs(tr - static_cast<double>(r)) > 1e-6 || r < 0)
        throw InconsistentActionError("extract_multiplicity: non-integer rank " +
                                      std::to_string(tr));
      mu(i, j) = r;
    }
  for (int j = 0; j < k; ++j) {
    long long total = 0;
    for (int i = 0; i < h; ++i) total += e.left.dim(i) * mu(i, j);
    if (total != e.module.mult(j))
      throw InconsistentActionError("extract_multiplicity: block " + std::to_string(j) +
                                    " count " + std::to_string(total) + " != mult " +
                                    std::to_string(e.module.mult(j)));
  }
  return mu;
}

bool corr_is_trivial(const Correspondence& e, double tol) {
  if (e.left != e.module.coeff) return false;
  if (e.module.mults != e.module.coeff.block_dims) return false;
  if (e.canonical && e.twists.empty()) return e.mu == mu_identity(e.left.blocks());
  for (int i = 0; i < e.left.blocks(); ++i)
    for (int p = 0; p < e.left.dim(i); ++p)
      for (int q = 0; q < e.left.dim(i); ++q)
        for (int j = 0; j < e.module.blocks(); ++j) {
          Mat want = Mat::Zero(e.module.mult(j), e.module.mult(j));
          if (i == j) want(p, q) = 1.0;
          if ((e.act_block(i, p, q, j) - want).norm() > 1e3 * tol) return false;
        }
  return true;
}

RepCanon canonicalize_rep(const MultiMatrixAlgebra& alg,
                          const std::function<Mat(int, int, int)>& image, int dim, double tol) {
  RepCanon out;
  out.mult.assign(static_cast<size_t>(alg.blocks()), 0);
  out.basis = Mat::Zero(dim, dim);
  int col = 0;
  for (int i = 0; i < alg.blocks(); ++i) {
    Mat p = image(i, 0, 0);
    if ((p - p.adjoint()).norm() > 1e3 * tol || (p * p - p).norm() > 1e3 * tol)
      throw InconsistentActionError("canonicalize_rep: image of e_11 is not a projection");
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (p + p.adjoint())));
    std::vector<int> range;
    for (int t = 0; t < es.eigenvalues().size(); ++t)
      if (es.eigenvalues()(t) > 0.5) range.push_back(t);
    int rep = static_cast<int>(range.size());
    out.mult[static_cast<size_t>(i)] = rep;
    if (rep == 0) continue;
    for (int pp = 0; pp < alg.dim(i); ++pp) {
      Mat shift = pp == 0 ? p : image(i, pp, 0);
      for (int t = 0; t < rep; ++t) {
        Vec v = es.eigenvectors().col(range[static_cast<size_t>(t)]);
        out.basis.col(col + pp * rep + t) = pp == 0 ? v : Vec(shift * v);
      }
    }
    col += alg.dim(i) * rep;
  }
  if (col != dim)
    throw InconsistentActionError("canonicalize_rep: multiplicities do not exhaust the space (" +
                                  std::to_string(col) + " of " + std::to_string(dim) + ")");
  if (dim > 0 &&
      (out.basis.adjoint() * out.basis - Mat::Identity(dim, dim)).norm() > 1e4 * tol)
    throw InconsistentActionError("canonicalize_rep: canonical basis is not orthonormal");
  return out;
}

CorrCanon canonical_form(const Correspondence& e, double tol) {
  CorrCanon out;
  out.mu = IMat::Zero(e.left_blocks(), e.right_blocks());
  out.block_basis.resize(static_cast<size_t>(e.right_blocks()));
  for (int j = 0; j < e.right_blocks(); ++j) {
    RepCanon rc = canonicalize_rep(
        e.left, [&](int i, int p, int q) { return e.act_block(i, p, q, j); }, e.module.mult(j),
        tol);
    for (int i = 0; i < e.left_blocks(); ++i) out.mu(i, j) = rc.mult[static_cast<size_t>(i)];
    out.block_basis[static_cast<size_t>(j)] = rc.basis;
  }
  return out;
}

std::optional<IsoWitness> iso_witness(const Correspondence& e, const Correspondence& f,
                                      double tol) {
  if (e.left != f.left || e.module != f.module) return std::nullopt;
  IMat mue = extract_multiplicity(e, tol), muf = extract_multiplicity(f, tol);
  if (mue != muf) return std::nullopt;
  CorrCanon ce = canonical_form(e, tol), cf = canonical_form(f, tol);
  IsoWitness w;
  w.unitary.resize(static_cast<size_t>(e.right_blocks()));
  for (int j = 0; j < e.right_blocks(); ++j)
    w.unitary[static_cast<size_t>(j)] =
        cf.block_basis[static_cast<size_t>(j)] * ce.block_basis[static_cast<size_t>(j)].adjoint();
  double worst = 0.0;
  for (int i = 0; i < e.left_blocks(); ++i)
    for (int p = 0; p < e.left.dim(i); ++p)
      for (int q = 0; q < e.left.dim(i); ++q)
        for (int j = 0; j < e.right_blocks(); ++j)
          worst = std::max(worst, (w.unitary[static_cast<size_t>(j)] * e.act_block(i, p, q, j) -
                                   f.act_block(i, p, q, j) * w.unitary[static_cast<size_t>(j)])
                                      .norm());
  w.residual = worst;
  return w;
}

int TensorData::band_offset(int j, int l) const {
  int off = 0;
  for (int j2 = 0; j2 < j; ++j2) off += left_shape.mult(j2) * rho[static_cast<size_t>(j2)][static_cast<size_t>(l)];
  return off;
}

ModuleElement TensorData::apply(const ModuleElement& x, const ModuleElement& y) const {
  if (x.parent != left_shape || y.parent != right.module)
    throw StructuralError("tensor apply: element parents mismatch");
  ModuleElement out = ModuleElement::zero(result);
  for (int j = 0; j < left_shape.blocks(); ++j) {
    int mj = left_shape.mult(j), nj = left_shape.dim(j);
    if (mj == 0) continue;
    for (int r = 0; r < mj; ++r) {
      // y2 = lambda(sum_s x_j(r,s) e^{(j)}_{0s}) y
      ModuleElement y2 = ModuleElement::zero(right.module);
      bool nonzero = false;
      for (int s = 0; s < nj; ++s) {
        cxd c = x.blocks[j](r, s);
        if (c == cxd(0.0)) continue;
        nonzero = true;
        for (int l = 0; l < right.module.blocks(); ++l)
          y2.blocks[l] += c * (right.act_block(j, 0, s, l) * y.blocks[l]);
      }
      if (!nonzero) continue;
      for (int l = 0; l < result.blocks(); ++l) {
        int rr = rho[static_cast<size_t>(j)][static_cast<size_t>(l)];
        int cl = result.dim(l);
        if (rr == 0) continue;
        const Mat& c = ck[static_cast<size_t>(j)][static_cast<size_t>(l)];
        Mat contrib = Mat::Zero(rr, cl);
        int ql = right.module.mult(l);
        for (int t = 0; t < ql; ++t)
          for (int w = 0; w < cl; ++w) {
            cxd v = y2.blocks[l](t, w);
            if (v == cxd(0.0)) continue;
            contrib += v * c.middleCols((t * cl + w) * cl, cl);
          }
        out.blocks[l].middleRows(band_offset(j, l) + r * rr, rr) += contrib;
      }
    }
  }
  return out;
}

ModuleOperator TensorData::left_operator(const ModuleOperator& a) const {
  if (a.parent != left_shape) throw StructuralError("left_operator: parent mismatch");
  ModuleOperator out = ModuleOperator::zero(result);
  for (int l = 0; l < result.blocks(); ++l)
    for (int j = 0; j < left_shape.blocks(); ++j) {
      int rr = rho[static_cast<size_t>(j)][static_cast<size_t>(l)];
      int mj = left_shape.mult(j);
      if (rr == 0 || mj == 0) continue;
      int off = band_offset(j, l);
      out.blocks[l].block(off, off, mj * rr, mj * rr) = kron(a.blocks[j], Mat::Identity(rr, rr));
    }
  return out;
}

TensorData tensor_module(const HilbertModule& f, const Correspondence& e, double tol) {
  if (f.coeff != e.left)
    throw StructuralError("tensor: right algebra of the left factor (" + f.coeff.str() +
                          ") differs from the left algebra of the right factor (" +
                          e.left.str() + ")");
  TensorData td;
  td.left_shape = f;
  td.right = e;
  int nb = f.blocks(), kb = e.module.blocks();
  td.ck.assign(static_cast<size_t>(nb), std::vector<Mat>(static_cast<size_t>(kb)));
  td.rho.assign(static_cast<size_t>(nb), std::vector<int>(static_cast<size_t>(kb), 0));
  std::vector<int> mults(static_cast<size_t>(kb), 0);
  for (int j = 0; j < nb; ++j) {
    for (int l = 0; l < kb; ++l) {
      int ql = e.module.mult(l), cl = e.module.dim(l);
      if (ql == 0) continue;
      Mat p = e.act_block(j, 0, 0, l);
      int dimk = ql * cl * cl;
      Mat k(dimk, dimk);
      for (int t = 0; t < ql; ++t)
        for (int w = 0; w < cl; ++w)
          for (int s = 0; s < cl; ++s)
            for (int t2 = 0; t2 < ql; ++t2)
              for (int w2 = 0; w2 < cl; ++w2)
                for (int u = 0; u < cl; ++u)
                  k((t * cl + w) * cl + s, (t2 * cl + w2) * cl + u) =
                      (w == s && w2 == u) ? p(t, t2) : cxd(0.0);
      k = 0.5 * (k + k.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<Mat> es(k);
      double top = std::max(es.eigenvalues().size() ? es.eigenvalues().maxCoeff() : 0.0, 0.0);
      if (es.eigenvalues().size() && es.eigenvalues().minCoeff() < -tol * std::max(top, 1.0))
        throw NotPositiveError("tensor: gram is not positive semidefinite", l,
                               es.eigenvalues().minCoeff());
      double thr = tol * std::max(top, 1.0);
      int rank = 0;
      for (int t = 0; t < es.eigenvalues().size(); ++t)
        if (es.eigenvalues()(t) > thr) ++rank;
      Mat c(rank, dimk);
      int row = 0;
      for (int t = 0; t < es.eigenvalues().size(); ++t)
        if (es.eigenvalues()(t) > thr)
          c.row(row++) = std::sqrt(es.eigenvalues()(t)) * es.eigenvectors().col(t).adjoint();
      td.ck[static_cast<size_t>(j)][static_cast<size_t>(l)] = std::move(c);
      td.rho[static_cast<size_t>(j)][static_cast<size_t>(l)] = rank;
      mults[static_cast<size_t>(l)] += f.mult(j) * rank;
    }
  }
  td.result = HilbertModule(e.module.coeff, mults);
  return td;
}

CorrTensorResult tensor(const Correspondence& e, const Correspondence& f, double tol) {
  IMat mue = extract_multiplicity(e, tol);
  IMat muf = extract_multiplicity(f, tol);
  TensorData td = tensor_module(e.module, f, tol);
  // Gram-quotient ranks must reproduce the integer multiplicities of f
  for (int j = 0; j < e.module.blocks(); ++j)
    for (int l = 0; l < f.module.blocks(); ++l)
      if (f.module.mult(l) > 0 &&
          td.rho[static_cast<size_t>(j)][static_cast<size_t>(l)] != muf(j, l))
        throw InconsistentActionError(
            "tensor: Gram-quotient rank disagrees with the multiplicity product at (" +
            std::to_string(j) + "," + std::to_string(l) + ")");

  Correspondence out;
  out.left = e.left;
  out.module = td.result;
  out.canonical = false;
  out.table.resize(static_cast<size_t>(e.left_blocks()));
  for (int i = 0; i < e.left_blocks(); ++i) {
    out.table[static_cast<size_t>(i)].reserve(static_cast<size_t>(e.left.dim(i) * e.left.dim(i)));
    for (int p = 0; p < e.left.dim(i); ++p)
      for (int q = 0; q < e.left.dim(i); ++q)
        out.table[static_cast<size_t>(i)].push_back(td.left_operator(e.act(i, p, q)));
  }
  IMat mur = extract_multiplicity(out, tol);
  if (mur != mu_product(mue, muf))
    throw InconsistentActionError("tensor: multiplicity of the result is not mu_E * mu_F");
  return {std::move(out), std::move(td)};
}

Correspondence dual_module_correspondence(const HilbertModule& mod) {
  HilbertModule d = dual(mod);  // throws unless mod is full
  return from_multiplicity(mod.coeff, d.coeff, mu_identity(mod.blocks()));
}

Correspondence dual_correspondence(const Correspondence& e) {
  return dual_module_correspondence(e.module);
}

Correspondence operator_side_view(const HilbertModule& mod) {
  if (!mod.full()) throw PreconditionError("operator_side_view: module has a zero block");
  MultiMatrixAlgebra k(mod.mults);
  return from_multiplicity(k, mod.coeff, mu_identity(mod.blocks()));
}

Correspondence direct_sum(const Correspondence& a, const Correspondence& b, double tol) {
  if (a.left != b.left || a.module.coeff != b.module.coeff)
    throw StructuralError("direct_sum: correspondences over different algebras");
  Correspondence out;
  out.left = a.left;
  out.module = direct_sum(a.module, b.module);
  out.table.resize(static_cast<size_t>(a.left_blocks()));
  for (int i = 0; i < a.left_blocks(); ++i)
    for (int p = 0; p < a.left.dim(i); ++p)
      for (int q = 0; q < a.left.dim(i); ++q) {
        ModuleOperator op = ModuleOperator::zero(out.module);
        for (int j = 0; j < out.module.blocks(); ++j) {
          int ma = a.module.mult(j);
          op.blocks[j].topLeftCorner(ma, ma) = a.act_block(i, p, q, j);
          int mb = b.module.mult(j);
          op.blocks[j].bottomRightCorner(mb, mb) = b.act_block(i, p, q, j);
        }
        out.table[static_cast<size_t>(i)].push_back(std::move(op));
      }
  (void)tol;
  return out;
}

Correspondence corr_power(const Correspondence& e, int n, double tol) {
  if (n < 1) throw PreconditionError("corr_power: n must be >= 1");
  Correspondence out = e;
  for (int i = 1; i < n; ++i) out = direct_sum(out, e, tol);
  return out;
}

MultiMatrixAlgebra amplify_algebra(const MultiMatrixAlgebra& alg, int n) {
  std::vector<int> dims;
  dims.reserve(alg.block_dims.size());
  for (int d : alg.block_dims) dims.push_back(n * d);
  return MultiMatrixAlgebra(dims);
}

Correspondence amplify(const Correspondence& e, int n) {
  if (n < 1) throw PreconditionError("amplify: n must be >= 1");
  if (n == 1) return e;
  Correspondence out;
  out.left = amplify_algebra(e.left, n);
  std::vector<int> mults;
  for (int j = 0; j < e.module.blocks(); ++j) mults.push_back(n * e.module.mult(j));
  out.module = HilbertModule(amplify_algebra(e.module.coeff, n), mults);
  out.table.resize(static_cast<size_t>(e.left_blocks()));
  for (int i = 0; i < e.left_blocks(); ++i) {
    int ai = e.left.dim(i);
    for (int row = 0; row < n * ai; ++row)
      for (int col = 0; col < n * ai; ++col) {
        int p = row / ai, pp = row % ai, q = col / ai, qq = col % ai;
        ModuleOperator op = ModuleOperator::zero(out.module);
        Mat epq = Mat::Zero(n, n);
        epq(p, q) = 1.0;
        for (int j = 0; j < e.module.blocks(); ++j)
          op.blocks[j] = kron(epq, e.act_block(i, pp, qq, j));
        out.table[static_cast<size_t>(i)].push_back(std::move(op));
      }
  }
  return out;
}

AmplificationUnitVector unit_vector_in_amplification(const Correspondence& e, int n,
                                                     int search_samples, double tol) {
  if (!e.is_full()) throw PreconditionError("unit_vector_in_amplification: module is not full");
  AmplificationUnitVector out;
  UnitVectorDecision base = unit_vector_exists(e.module);
  out.criterion = base.exists;  // n m_j >= n n_j iff m_j >= n_j, for every finite n
  if (base.exists) {
    // slicing pattern: the unit vector of E placed along the diagonal
    HilbertModule amp = module_power(e.module, n);
    std::vector<int> dims;
    for (int d : e.module.coeff.block_dims) dims.push_back(n * d);
    HilbertModule ampmod(MultiMatrixAlgebra(dims), amp.mults);
    ModuleElement x = ModuleElement::zero(ampmod);
    for (int j = 0; j < ampmod.blocks(); ++j)
      x.blocks[j] = kron(Mat::Identity(n, n), base.certificate->element.blocks[j]);
    out.certificate = UnitVector{x};
    return out;
  }
  out.failing_block = base.failing_block;
  {
    std::ostringstream os;
    int j = base.failing_block;
    os << "rank <X,X> on block " << j << " is at most n*m_j = " << n * e.module.mult(j)
       << " < n*n_j = " << n * e.module.dim(j);
    out.rank_bound = os.str();
  }
  // randomized secondary witness: best achievable ||<X,X> - 1|| over samples
  std::vector<int> dims;
  for (int d : e.module.coeff.block_dims) dims.push_back(n * d);
  std::vector<int> mults;
  for (int m : e.module.mults) mults.push_back(n * m);
  HilbertModule ampmod(MultiMatrixAlgebra(dims), mults);
  std::mt19937_64 rng(0xa11cEULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double best = std::numeric_limits<double>::infinity();
  AlgebraElement one = AlgebraElement::identity(ampmod.coeff);
  for (int s = 0; s < search_samples; ++s) {
    ModuleElement x = ModuleElement::zero(ampmod);
    for (auto& blk : x.blocks)
      for (int r = 0; r < blk.rows(); ++r)
        for (int c = 0; c < blk.cols(); ++c) blk(r, c) = cxd(gauss(rng), gauss(rng));
    AlgebraElement g = inner(x, x);
    best = std::min(best, (g - one).norm());
    // polish: normalizing on the support leaves exactly the rank defect
    ModuleElement xp = rmul(x, pinv_sqrt(g, std::max(tol, 1e-12)));
    best = std::min(best, (inner(xp, xp) - one).norm());
  }
  out.search_best_defect = best;
  return out;
}

}  // namespace ckit
