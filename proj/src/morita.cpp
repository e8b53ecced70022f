#include "ckit/morita.hpp"

#include <algorithm>
#include <numeric>

namespace ckit {

AlgebraElement AlgebraIso::apply(const AlgebraElement& a) const {
  if (a.parent != src) throw StructuralError("AlgebraIso: element not in source algebra");
  AlgebraElement out = AlgebraElement::zero(dst);
  for (int i = 0; i < src.blocks(); ++i)
    out.blocks[static_cast<size_t>(perm[static_cast<size_t>(i)])] =
        unitary[static_cast<size_t>(i)] * a.blocks[static_cast<size_t>(i)] *
        unitary[static_cast<size_t>(i)].adjoint();
  return out;
}

AlgebraIso AlgebraIso::inverse() const {
  AlgebraIso inv;
  inv.src = dst;
  inv.dst = src;
  inv.perm.assign(perm.size(), 0);
  inv.unitary.resize(perm.size());
  for (size_t i = 0; i < perm.size(); ++i) {
    inv.perm[static_cast<size_t>(perm[i])] = static_cast<int>(i);
    inv.unitary[static_cast<size_t>(perm[i])] = unitary[i].adjoint();
  }
  return inv;
}

AlgebraIso AlgebraIso::identity(const MultiMatrixAlgebra& alg) {
  AlgebraIso iso;
  iso.src = iso.dst = alg;
  for (int i = 0; i < alg.blocks(); ++i) {
    iso.perm.push_back(i);
    iso.unitary.push_back(Mat::Identity(alg.dim(i), alg.dim(i)));
  }
  return iso;
}

HilbertModule relabel_module(const HilbertModule& m, const AlgebraIso& iso) {
  if (m.coeff != iso.src) throw StructuralError("relabel_module: algebra mismatch");
  std::vector<int> mults(static_cast<size_t>(m.blocks()), 0);
  for (int i = 0; i < m.blocks(); ++i) {
    if (iso.dst.dim(iso.perm[static_cast<size_t>(i)]) != m.dim(i))
      throw StructuralError("relabel_module: block dimensions differ");
    mults[static_cast<size_t>(iso.perm[static_cast<size_t>(i)])] = m.mult(i);
  }
  return {iso.dst, mults};
}

ModuleElement relabel_element(const ModuleElement& x, const AlgebraIso& iso) {
  HilbertModule dstmod = relabel_module(x.parent, iso);
  ModuleElement out = ModuleElement::zero(dstmod);
  for (int i = 0; i < x.parent.blocks(); ++i)
    out.blocks[static_cast<size_t>(iso.perm[static_cast<size_t>(i)])] =
        x.blocks[static_cast<size_t>(i)] * iso.unitary[static_cast<size_t>(i)].adjoint();
  return out;
}

Correspondence relabel_right(const Correspondence& e, const AlgebraIso& iso) {
  Correspondence out;
  out.left = e.left;
  out.module = relabel_module(e.module, iso);
  out.table.resize(static_cast<size_t>(e.left_blocks()));
  for (int i = 0; i < e.left_blocks(); ++i)
    for (int p = 0; p < e.left.dim(i); ++p)
      for (int q = 0; q < e.left.dim(i); ++q) {
        ModuleOperator op = ModuleOperator::zero(out.module);
        for (int j = 0; j < e.module.blocks(); ++j)
          op.blocks[static_cast<size_t>(iso.perm[static_cast<size_t>(j)])] =
              e.act_block(i, p, q, j);
        out.table[static_cast<size_t>(i)].push_back(std::move(op));
      }
  return out;
}

Correspondence relabel_left(const Correspondence& e, const AlgebraIso& iso) {
  if (iso.dst != e.left) throw StructuralError("relabel_left: iso target is not the left algebra");
  Correspondence out;
  out.left = iso.src;
  out.module = e.module;
  out.table.resize(static_cast<size_t>(iso.src.blocks()));
  for (int i = 0; i < iso.src.blocks(); ++i)
    for (int p = 0; p < iso.src.dim(i); ++p)
      for (int q = 0; q < iso.src.dim(i); ++q)
        out.table[static_cast<size_t>(i)].push_back(
            e.apply_left(iso.apply(AlgebraElement::matrix_unit(iso.src, i, p, q))));
  return out;
}

AlgebraIso morita_lambda(const Correspondence& m, double tol) {
  IMat mu = extract_multiplicity(m, tol);
  int k = static_cast<int>(mu.rows());
  if (mu.cols() != k) throw PreconditionError("morita_lambda: block counts differ");
  std::vector<int> perm(static_cast<size_t>(k), -1);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (mu(i, j) == 0) continue;
      if (mu(i, j) != 1 || perm[static_cast<size_t>(i)] != -1)
        throw PreconditionError("morita_lambda: multiplicity matrix is not a permutation");
      perm[static_cast<size_t>(i)] = j;
    }
    if (perm[static_cast<size_t>(i)] < 0)
      throw PreconditionError("morita_lambda: zero row in the multiplicity matrix");
  }
  std::vector<bool> hit(static_cast<size_t>(k), false);
  for (int i = 0; i < k; ++i) {
    if (hit[static_cast<size_t>(perm[static_cast<size_t>(i)])])
      throw PreconditionError("morita_lambda: multiplicity matrix is not a permutation");
    hit[static_cast<size_t>(perm[static_cast<size_t>(i)])] = true;
  }
  CorrCanon canon = canonical_form(m, tol);
  AlgebraIso iso;
  iso.src = m.left;
  iso.dst = MultiMatrixAlgebra(m.module.mults);
  iso.perm = perm;
  iso.unitary.resize(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i)
    iso.unitary[static_cast<size_t>(i)] =
        canon.block_basis[static_cast<size_t>(perm[static_cast<size_t>(i)])];
  return iso;
}

MoritaCheck is_morita_equivalence(const Correspondence& m, double tol) {
  MoritaCheck out;
  IMat mu;
  try {
    mu = extract_multiplicity(m, tol);
  } catch (const Error& err) {
    out.reason = err.what();
    return out;
  }
  if (mu.rows() != mu.cols()) {
    out.reason = "left and right algebras have different block counts";
    return out;
  }
  int k = static_cast<int>(mu.rows());
  for (int i = 0; i < k; ++i) {
    long long row = 0, col = 0;
    for (int j = 0; j < k; ++j) {
      row += mu(i, j);
      col += mu(j, i);
      if (mu(i, j) < 0 || mu(i, j) > 1) {
        out.reason = "multiplicity entry exceeds 1";
        return out;
      }
    }
    if (row != 1 || col != 1) {
      out.reason = "multiplicity matrix is not a permutation (the canonical map misses K(M))";
      return out;
    }
  }

  MoritaEquivalence w;
  w.m = m;
  w.lambda = morita_lambda(m, tol);
  w.perm = w.lambda.perm;
  AlgebraIso lam_inv = w.lambda.inverse();

  Correspondence mstar = relabel_right(dual_correspondence(m), lam_inv);  // B_op -> A
  // M* o M over the right algebra
  CorrTensorResult mm = tensor(mstar, m, tol);
  auto wit1 = iso_witness(mm.corr, trivial_correspondence(m.module.coeff), tol);
  // M o M* pulled back to the left algebra
  CorrTensorResult mm2 = tensor(m, relabel_right(dual_correspondence(m), lam_inv), tol);
  auto wit2 = iso_witness(mm2.corr, trivial_correspondence(m.left), tol);
  if (!wit1 || !wit2) {
    out.reason = wit1 ? "M o M* is not the trivial correspondence"
                      : "M* o M is not the trivial correspondence";
    return out;
  }
  w.right_identity_residual = wit1->residual;
  w.left_identity_residual = wit2->residual;
  out.ok = true;
  out.witness = std::move(w);
  return out;
}

Correspondence canonical_morita(const MultiMatrixAlgebra& a, const MultiMatrixAlgebra& b,
                                const std::vector<int>& perm) {
  if (a.blocks() != b.blocks() || static_cast<int>(perm.size()) != a.blocks())
    throw PreconditionError("canonical_morita: block counts differ");
  IMat mu = IMat::Zero(a.blocks(), b.blocks());
  for (int i = 0; i < a.blocks(); ++i) mu(i, perm[static_cast<size_t>(i)]) = 1;
  return from_multiplicity(a, b, mu);
}

TransportedModule transport_module(const HilbertModule& f, const MoritaEquivalence& m,
                                   double tol) {
  if (f.coeff != m.m.left) throw PreconditionError("transport_module: coefficient mismatch");
  TensorData td = tensor_module(f, m.m, tol);
  return {td.result, td};
}

TransportedCorrespondence transport_correspondence(const Correspondence& e,
                                                   const MoritaEquivalence& m, double tol) {
  if (e.left != m.m.left || e.module.coeff != m.m.left)
    throw PreconditionError("transport_correspondence: coefficient mismatch");
  AlgebraIso lam_inv = m.lambda.inverse();
  Correspondence mstar = relabel_right(dual_correspondence(m.m), lam_inv);
  CorrTensorResult t1 = tensor(mstar, e, tol);
  CorrTensorResult t2 = tensor(t1.corr, m.m, tol);
  IMat mu_e = extract_multiplicity(e, tol);
  IMat mu_t = extract_multiplicity(t2.corr, tol);
  int k = e.left.blocks();
  IMat expected(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      expected(m.perm[static_cast<size_t>(i)], m.perm[static_cast<size_t>(j)]) = mu_e(i, j);
  double law = (mu_t == expected) ? 0.0 : 1.0;
  return {std::move(t2.corr), law};
}

MoritaDecision correspondences_morita_equivalent(const Correspondence& e,
                                                 const Correspondence& f, double tol) {
  MoritaDecision out;
  const MultiMatrixAlgebra& b = e.module.coeff;
  const MultiMatrixAlgebra& c = f.module.coeff;
  if (e.left != b || f.left != c)
    throw PreconditionError("morita decision expects correspondences over single algebras");
  if (b.blocks() != c.blocks()) return out;
  int k = b.blocks();
  if (k > 8) throw PreconditionError("morita decision: block count exceeds the search cap 8");

  IMat mu_e = extract_multiplicity(e, tol);
  IMat mu_f = extract_multiplicity(f, tol);
  std::vector<int> perm(static_cast<size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    IMat moved(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        moved(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]) = mu_e(i, j);
    if (moved == mu_f) {
      Correspondence m = canonical_morita(b, c, perm);
      MoritaCheck chk = is_morita_equivalence(m, tol);
      if (!chk.ok) continue;
      // verify E o M = M o F
      CorrTensorResult em = tensor(e, m, tol);
      CorrTensorResult mf = tensor(m, f, tol);
      auto wit = iso_witness(em.corr, mf.corr, tol);
      if (!wit) continue;
      out.equivalent = true;
      out.perm = perm;
      out.witness = std::move(chk.witness);
      out.intertwine_residual = wit->residual;
      return out;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

TransportedSlice product_system_transport(const ProductSystemSlice& s,
                                          const MoritaEquivalence& m, double tol) {
  TransportedCorrespondence base = transport_correspondence(s.base, m, tol);
  TransportedSlice out{build_slice(base.corr, s.depth, tol), 0.0, 0.0};
  double worst = base.mu_law_residual;
  for (int t = 2; t <= s.depth; ++t) {
    TransportedCorrespondence lvl =
        transport_correspondence(s.levels[static_cast<size_t>(t)], m, tol);
    auto wit = iso_witness(lvl.corr, out.slice.levels[static_cast<size_t>(t)], tol);
    if (!wit)
      throw Error("product_system_transport: transported level " + std::to_string(t) +
                  " is not isomorphic to the tensor power");
    worst = std::max(worst, std::max(lvl.mu_law_residual, wit->residual));
  }
  out.levelwise_residual = worst;
  out.cocycle_residual = out.slice.associativity_defect();
  return out;
}

TransportedUnit transport_unit(const TransportedSlice& ts, double tol) {
  TransportedUnit out;
  UnitVectorDecision d = unit_vector_exists(ts.slice.base.module);
  if (!d.exists) return out;
  out.exists = true;
  out.unit = make_unit(ts.slice, d.certificate->element, tol);
  return out;
}

}  // namespace ckit
