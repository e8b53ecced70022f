#include "ckit/dynamics.hpp"

#include <Eigen/QR>
#include <numeric>

namespace ckit {

AlgebraElement Endomorphism::apply(const AlgebraElement& a) const {
  ModuleOperator op = carrier.apply_left(a);
  return {domain, op.blocks};
}

AlgebraElement Endomorphism::unit_image(int i, int p, int q) const {
  ModuleOperator op = carrier.act(i, p, q);
  return {domain, op.blocks};
}

bool Endomorphism::unital(double tol) const {
  AlgebraElement s = apply(AlgebraElement::identity(domain));
  return (s - AlgebraElement::identity(domain)).norm() <= 1e3 * tol;
}

Endomorphism endomorphism_from_images(const MultiMatrixAlgebra& domain,
                                      std::vector<std::vector<AlgebraElement>> images,
                                      double tol) {
  Correspondence carrier;
  carrier.left = domain;
  carrier.module = HilbertModule(domain, domain.block_dims);
  carrier.table.resize(static_cast<size_t>(domain.blocks()));
  if (static_cast<int>(images.size()) != domain.blocks())
    throw StructuralError("endomorphism images: wrong block count");
  for (int i = 0; i < domain.blocks(); ++i) {
    if (static_cast<int>(images[static_cast<size_t>(i)].size()) != domain.dim(i) * domain.dim(i))
      throw StructuralError("endomorphism images: wrong unit count in block " + std::to_string(i));
    for (auto& img : images[static_cast<size_t>(i)])
      carrier.table[static_cast<size_t>(i)].push_back(ModuleOperator{carrier.module, img.blocks});
  }
  Endomorphism theta{domain, std::move(carrier)};
  theta.validate(tol);
  return theta;
}

Endomorphism endomorphism_from_multiplicity(const MultiMatrixAlgebra& domain, const IMat& mu,
                                            std::vector<Mat> twists) {
  Correspondence carrier = from_multiplicity(domain, domain, mu, std::move(twists));
  if (carrier.module.mults != domain.block_dims)
    throw PreconditionError("endomorphism multiplicity pattern does not preserve dimensions");
  return {domain, std::move(carrier)};
}

Endomorphism identity_endomorphism(const MultiMatrixAlgebra& domain) {
  return {domain, trivial_correspondence(domain)};
}

CorrespondenceOf correspondence_of(const Endomorphism& theta, const HilbertModule& f,
                                   double tol) {
  if (!f.full()) throw PreconditionError("correspondence_of: module must be full");
  MultiMatrixAlgebra d(f.mults);
  if (theta.domain != d)
    throw PreconditionError("correspondence_of: endomorphism does not act on B^a(F)");
  if (!theta.unital(tol)) throw PreconditionError("correspondence_of: endomorphism not unital");

  // F with left action a.x = theta(a) x
  Correspondence theta_f;
  theta_f.left = d;
  theta_f.module = f;
  theta_f.table.resize(static_cast<size_t>(d.blocks()));
  for (int i = 0; i < d.blocks(); ++i)
    for (int p = 0; p < d.dim(i); ++p)
      for (int q = 0; q < d.dim(i); ++q)
        theta_f.table[static_cast<size_t>(i)].push_back(
            ModuleOperator{f, theta.unit_image(i, p, q).blocks});

  Correspondence fstar = dual_module_correspondence(f);
  CorrTensorResult inner_t = tensor(fstar, theta_f, tol);

  TensorData outer = tensor_module(f, inner_t.corr, tol);
  if (outer.result.mults != f.mults)
    throw InconsistentActionError("correspondence_of: F o E_theta does not match F");

  // unitary w : F o E_theta -> F from x o (y* o z) -> theta(x y*) z
  HilbertModule dualmod = dual(f);
  auto funits = module_units(f);
  CorrespondenceOf out{std::move(inner_t.corr), inner_t.data, outer, {}, 0.0, 0.0, 0.0};

  int k = f.blocks();
  std::vector<Mat> lhs_cols(static_cast<size_t>(k)), rhs_cols(static_cast<size_t>(k));
  std::vector<std::vector<Vec>> lhs(static_cast<size_t>(k)), rhs(static_cast<size_t>(k));
  for (const auto& x : funits)
    for (const auto& y : funits) {
      AlgebraElement xy{d, rank_one(x, y).blocks};
      ModuleOperator txy{f, theta.apply(xy).blocks};
      for (const auto& z : funits) {
        ModuleElement t = out.inner.apply(dual_element(dualmod, y), z);
        ModuleElement v = out.outer.apply(x, t);
        ModuleElement w = txy.apply(z);
        for (int l = 0; l < k; ++l)
          for (int c = 0; c < f.dim(l); ++c) {
            lhs[static_cast<size_t>(l)].push_back(v.blocks[l].col(c));
            rhs[static_cast<size_t>(l)].push_back(w.blocks[l].col(c));
          }
      }
    }
  out.w.resize(static_cast<size_t>(k));
  double solve_res = 0.0, unit_res = 0.0;
  for (int l = 0; l < k; ++l) {
    int m = f.mult(l);
    Mat s(m, static_cast<Eigen::Index>(lhs[static_cast<size_t>(l)].size()));
    Mat r(m, static_cast<Eigen::Index>(rhs[static_cast<size_t>(l)].size()));
    for (size_t c = 0; c < lhs[static_cast<size_t>(l)].size(); ++c) {
      s.col(static_cast<Eigen::Index>(c)) = lhs[static_cast<size_t>(l)][c];
      r.col(static_cast<Eigen::Index>(c)) = rhs[static_cast<size_t>(l)][c];
    }
    // w s = r  =>  s* w* = r*
    Mat wadj = s.adjoint().completeOrthogonalDecomposition().solve(r.adjoint());
    out.w[static_cast<size_t>(l)] = wadj.adjoint();
    solve_res = std::max(solve_res, (out.w[static_cast<size_t>(l)] * s - r).norm());
    unit_res = std::max(unit_res, (out.w[static_cast<size_t>(l)] *
                                       out.w[static_cast<size_t>(l)].adjoint() -
                                   Mat::Identity(m, m))
                                      .norm());
  }
  out.well_defined_residual = solve_res;
  out.unitary_residual = unit_res;

  double conj = 0.0;
  for (int i = 0; i < d.blocks(); ++i)
    for (int p = 0; p < d.dim(i); ++p)
      for (int q = 0; q < d.dim(i); ++q) {
        ModuleOperator gen = ModuleOperator::zero(f);
        gen.blocks[i](p, q) = 1.0;
        ModuleOperator amp = out.outer.left_operator(gen);
        AlgebraElement img = theta.unit_image(i, p, q);
        for (int l = 0; l < k; ++l)
          conj = std::max(conj, (out.w[static_cast<size_t>(l)] * amp.blocks[l] *
                                     out.w[static_cast<size_t>(l)].adjoint() -
                                 img.blocks[l])
                                    .norm());
      }
  out.conjugation_residual = conj;
  return out;
}

EndoExistence endo_exists(const Correspondence& e, double tol) {
  if (!e.is_full()) throw PreconditionError("endo_exists: correspondence must be full");
  IMat mu = extract_multiplicity(e, tol);
  FixedVectorResult r = positive_fixed_vector(mu, /*transpose=*/true);
  return {r.exists, r.vec, r.certificate};
}

EndoExistence esemigroup_exists(const Correspondence& e, double tol) {
  IMat mu = extract_multiplicity(e, tol);
  FixedVectorResult r = positive_subinvariant_vector(mu);
  return {r.exists, r.vec, r.certificate};
}

EndoConstruction endo_construct(const Correspondence& e, const std::vector<long long>& m,
                                double tol) {
  if (!e.is_full()) throw PreconditionError("endo_construct: correspondence must be full");
  IMat mu = extract_multiplicity(e, tol);
  int k = e.module.coeff.blocks();
  if (static_cast<int>(m.size()) != k)
    throw PreconditionError("endo_construct: multiplicity vector arity mismatch");
  for (int j = 0; j < k; ++j) {
    long long sum = 0;
    for (int i = 0; i < k; ++i) sum += m[static_cast<size_t>(i)] * mu(i, j);
    if (m[static_cast<size_t>(j)] < 1 || sum != m[static_cast<size_t>(j)])
      throw PreconditionError("endo_construct: m is not a positive fixed vector of mu^T");
  }
  std::vector<int> mults(m.begin(), m.end());
  HilbertModule f(e.module.coeff, mults);
  TensorData outer = tensor_module(f, e, tol);
  if (outer.result.mults != f.mults)
    throw InconsistentActionError("endo_construct: F o E does not reproduce the mults of F");

  MultiMatrixAlgebra d(f.mults);
  std::vector<std::vector<AlgebraElement>> images(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i)
    for (int p = 0; p < d.dim(i); ++p)
      for (int q = 0; q < d.dim(i); ++q) {
        ModuleOperator gen = ModuleOperator::zero(f);
        gen.blocks[i](p, q) = 1.0;
        ModuleOperator img = outer.left_operator(gen);
        images[static_cast<size_t>(i)].push_back(AlgebraElement{d, img.blocks});
      }
  Endomorphism theta = endomorphism_from_images(d, std::move(images), tol);

  CorrespondenceOf roundtrip = correspondence_of(theta, f, tol);
  auto wit = iso_witness(roundtrip.e_theta, e, tol);
  if (!wit)
    throw InconsistentActionError("endo_construct: correspondence of theta is not isomorphic to E");
  double res = std::max({roundtrip.well_defined_residual, roundtrip.unitary_residual,
                         roundtrip.conjugation_residual, wit->residual});
  return {std::move(f), std::move(theta), res};
}

namespace {

// Right-linear map between normal-form modules as per-block matrices,
// extracted from its action on the column-0 units.
std::vector<Mat> linear_map_blocks(const HilbertModule& from, const HilbertModule& to,
                                   const std::function<ModuleElement(const ModuleElement&)>& f) {
  std::vector<Mat> blocks;
  for (int l = 0; l < from.blocks(); ++l) {
    Mat b(to.mult(l), from.mult(l));
    for (int r = 0; r < from.mult(l); ++r) {
      if (from.dim(l) == 0) continue;
      ModuleElement u = ModuleElement::unit(from, l, r, 0);
      b.col(r) = f(u).blocks[l].col(0);
    }
    blocks.push_back(std::move(b));
  }
  return blocks;
}

}  // namespace

std::vector<Mat> InductiveDilation::theta_apply(const std::vector<Mat>& a) const {
  const HilbertModule& mn = slice.level_module(level);
  ModuleOperator op{mn, a};
  ModuleOperator amp = slice.trivial_base
                           ? ModuleOperator{slice.level_module(level + 1), a}
                           : slice.step[static_cast<size_t>(level)].left_operator(op);
  std::vector<Mat> out;
  for (int l = 0; l < mn.blocks(); ++l)
    out.push_back(embed[static_cast<size_t>(l)].adjoint() * amp.blocks[l] *
                  embed[static_cast<size_t>(l)]);
  return out;
}

ModuleElement InductiveDilation::chain_embed(int t, const ModuleElement& x) const {
  if (t == level) return x;
  return slice.mult(level - t, t, unit.xi[static_cast<size_t>(level - t)], x);
}

InductiveDilation inductive_dilation(const Correspondence& e, const ModuleElement& xi1, int level,
                                     double tol, int max_generators) {
  if (level < 1) throw PreconditionError("inductive_dilation: level must be >= 1");
  AlgebraElement g = inner(xi1, xi1);
  if (g.norm() > 1.0 + 1e3 * tol)
    throw PreconditionError("inductive_dilation: unit candidate is not a contraction");

  InductiveDilation out{build_slice(e, level + 1, tol), level, {}, {}, {}};
  out.unit = make_unit(out.slice, xi1, tol);

  const HilbertModule& mn = out.slice.level_module(level);
  const HilbertModule& mn1 = out.slice.level_module(level + 1);
  out.embed = linear_map_blocks(mn, mn1, [&](const ModuleElement& x) {
    return out.slice.mult(1, level, xi1, x);
  });

  // chain embeddings E_t -> E_N for the support-level defect rows
  std::vector<std::vector<Mat>> chain(static_cast<size_t>(level + 1));
  for (int t = 0; t <= level; ++t)
    chain[static_cast<size_t>(t)] =
        linear_map_blocks(out.slice.level_module(t), mn,
                          [&](const ModuleElement& x) { return out.chain_embed(t, x); });

  DilationReport rep;
  for (int t = 0; t <= level; ++t) {
    AlgebraElement gt =
        inner(out.unit.xi[static_cast<size_t>(t)], out.unit.xi[static_cast<size_t>(t)]);
    rep.unit_defect.push_back((gt - AlgebraElement::identity(gt.parent)).norm());
  }
  {
    std::vector<Mat> one;
    for (int l = 0; l < mn.blocks(); ++l) one.push_back(Mat::Identity(mn.mult(l), mn.mult(l)));
    std::vector<Mat> img = out.theta_apply(one);
    double d = 0.0;
    for (int l = 0; l < mn.blocks(); ++l)
      d = std::max(d, (img[static_cast<size_t>(l)] -
                       Mat::Identity(mn.mult(l), mn.mult(l)))
                          .norm());
    rep.unitality_defect = d;
  }

  for (int t = 0; t < level; ++t) {
    const HilbertModule& mt = out.slice.level_module(t);
    // sampled generators of B^a(E_t), embedded at level N
    std::vector<std::vector<Mat>> gens;
    int budget = max_generators;
    for (int l = 0; l < mt.blocks() && budget > 0; ++l)
      for (int r = 0; r < mt.mult(l) && budget > 0; ++r)
        for (int s = 0; s < mt.mult(l) && budget > 0; ++s) {
          std::vector<Mat> a;
          for (int l2 = 0; l2 < mt.blocks(); ++l2)
            a.push_back(Mat::Zero(mt.mult(l2), mt.mult(l2)));
          a[static_cast<size_t>(l)](r, s) = 1.0;
          gens.push_back(std::move(a));
          --budget;
        }

    auto lift = [&](const std::vector<Mat>& a) {
      std::vector<Mat> lifted;
      for (int l = 0; l < mn.blocks(); ++l)
        lifted.push_back(chain[static_cast<size_t>(t)][static_cast<size_t>(l)] *
                         a[static_cast<size_t>(l)] *
                         chain[static_cast<size_t>(t)][static_cast<size_t>(l)].adjoint());
      return lifted;
    };

    double mdef = 0.0;
    for (const auto& a : gens)
      for (const auto& b : gens) {
        std::vector<Mat> la = lift(a), lb = lift(b), lab(la.size());
        for (size_t l = 0; l < la.size(); ++l) lab[l] = la[l] * lb[l];
        std::vector<Mat> t1 = out.theta_apply(lab);
        std::vector<Mat> t2 = out.theta_apply(la), t3 = out.theta_apply(lb);
        for (size_t l = 0; l < la.size(); ++l)
          mdef = std::max(mdef, (t1[l] - t2[l] * t3[l]).norm());
      }
    rep.mult_defect.push_back(mdef);

    // theta on an operator supported at level t should re-embed as a o id at level t+1
    const HilbertModule& mt1 = out.slice.level_module(t + 1);
    double cdef = 0.0;
    for (const auto& a : gens) {
      ModuleOperator onext =
          t == 0 ? out.slice.levels[1].apply_left(AlgebraElement{e.left, a})
                 : (out.slice.trivial_base
                        ? ModuleOperator{mt1, a}
                        : out.slice.step[static_cast<size_t>(t)].left_operator(
                              ModuleOperator{mt, a}));
      std::vector<Mat> la = lift(a), th = out.theta_apply(la);
      for (int l = 0; l < mn.blocks(); ++l) {
        Mat want = chain[static_cast<size_t>(t + 1)][static_cast<size_t>(l)] *
                   onext.blocks[l] *
                   chain[static_cast<size_t>(t + 1)][static_cast<size_t>(l)].adjoint();
        cdef = std::max(cdef, (th[static_cast<size_t>(l)] - want).norm());
      }
    }
    rep.compat_defect.push_back(cdef);
  }
  out.report = std::move(rep);
  return out;
}

ConjugacyResult conjugacy_check(const Endomorphism& t1, const HilbertModule& f1,
                                const Endomorphism& t2, const HilbertModule& f2,
                                double tol) {
  ConjugacyResult out;
  if (f1.coeff.blocks() != f2.coeff.blocks()) return out;
  int k = f1.coeff.blocks();
  if (k > 8) throw PreconditionError("conjugacy_check: block count exceeds the search cap 8");
  CorrespondenceOf c1 = correspondence_of(t1, f1, tol);
  CorrespondenceOf c2 = correspondence_of(t2, f2, tol);

  std::vector<int> perm(static_cast<size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool mults_ok = true;
    for (int j = 0; j < k; ++j)
      if (f1.mult(j) != f2.mult(perm[static_cast<size_t>(j)])) mults_ok = false;
    if (!mults_ok) continue;
    Correspondence m = canonical_morita(f1.coeff, f2.coeff, perm);
    CorrTensorResult em = tensor(c1.e_theta, m, tol);
    CorrTensorResult mf = tensor(m, c2.e_theta, tol);
    auto wit = iso_witness(em.corr, mf.corr, tol);
    if (!wit) continue;
    out.conjugate = true;
    out.perm = perm;
    out.residual = wit->residual;
    return out;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

TransportedEndomorphism transport_endomorphism(const Endomorphism& theta, const HilbertModule& f,
                                               const MoritaEquivalence& m, double tol) {
  if (!theta.unital(tol)) throw PreconditionError("transport_endomorphism: theta not unital");
  TransportedModule tm = transport_module(f, m, tol);
  MultiMatrixAlgebra d(f.mults), d2(tm.module.mults);

  AlgebraIso alpha;
  alpha.src = d;
  alpha.dst = d2;
  alpha.perm = m.perm;
  for (int j = 0; j < d.blocks(); ++j)
    alpha.unitary.push_back(Mat::Identity(f.mult(j), f.mult(j)));
  AlgebraIso alpha_inv = alpha.inverse();

  std::vector<std::vector<AlgebraElement>> images(static_cast<size_t>(d2.blocks()));
  for (int i = 0; i < d2.blocks(); ++i)
    for (int p = 0; p < d2.dim(i); ++p)
      for (int q = 0; q < d2.dim(i); ++q)
        images[static_cast<size_t>(i)].push_back(alpha.apply(theta.apply(
            alpha_inv.apply(AlgebraElement::matrix_unit(d2, i, p, q)))));
  Endomorphism theta2 = endomorphism_from_images(d2, std::move(images), tol);

  CorrespondenceOf c2 = correspondence_of(theta2, tm.module, tol);
  CorrespondenceOf c1 = correspondence_of(theta, f, tol);
  TransportedCorrespondence moved = transport_correspondence(c1.e_theta, m, tol);
  auto wit = iso_witness(c2.e_theta, moved.corr, tol);
  if (!wit)
    throw Error("transport_endomorphism: transported correspondence mismatch");
  double res = std::max({wit->residual, moved.mu_law_residual, c1.conjugation_residual,
                         c2.conjugation_residual});
  return {std::move(theta2), std::move(tm.module), res};
}

}  // namespace ckit
