#include "ckit/commutant.hpp"

#include <Eigen/QR>

namespace ckit {

RepresentedAlgebra::RepresentedAlgebra(MultiMatrixAlgebra a, std::vector<int> g, Mat u)
    : alg(std::move(a)), mult(std::move(g)), twist(std::move(u)) {
  if (static_cast<int>(mult.size()) != alg.blocks())
    throw StructuralError("represented algebra: multiplicity arity mismatch");
  for (int v : mult)
    if (v < 1) throw StructuralError("represented algebra: multiplicities must be >= 1");
  if (has_twist() && (twist.rows() != dim_space() || twist.cols() != dim_space()))
    throw StructuralError("represented algebra: twist has wrong size");
}

int RepresentedAlgebra::dim_space() const {
  int d = 0;
  for (int i = 0; i < alg.blocks(); ++i) d += alg.dim(i) * mult[static_cast<size_t>(i)];
  return d;
}

int RepresentedAlgebra::offset(int i) const {
  int off = 0;
  for (int i2 = 0; i2 < i; ++i2) off += alg.dim(i2) * mult[static_cast<size_t>(i2)];
  return off;
}

Mat RepresentedAlgebra::embed(const AlgebraElement& b) const {
  if (b.parent != alg) throw StructuralError("embed: element not in the represented algebra");
  Mat m = Mat::Zero(dim_space(), dim_space());
  for (int i = 0; i < alg.blocks(); ++i) {
    int g = mult[static_cast<size_t>(i)];
    m.block(offset(i), offset(i), alg.dim(i) * g, alg.dim(i) * g) =
        kron(b.blocks[static_cast<size_t>(i)], Mat::Identity(g, g));
  }
  if (has_twist()) m = twist * m * twist.adjoint();
  return m;
}

Mat RepresentedAlgebra::embed_commutant(const AlgebraElement& c) const {
  if (c.parent != commutant_algebra())
    throw StructuralError("embed_commutant: element not in the commutant algebra");
  Mat m = Mat::Zero(dim_space(), dim_space());
  for (int i = 0; i < alg.blocks(); ++i) {
    int n = alg.dim(i), g = mult[static_cast<size_t>(i)];
    m.block(offset(i), offset(i), n * g, n * g) =
        kron(Mat::Identity(n, n), c.blocks[static_cast<size_t>(i)]);
  }
  if (has_twist()) m = twist * m * twist.adjoint();
  return m;
}

AlgebraElement RepresentedAlgebra::extract(const Mat& x, double* residual) const {
  Mat y = has_twist() ? Mat(twist.adjoint() * x * twist) : x;
  AlgebraElement out = AlgebraElement::zero(alg);
  for (int i = 0; i < alg.blocks(); ++i) {
    int n = alg.dim(i), g = mult[static_cast<size_t>(i)];
    Mat sub = y.block(offset(i), offset(i), n * g, n * g);
    Mat b = Mat::Zero(n, n);
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s) {
        cxd acc = 0.0;
        for (int t = 0; t < g; ++t) acc += sub(r * g + t, s * g + t);
        b(r, s) = acc / static_cast<double>(g);
      }
    out.blocks[static_cast<size_t>(i)] = b;
  }
  if (residual) *residual = (x - embed(out)).norm();
  return out;
}

AlgebraElement RepresentedAlgebra::extract_commutant(const Mat& x, double* residual) const {
  Mat y = has_twist() ? Mat(twist.adjoint() * x * twist) : x;
  AlgebraElement out = AlgebraElement::zero(commutant_algebra());
  for (int i = 0; i < alg.blocks(); ++i) {
    int n = alg.dim(i), g = mult[static_cast<size_t>(i)];
    Mat sub = y.block(offset(i), offset(i), n * g, n * g);
    Mat c = Mat::Zero(g, g);
    for (int t = 0; t < g; ++t)
      for (int u = 0; u < g; ++u) {
        cxd acc = 0.0;
        for (int r = 0; r < n; ++r) acc += sub(r * g + t, r * g + u);
        c(t, u) = acc / static_cast<double>(n);
      }
    out.blocks[static_cast<size_t>(i)] = c;
  }
  if (residual) *residual = (x - embed_commutant(out)).norm();
  return out;
}

RepresentedAlgebra RepresentedAlgebra::commutant() const {
  // natural layout of the commutant is (+) C^{g_i} (x) C^{n_i}; swap factors
  Mat swap = Mat::Zero(dim_space(), dim_space());
  for (int i = 0; i < alg.blocks(); ++i) {
    int n = alg.dim(i), g = mult[static_cast<size_t>(i)];
    for (int r = 0; r < n; ++r)
      for (int t = 0; t < g; ++t) swap(offset(i) + r * g + t, offset(i) + t * n + r) = 1.0;
  }
  Mat u = has_twist() ? Mat(twist * swap) : swap;
  return {commutant_algebra(), std::vector<int>(alg.block_dims), std::move(u)};
}

Mat ConcreteRep::image(const AlgebraElement& b) const {
  if (b.parent != alg) throw StructuralError("ConcreteRep: element algebra mismatch");
  Mat m = Mat::Zero(dim, dim);
  for (int i = 0; i < alg.blocks(); ++i)
    for (int p = 0; p < alg.dim(i); ++p)
      for (int q = 0; q < alg.dim(i); ++q) {
        cxd c = b.blocks[static_cast<size_t>(i)](p, q);
        if (c != cxd(0.0)) m += c * unit(i, p, q);
      }
  return m;
}

std::vector<int> ConcreteRep::mult_vector(double tol) const {
  std::vector<int> out;
  for (int i = 0; i < alg.blocks(); ++i) {
    double tr = unit(i, 0, 0).trace().real();
    long long r = std::llround(tr);
    if (std::abs(tr - static_cast<double>(r)) > 1e-6 || r < 0)
      throw InconsistentActionError("ConcreteRep: non-integer multiplicity");
    (void)tol;
    out.push_back(static_cast<int>(r));
  }
  return out;
}

void ConcreteRep::validate(double tol) const {
  Mat sum = Mat::Zero(dim, dim);
  for (int i = 0; i < alg.blocks(); ++i)
    for (int p = 0; p < alg.dim(i); ++p) {
      sum += unit(i, p, p);
      for (int q = 0; q < alg.dim(i); ++q) {
        if ((unit(i, p, q).adjoint() - unit(i, q, p)).norm() > 1e3 * tol)
          throw InconsistentActionError("rep is not adjoint-compatible");
        for (int i2 = 0; i2 < alg.blocks(); ++i2)
          for (int r = 0; r < alg.dim(i2); ++r)
            for (int s = 0; s < alg.dim(i2); ++s) {
              Mat prod = unit(i, p, q) * unit(i2, r, s);
              if (i == i2 && q == r) prod -= unit(i, p, s);
              if (prod.norm() > 1e3 * tol)
                throw InconsistentActionError("rep violates the unit relations");
            }
      }
    }
  if ((sum - Mat::Identity(dim, dim)).norm() > 1e3 * tol)
    throw InconsistentActionError("rep is not unital");
}

ConcreteRep natural_rep(const RepresentedAlgebra& ra) {
  ConcreteRep rep{ra.alg, ra.dim_space(), {}};
  rep.images.resize(static_cast<size_t>(ra.alg.blocks()));
  for (int i = 0; i < ra.alg.blocks(); ++i)
    for (int p = 0; p < ra.alg.dim(i); ++p)
      for (int q = 0; q < ra.alg.dim(i); ++q)
        rep.images[static_cast<size_t>(i)].push_back(
            ra.embed(AlgebraElement::matrix_unit(ra.alg, i, p, q)));
  return rep;
}

ConcreteRep commutant_rep(const RepresentedAlgebra& ra) {
  MultiMatrixAlgebra calg = ra.commutant_algebra();
  ConcreteRep rep{calg, ra.dim_space(), {}};
  rep.images.resize(static_cast<size_t>(calg.blocks()));
  for (int i = 0; i < calg.blocks(); ++i)
    for (int p = 0; p < calg.dim(i); ++p)
      for (int q = 0; q < calg.dim(i); ++q)
        rep.images[static_cast<size_t>(i)].push_back(
            ra.embed_commutant(AlgebraElement::matrix_unit(calg, i, p, q)));
  return rep;
}

IntertwinerSpace intertwiners(const ConcreteRep& rho, const ConcreteRep& pi, double tol) {
  if (rho.alg != pi.alg) throw PreconditionError("intertwiners: different algebras");
  RepCanon crho = canonicalize_rep(
      rho.alg, [&](int i, int p, int q) { return rho.unit(i, p, q); }, rho.dim, tol);
  RepCanon cpi = canonicalize_rep(
      pi.alg, [&](int i, int p, int q) { return pi.unit(i, p, q); }, pi.dim, tol);

  IntertwinerSpace out;
  int off_r = 0, off_p = 0;
  for (int i = 0; i < rho.alg.blocks(); ++i) {
    int n = rho.alg.dim(i);
    int h = crho.mult[static_cast<size_t>(i)], g = cpi.mult[static_cast<size_t>(i)];
    out.dim_per_block.push_back(h * g);
    for (int a = 0; a < h; ++a)
      for (int b = 0; b < g; ++b) {
        Mat x = Mat::Zero(rho.dim, pi.dim);
        for (int p = 0; p < n; ++p) x(off_r + p * h + a, off_p + p * g + b) = 1.0;
        x /= std::sqrt(static_cast<double>(n));
        out.basis.push_back(crho.basis * x * cpi.basis.adjoint());
      }
    off_r += n * h;
    off_p += n * g;
  }
  double worst = 0.0;
  for (const auto& x : out.basis)
    for (int i = 0; i < rho.alg.blocks(); ++i)
      for (int p = 0; p < rho.alg.dim(i); ++p)
        for (int q = 0; q < rho.alg.dim(i); ++q)
          worst = std::max(worst, (rho.unit(i, p, q) * x - x * pi.unit(i, p, q)).norm());
  out.residual = worst;
  return out;
}

RepresentedCorrespondence represent(const Correspondence& corr, const RepresentedAlgebra& rep) {
  if (corr.left != rep.alg || corr.module.coeff != rep.alg)
    throw StructuralError("represent: correspondence and represented algebra disagree");
  return {corr, rep};
}

int RepresentedCorrespondence::dim_h() const {
  int d = 0;
  for (int j = 0; j < corr.module.blocks(); ++j)
    d += corr.module.mult(j) * rep.mult[static_cast<size_t>(j)];
  return d;
}

int RepresentedCorrespondence::h_offset(int j) const {
  int off = 0;
  for (int j2 = 0; j2 < j; ++j2) off += corr.module.mult(j2) * rep.mult[static_cast<size_t>(j2)];
  return off;
}

Mat RepresentedCorrespondence::eta(const ModuleElement& x) const {
  Mat m = Mat::Zero(dim_h(), rep.dim_space());
  for (int j = 0; j < corr.module.blocks(); ++j) {
    int g = rep.mult[static_cast<size_t>(j)];
    m.block(h_offset(j), rep.offset(j), corr.module.mult(j) * g, corr.module.dim(j) * g) =
        kron(x.blocks[static_cast<size_t>(j)], Mat::Identity(g, g));
  }
  if (rep.has_twist()) m = m * rep.twist.adjoint();
  return m;
}

Mat RepresentedCorrespondence::stinespring(const AlgebraElement& b) const {
  ModuleOperator op = corr.apply_left(b);
  Mat m = Mat::Zero(dim_h(), dim_h());
  for (int j = 0; j < corr.module.blocks(); ++j) {
    int g = rep.mult[static_cast<size_t>(j)];
    m.block(h_offset(j), h_offset(j), corr.module.mult(j) * g, corr.module.mult(j) * g) =
        kron(op.blocks[static_cast<size_t>(j)], Mat::Identity(g, g));
  }
  return m;
}

Mat RepresentedCorrespondence::lifting(const AlgebraElement& c) const {
  if (c.parent != rep.commutant_algebra())
    throw StructuralError("lifting: element not in the commutant");
  Mat m = Mat::Zero(dim_h(), dim_h());
  for (int j = 0; j < corr.module.blocks(); ++j) {
    int g = rep.mult[static_cast<size_t>(j)], mj = corr.module.mult(j);
    m.block(h_offset(j), h_offset(j), mj * g, mj * g) =
        kron(Mat::Identity(mj, mj), c.blocks[static_cast<size_t>(j)]);
  }
  return m;
}

ConcreteRep RepresentedCorrespondence::stinespring_rep() const {
  ConcreteRep rep_out{corr.left, dim_h(), {}};
  rep_out.images.resize(static_cast<size_t>(corr.left.blocks()));
  for (int i = 0; i < corr.left.blocks(); ++i)
    for (int p = 0; p < corr.left.dim(i); ++p)
      for (int q = 0; q < corr.left.dim(i); ++q)
        rep_out.images[static_cast<size_t>(i)].push_back(
            stinespring(AlgebraElement::matrix_unit(corr.left, i, p, q)));
  return rep_out;
}

namespace {

// Express a normal-form element as sum_a basis_a . c_a (coefficients in the
// coefficient algebra of the normalized module) and return the concrete
// operator sum_a ops_a embed(c_a).
Mat concrete_from_coords(const NormalizedModule& nm, const std::vector<Mat>& ops,
                         const std::function<Mat(const AlgebraElement&)>& embed_coeff,
                         const ModuleElement& y, double* residual) {
  const HilbertModule& mod = nm.module;
  int p = static_cast<int>(nm.coords.size());
  MultiMatrixAlgebra coeff = mod.coeff;
  std::vector<AlgebraElement> cs(static_cast<size_t>(p), AlgebraElement::zero(coeff));
  double res = 0.0;
  for (int l = 0; l < mod.blocks(); ++l) {
    int g = mod.dim(l), m = mod.mult(l);
    if (m == 0 || g == 0) continue;
    Mat s(m, p * g);
    for (int a = 0; a < p; ++a) s.middleCols(a * g, g) = nm.coords[static_cast<size_t>(a)].blocks[l];
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(s);
    for (int u = 0; u < g; ++u) {
      Vec col = cod.solve(y.blocks[static_cast<size_t>(l)].col(u));
      res = std::max(res, (s * col - y.blocks[static_cast<size_t>(l)].col(u)).norm());
      for (int a = 0; a < p; ++a)
        cs[static_cast<size_t>(a)].blocks[static_cast<size_t>(l)].col(u) = col.segment(a * g, g);
    }
  }
  Mat out;
  for (int a = 0; a < p; ++a) {
    Mat term = ops[static_cast<size_t>(a)] * embed_coeff(cs[static_cast<size_t>(a)]);
    out = (out.size() == 0) ? term : Mat(out + term);
  }
  if (residual) *residual = std::max(*residual, res);
  return out;
}

}  // namespace

CommutantResult commutant_correspondence(const RepresentedCorrespondence& rc, double tol) {
  ConcreteRep rho = rc.stinespring_rep();
  ConcreteRep pi = natural_rep(rc.rep);
  IntertwinerSpace iw = intertwiners(rho, pi, tol);
  double residual = iw.residual;

  MultiMatrixAlgebra bprime = rc.rep.commutant_algebra();
  int p = static_cast<int>(iw.basis.size());

  PresentedModule pm{bprime, {}};
  pm.gram.assign(static_cast<size_t>(p),
                 std::vector<AlgebraElement>(static_cast<size_t>(p), AlgebraElement::zero(bprime)));
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) {
      double r = 0.0;
      pm.gram[static_cast<size_t>(a)][static_cast<size_t>(b)] = rc.rep.extract_commutant(
          Mat(iw.basis[static_cast<size_t>(a)].adjoint() * iw.basis[static_cast<size_t>(b)]), &r);
      residual = std::max(residual, r);
    }
  NormalizedModule nm = normalize(pm, tol);

  // left action of B' through the commutant lifting, in the linear basis
  std::vector<std::vector<Mat>> action_coeff(static_cast<size_t>(bprime.blocks()));
  for (int i = 0; i < bprime.blocks(); ++i)
    for (int pp = 0; pp < bprime.dim(i); ++pp)
      for (int q = 0; q < bprime.dim(i); ++q) {
        Mat lift = rc.lifting(AlgebraElement::matrix_unit(bprime, i, pp, q));
        Mat coeff(p, p);
        for (int a = 0; a < p; ++a) {
          Mat img = lift * iw.basis[static_cast<size_t>(a)];
          for (int b = 0; b < p; ++b)
            coeff(b, a) = (iw.basis[static_cast<size_t>(b)].adjoint() * img).trace();
          Mat recon = Mat::Zero(img.rows(), img.cols());
          for (int b = 0; b < p; ++b) recon += coeff(b, a) * iw.basis[static_cast<size_t>(b)];
          residual = std::max(residual, (recon - img).norm());
        }
        action_coeff[static_cast<size_t>(i)].push_back(std::move(coeff));
      }

  Correspondence cp;
  cp.left = bprime;
  cp.module = nm.module;
  cp.table.resize(static_cast<size_t>(bprime.blocks()));
  for (int i = 0; i < bprime.blocks(); ++i)
    for (int idx = 0; idx < bprime.dim(i) * bprime.dim(i); ++idx) {
      const Mat& coeff = action_coeff[static_cast<size_t>(i)][static_cast<size_t>(idx)];
      ModuleOperator op = ModuleOperator::zero(nm.module);
      for (int l = 0; l < nm.module.blocks(); ++l) {
        int m = nm.module.mult(l), g = nm.module.dim(l);
        if (m == 0) continue;
        Mat s(m, p * g), r(m, p * g);
        for (int a = 0; a < p; ++a) {
          s.middleCols(a * g, g) = nm.coords[static_cast<size_t>(a)].blocks[l];
          Mat img = Mat::Zero(m, g);
          for (int b = 0; b < p; ++b)
            img += coeff(b, a) * nm.coords[static_cast<size_t>(b)].blocks[l];
          r.middleCols(a * g, g) = img;
        }
        Mat wadj = s.adjoint().completeOrthogonalDecomposition().solve(r.adjoint());
        op.blocks[l] = wadj.adjoint();
        residual = std::max(residual, (op.blocks[l] * s - r).norm());
      }
      cp.table[static_cast<size_t>(i)].push_back(std::move(op));
    }

  CommutantResult out;
  out.mu_prime = extract_multiplicity(cp, tol);
  IMat mu = extract_multiplicity(rc.corr, tol);
  if (out.mu_prime != IMat(mu.transpose()))
    throw InconsistentActionError("commutant: multiplicity is not the transpose");

  // concrete operator for each module unit of E'
  auto embed_coeff = [&](const AlgebraElement& c) { return rc.rep.embed_commutant(c); };
  for (const ModuleElement& u : module_units(nm.module))
    out.unit_ops.push_back(concrete_from_coords(nm, iw.basis, embed_coeff, u, &residual));

  out.corr_prime = std::move(cp);
  out.represented = RepresentedCorrespondence{out.corr_prime, rc.rep.commutant()};
  out.residual = residual;
  return out;
}

DoubleCommutantResult double_commutant_check(const RepresentedCorrespondence& rc, double tol) {
  CommutantResult first = commutant_correspondence(rc, tol);
  CommutantResult second = commutant_correspondence(first.represented, tol);
  DoubleCommutantResult out;
  auto wit = iso_witness(second.corr_prime, rc.corr, tol);
  if (!wit) return out;
  out.ok = true;
  out.residual = std::max({first.residual, second.residual, wit->residual});
  return out;
}

Theorem95EndoToRep theorem95_endo_to_rep(const Endomorphism& theta, const HilbertModule& f,
                                         const RepresentedAlgebra& rep, double tol) {
  if (!f.full()) throw PreconditionError("theorem95: F must be full");
  if (rep.has_twist()) throw PreconditionError("theorem95: twisted base representations unsupported");
  CorrespondenceOf co = correspondence_of(theta, f, tol);
  RepresentedCorrespondence rc = represent(co.e_theta, rep);
  Theorem95EndoToRep out;
  out.commutant = commutant_correspondence(rc, tol);
  double residual = std::max({out.commutant.residual, co.well_defined_residual,
                              co.unitary_residual, co.conjugation_residual});

  const HilbertModule& emod = co.e_theta.module;
  int k = rep.alg.blocks();
  // K = F (x) G with blocks C^{m_i(F)} (x) C^{g_i}
  std::vector<int> koff(static_cast<size_t>(k) + 1, 0);
  for (int i = 0; i < k; ++i)
    koff[static_cast<size_t>(i) + 1] =
        koff[static_cast<size_t>(i)] + f.mult(i) * rep.mult[static_cast<size_t>(i)];
  int dimk = koff[static_cast<size_t>(k)];

  // v(u^F o u^E) in F, tabulated over the column-0 units
  auto funits = module_units(f);
  std::vector<std::vector<std::vector<ModuleElement>>> vtab(
      static_cast<size_t>(k));  // [i][a][(j,r) flattened]
  auto apply_v = [&](const ModuleElement& x, const ModuleElement& u) {
    ModuleElement c = co.outer.apply(x, u);
    ModuleElement y = ModuleElement::zero(f);
    for (int l = 0; l < f.blocks(); ++l)
      y.blocks[static_cast<size_t>(l)] = co.w[static_cast<size_t>(l)] * c.blocks[static_cast<size_t>(l)];
    return y;
  };

  // eta'(x') per module unit of E'
  CorrRepData rp;
  rp.pi.alg = rep.commutant_algebra();
  rp.pi.dim = dimk;
  rp.pi.images.resize(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    int g = rep.mult[static_cast<size_t>(i)];
    for (int pp = 0; pp < g; ++pp)
      for (int q = 0; q < g; ++q) {
        Mat m = Mat::Zero(dimk, dimk);
        Mat e = Mat::Zero(g, g);
        e(pp, q) = 1.0;
        m.block(koff[static_cast<size_t>(i)], koff[static_cast<size_t>(i)], f.mult(i) * g,
                f.mult(i) * g) = kron(Mat::Identity(f.mult(i), f.mult(i)), e);
        rp.pi.images[static_cast<size_t>(i)].push_back(std::move(m));
      }
  }

  for (const Mat& xprime : out.commutant.unit_ops) {
    Mat op = Mat::Zero(dimk, dimk);
    for (int i = 0; i < k; ++i) {
      int g = rep.mult[static_cast<size_t>(i)];
      for (int a = 0; a < f.mult(i); ++a)
        for (int t = 0; t < g; ++t) {
          int col = koff[static_cast<size_t>(i)] + a * g + t;
          Vec gvec = Vec::Zero(rep.dim_space());
          gvec(rep.offset(i) + 0 * g + t) = 1.0;
          Vec h = xprime * gvec;
          for (int j = 0; j < emod.blocks(); ++j) {
            int gj = rep.mult[static_cast<size_t>(j)];
            for (int r = 0; r < emod.mult(j); ++r) {
              Vec w = h.segment(rc.h_offset(j) + r * gj, gj);
              if (w.norm() < 1e-15) continue;
              ModuleElement y = apply_v(ModuleElement::unit(f, i, a, 0),
                                        ModuleElement::unit(emod, j, r, 0));
              for (int b = 0; b < f.mult(j); ++b) {
                cxd amp = y.blocks[static_cast<size_t>(j)](b, 0);
                if (amp == cxd(0.0)) continue;
                for (int t2 = 0; t2 < gj; ++t2)
                  op(koff[static_cast<size_t>(j)] + b * gj + t2, col) += amp * w(t2);
              }
            }
          }
        }
    }
    rp.eta_units.push_back(std::move(op));
  }

  // covariance and nondegeneracy of (pi', eta')
  const HilbertModule& epmod = out.commutant.corr_prime.module;
  auto eunits = module_units(epmod);
  double cov = 0.0;
  for (size_t a = 0; a < eunits.size(); ++a)
    for (size_t b = 0; b < eunits.size(); ++b) {
      AlgebraElement ip = inner(eunits[a], eunits[b]);
      cov = std::max(cov, (rp.eta_units[a].adjoint() * rp.eta_units[b] - rp.pi.image(ip)).norm());
    }
  residual = std::max(residual, cov);
  {
    Mat span(dimk, static_cast<Eigen::Index>(rp.eta_units.size()) * dimk);
    for (size_t a = 0; a < rp.eta_units.size(); ++a)
      span.middleCols(static_cast<Eigen::Index>(a) * dimk, dimk) = rp.eta_units[a];
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(span);
    if (cod.rank() != dimk)
      throw Error("theorem95: constructed representation is degenerate");
  }
  out.rep_prime = std::move(rp);
  out.residual = residual;
  return out;
}

Theorem95RepToEndo theorem95_rep_to_endo(const RepresentedCorrespondence& rc,
                                         const CommutantResult& cm, const CorrRepData& rep_prime,
                                         double tol) {
  const MultiMatrixAlgebra& b = rc.rep.alg;
  MultiMatrixAlgebra bprime = rc.rep.commutant_algebra();
  if (rep_prime.pi.alg != bprime)
    throw PreconditionError("theorem95: representation is not over the commutant algebra");
  int dimk = rep_prime.pi.dim;

  // nondegeneracy of eta'
  {
    Mat span(dimk, static_cast<Eigen::Index>(rep_prime.eta_units.size()) * dimk);
    for (size_t a = 0; a < rep_prime.eta_units.size(); ++a)
      span.middleCols(static_cast<Eigen::Index>(a) * dimk, dimk) = rep_prime.eta_units[a];
    if (span.completeOrthogonalDecomposition().rank() != dimk)
      throw PreconditionError(
          "theorem95: degenerate representation (only an E-semigroup is induced)");
  }

  // F = intertwiners between pi' on K and the commutant acting on G
  ConcreteRep cpr = commutant_rep(rc.rep);
  IntertwinerSpace fs = intertwiners(rep_prime.pi, cpr, tol);
  double residual = fs.residual;
  int p = static_cast<int>(fs.basis.size());

  PresentedModule pm{b, {}};
  pm.gram.assign(static_cast<size_t>(p),
                 std::vector<AlgebraElement>(static_cast<size_t>(p), AlgebraElement::zero(b)));
  for (int a = 0; a < p; ++a)
    for (int c = 0; c < p; ++c) {
      double r = 0.0;
      pm.gram[static_cast<size_t>(a)][static_cast<size_t>(c)] = rc.rep.extract(
          Mat(fs.basis[static_cast<size_t>(a)].adjoint() * fs.basis[static_cast<size_t>(c)]), &r);
      residual = std::max(residual, r);
    }
  NormalizedModule nm = normalize(pm, tol);
  HilbertModule fmod = nm.module;
  if (!fmod.full()) throw Error("theorem95: intertwiner module is not full");

  auto embed_coeff = [&](const AlgebraElement& c) { return rc.rep.embed(c); };
  std::vector<Mat> f_unit_ops;
  for (const ModuleElement& u : module_units(fmod))
    f_unit_ops.push_back(concrete_from_coords(nm, fs.basis, embed_coeff, u, &residual));

  // F o E and the unitary w extracted from eta'
  TensorData td = tensor_module(fmod, rc.corr, tol);
  if (td.result.mults != fmod.mults)
    throw Error("theorem95: F o E does not match F (representation not nondegenerate)");

  // expansion machinery: h in H as sum of E'-unit ops applied to G-vectors
  int dimg = rc.rep.dim_space(), dimh = rc.dim_h();
  int ep = static_cast<int>(cm.unit_ops.size());
  Mat stack(dimh, static_cast<Eigen::Index>(ep) * dimg);
  for (int a = 0; a < ep; ++a)
    stack.middleCols(static_cast<Eigen::Index>(a) * dimg, dimg) = cm.unit_ops[static_cast<size_t>(a)];
  Eigen::CompleteOrthogonalDecomposition<Mat> hexp(stack);

  auto funits = module_units(fmod);
  auto eunits = module_units(rc.corr.module);
  // T(y o u o g) = sum_a eta'(x'_a)(y g_a) where u o g = sum_a x'_a g_a
  auto tmap = [&](const ModuleElement& y, const ModuleElement& u, const Vec& g) {
    Vec h = rc.eta(u) * g;
    Vec sol = hexp.solve(h);
    residual = std::max(residual, (stack * sol - h).norm());
    Vec out = Vec::Zero(dimk);
    Mat yconc = concrete_from_coords(nm, fs.basis, embed_coeff, y, &residual);
    for (int a = 0; a < ep; ++a)
      out += rep_prime.eta_units[static_cast<size_t>(a)] *
             (yconc * sol.segment(static_cast<Eigen::Index>(a) * dimg, dimg));
    return out;
  };

  // unit expansion of (F o E) units into spanning products
  const HilbertModule& femod = td.result;
  auto feunits = module_units(femod);
  int fedim = femod.total_dim();
  Mat span(fedim, static_cast<Eigen::Index>(funits.size() * eunits.size()));
  auto vec_elem = [](const ModuleElement& x) {
    Vec v(x.parent.total_dim());
    int off = 0;
    for (const auto& blk : x.blocks) {
      for (int c = 0; c < blk.cols(); ++c) v.segment(off + c * blk.rows(), blk.rows()) = blk.col(c);
      off += static_cast<int>(blk.size());
    }
    return v;
  };
  for (size_t y = 0; y < funits.size(); ++y)
    for (size_t u = 0; u < eunits.size(); ++u)
      span.col(static_cast<Eigen::Index>(y * eunits.size() + u)) =
          vec_elem(td.apply(funits[y], eunits[u]));
  Eigen::CompleteOrthogonalDecomposition<Mat> fe_exp(span);

  std::vector<int> koff(static_cast<size_t>(b.blocks()) + 1, 0);
  std::vector<int> fmult = rep_prime.pi.mult_vector(tol);
  if (fmult != fmod.mults) throw Error("theorem95: pi' multiplicities disagree with F");
  for (int i = 0; i < b.blocks(); ++i)
    koff[static_cast<size_t>(i) + 1] =
        koff[static_cast<size_t>(i)] + fmod.mult(i) * rc.rep.mult[static_cast<size_t>(i)];

  std::vector<Mat> w(static_cast<size_t>(b.blocks()));
  for (int l = 0; l < b.blocks(); ++l) {
    int ml = femod.mult(l), fl = fmod.mult(l), g = rc.rep.mult[static_cast<size_t>(l)];
    Mat wl = Mat::Zero(fl, ml);
    for (int kk = 0; kk < ml; ++kk) {
      ModuleElement unit = ModuleElement::unit(femod, l, kk, 0);
      Vec c = fe_exp.solve(vec_elem(unit));
      residual = std::max(residual, (span * c - vec_elem(unit)).norm());
      for (int t = 0; t < g; ++t) {
        Vec gvec = Vec::Zero(dimg);
        gvec(rc.rep.offset(l) + 0 * g + t) = 1.0;
        Vec img = Vec::Zero(dimk);
        for (size_t y = 0; y < funits.size(); ++y)
          for (size_t u = 0; u < eunits.size(); ++u) {
            cxd cf = c(static_cast<Eigen::Index>(y * eunits.size() + u));
            if (std::abs(cf) < 1e-14) continue;
            img += cf * tmap(funits[y], eunits[u], gvec);
          }
        // accumulate the (b,kk) entries via the K-basis at block l
        for (int bb = 0; bb < fl; ++bb)
          wl(bb, kk) += img(koff[static_cast<size_t>(l)] + bb * g + t) / static_cast<double>(g);
      }
    }
    w[static_cast<size_t>(l)] = std::move(wl);
    residual = std::max(residual, (w[static_cast<size_t>(l)] *
                                       w[static_cast<size_t>(l)].adjoint() -
                                   Mat::Identity(fl, fl))
                                      .norm());
  }

  MultiMatrixAlgebra d(fmod.mults);
  std::vector<std::vector<AlgebraElement>> images(static_cast<size_t>(d.blocks()));
  for (int i = 0; i < d.blocks(); ++i)
    for (int pp = 0; pp < d.dim(i); ++pp)
      for (int q = 0; q < d.dim(i); ++q) {
        ModuleOperator gen = ModuleOperator::zero(fmod);
        gen.blocks[i](pp, q) = 1.0;
        ModuleOperator amp = td.left_operator(gen);
        AlgebraElement img = AlgebraElement::zero(d);
        for (int l = 0; l < d.blocks(); ++l)
          img.blocks[static_cast<size_t>(l)] =
              w[static_cast<size_t>(l)] * amp.blocks[static_cast<size_t>(l)] *
              w[static_cast<size_t>(l)].adjoint();
        images[static_cast<size_t>(i)].push_back(std::move(img));
      }
  Endomorphism theta = endomorphism_from_images(d, std::move(images), tol);

  CorrespondenceOf back = correspondence_of(theta, fmod, tol);
  auto wit = iso_witness(back.e_theta, rc.corr, tol);
  if (!wit) throw Error("theorem95: reconstructed endomorphism has the wrong correspondence");
  residual = std::max({residual, wit->residual, back.conjugation_residual});
  return {std::move(fmod), std::move(theta), residual};
}

AmplificationInduction amplification_induction(const RepresentedAlgebra& ra,
                                               const ConcreteRep& pi, double tol) {
  if (pi.alg != ra.alg) throw PreconditionError("amplification_induction: algebra mismatch");
  ConcreteRep nat = natural_rep(ra);
  IntertwinerSpace iw = intertwiners(pi, nat, tol);
  double residual = iw.residual;
  MultiMatrixAlgebra bprime = ra.commutant_algebra();
  int p = static_cast<int>(iw.basis.size());

  PresentedModule pm{bprime, {}};
  pm.gram.assign(static_cast<size_t>(p),
                 std::vector<AlgebraElement>(static_cast<size_t>(p), AlgebraElement::zero(bprime)));
  for (int a = 0; a < p; ++a)
    for (int c = 0; c < p; ++c) {
      double r = 0.0;
      pm.gram[static_cast<size_t>(a)][static_cast<size_t>(c)] = ra.extract_commutant(
          Mat(iw.basis[static_cast<size_t>(a)].adjoint() * iw.basis[static_cast<size_t>(c)]), &r);
      residual = std::max(residual, r);
    }
  PresentedQuasiONB qb = quasi_onb(pm, tol);

  AmplificationInduction out;
  for (size_t t = 0; t < qb.elements.size(); ++t) {
    Mat e = Mat::Zero(pi.dim, ra.dim_space());
    for (int a = 0; a < p; ++a)
      e += iw.basis[static_cast<size_t>(a)] *
           ra.embed_commutant(qb.elements[t].coeffs[static_cast<size_t>(a)]);
    out.onb_ops.push_back(std::move(e));
    out.projections.push_back(qb.projections[t]);
  }

  int copies = static_cast<int>(out.onb_ops.size());
  Mat v(copies * ra.dim_space(), pi.dim);
  for (int t = 0; t < copies; ++t)
    v.middleRows(t * ra.dim_space(), ra.dim_space()) = out.onb_ops[static_cast<size_t>(t)].adjoint();
  out.isometry = v;

  // quasi-onb invariants in concrete form
  Mat sum = Mat::Zero(pi.dim, pi.dim);
  for (int t = 0; t < copies; ++t) {
    sum += out.onb_ops[static_cast<size_t>(t)] * out.onb_ops[static_cast<size_t>(t)].adjoint();
    for (int u = 0; u < copies; ++u) {
      Mat ip = out.onb_ops[static_cast<size_t>(u)].adjoint() * out.onb_ops[static_cast<size_t>(t)];
      if (t == u) ip -= ra.embed_commutant(out.projections[static_cast<size_t>(t)]);
      residual = std::max(residual, ip.norm());
    }
  }
  residual = std::max(residual, (sum - Mat::Identity(pi.dim, pi.dim)).norm());

  // pi is the compression of the amplification
  for (int i = 0; i < ra.alg.blocks(); ++i)
    for (int pp = 0; pp < ra.alg.dim(i); ++pp)
      for (int q = 0; q < ra.alg.dim(i); ++q) {
        AlgebraElement unit = AlgebraElement::matrix_unit(ra.alg, i, pp, q);
        Mat amp = Mat::Zero(v.rows(), v.rows());
        for (int t = 0; t < copies; ++t)
          amp.block(t * ra.dim_space(), t * ra.dim_space(), ra.dim_space(), ra.dim_space()) =
              nat.unit(i, pp, q);
        residual = std::max(residual, (v * pi.unit(i, pp, q) - amp * v).norm());
        residual = std::max(residual, (v.adjoint() * amp * v - pi.unit(i, pp, q)).norm());
      }
  out.residual = residual;
  return out;
}

}  // namespace ckit
