#include "ckit/hilbmod.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <random>

namespace ckit {

namespace {

void require_same_parent(const ModuleElement& a, const ModuleElement& b, const char* op) {
  if (a.parent != b.parent)
    throw StructuralError(std::string(op) + ": elements live in different modules");
}

}  // namespace

HilbertModule::HilbertModule(MultiMatrixAlgebra alg, std::vector<int> m)
    : coeff(std::move(alg)), mults(std::move(m)) {
  if (static_cast<int>(mults.size()) != coeff.blocks())
    throw StructuralError("module multiplicity vector has wrong length");
  for (int v : mults)
    if (v < 0) throw StructuralError("module multiplicities must be >= 0");
}

int HilbertModule::total_dim() const {
  int t = 0;
  for (int i = 0; i < blocks(); ++i) t += mult(i) * dim(i);
  return t;
}

bool HilbertModule::full() const {
  return std::all_of(mults.begin(), mults.end(), [](int m) { return m >= 1; });
}

ModuleElement::ModuleElement(HilbertModule mod, std::vector<Mat> blks)
    : parent(std::move(mod)), blocks(std::move(blks)) {
  if (static_cast<int>(blocks.size()) != parent.blocks())
    throw StructuralError("module element has wrong number of blocks");
  for (int i = 0; i < parent.blocks(); ++i)
    if (blocks[i].rows() != parent.mult(i) || blocks[i].cols() != parent.dim(i))
      throw StructuralError("module element block " + std::to_string(i) + " has wrong shape");
}

ModuleElement ModuleElement::zero(const HilbertModule& mod) {
  std::vector<Mat> b;
  b.reserve(mod.blocks());
  for (int i = 0; i < mod.blocks(); ++i) b.push_back(Mat::Zero(mod.mult(i), mod.dim(i)));
  return {mod, std::move(b)};
}

ModuleElement ModuleElement::unit(const HilbertModule& mod, int block, int r, int s) {
  ModuleElement x = zero(mod);
  x.blocks[block](r, s) = 1.0;
  return x;
}

double ModuleElement::norm() const {
  double n2 = inner(*this, *this).norm();
  return n2 > 0 ? std::sqrt(n2) : 0.0;
}

ModuleElement& ModuleElement::operator+=(const ModuleElement& o) {
  require_same_parent(*this, o, "add");
  for (size_t i = 0; i < blocks.size(); ++i) blocks[i] += o.blocks[i];
  return *this;
}

ModuleElement& ModuleElement::operator-=(const ModuleElement& o) {
  require_same_parent(*this, o, "sub");
  for (size_t i = 0; i < blocks.size(); ++i) blocks[i] -= o.blocks[i];
  return *this;
}

ModuleElement& ModuleElement::operator*=(cxd s) {
  for (auto& b : blocks) b *= s;
  return *this;
}

ModuleElement operator+(ModuleElement a, const ModuleElement& b) { return a += b; }
ModuleElement operator-(ModuleElement a, const ModuleElement& b) { return a -= b; }
ModuleElement operator*(cxd s, ModuleElement a) { return a *= s; }

ModuleElement rmul(const ModuleElement& x, const AlgebraElement& b) {
  if (x.parent.coeff != b.parent)
    throw StructuralError("rmul: coefficient algebra mismatch");
  ModuleElement r = x;
  for (size_t i = 0; i < r.blocks.size(); ++i) r.blocks[i] = x.blocks[i] * b.blocks[i];
  return r;
}

AlgebraElement inner(const ModuleElement& x, const ModuleElement& y) {
  require_same_parent(x, y, "inner");
  AlgebraElement r = AlgebraElement::zero(x.parent.coeff);
  for (size_t i = 0; i < x.blocks.size(); ++i) r.blocks[i] = x.blocks[i].adjoint() * y.blocks[i];
  return r;
}

ModuleOperator::ModuleOperator(HilbertModule mod, std::vector<Mat> blks)
    : parent(std::move(mod)), blocks(std::move(blks)) {
  if (static_cast<int>(blocks.size()) != parent.blocks())
    throw StructuralError("module operator has wrong number of blocks");
  for (int i = 0; i < parent.blocks(); ++i)
    if (blocks[i].rows() != parent.mult(i) || blocks[i].cols() != parent.mult(i))
      throw StructuralError("module operator block " + std::to_string(i) + " has wrong shape");
}

ModuleOperator ModuleOperator::zero(const HilbertModule& mod) {
  std::vector<Mat> b;
  for (int i = 0; i < mod.blocks(); ++i) b.push_back(Mat::Zero(mod.mult(i), mod.mult(i)));
  return {mod, std::move(b)};
}

ModuleOperator ModuleOperator::identity(const HilbertModule& mod) {
  std::vector<Mat> b;
  for (int i = 0; i < mod.blocks(); ++i) b.push_back(Mat::Identity(mod.mult(i), mod.mult(i)));
  return {mod, std::move(b)};
}

ModuleOperator ModuleOperator::adjoint() const {
  ModuleOperator r = *this;
  for (auto& b : r.blocks) b = b.adjoint().eval();
  return r;
}

double ModuleOperator::norm() const {
  double m = 0.0;
  for (const auto& b : blocks) {
    if (b.size() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(b.adjoint() * b));
    double top = es.eigenvalues().size() ? es.eigenvalues().maxCoeff() : 0.0;
    m = std::max(m, top > 0 ? std::sqrt(top) : 0.0);
  }
  return m;
}

ModuleElement ModuleOperator::apply(const ModuleElement& x) const {
  if (x.parent != parent) throw StructuralError("operator/element module mismatch");
  ModuleElement r = x;
  for (size_t i = 0; i < r.blocks.size(); ++i) r.blocks[i] = blocks[i] * x.blocks[i];
  return r;
}

ModuleOperator& ModuleOperator::operator+=(const ModuleOperator& o) {
  for (size_t i = 0; i < blocks.size(); ++i) blocks[i] += o.blocks[i];
  return *this;
}

ModuleOperator& ModuleOperator::operator-=(const ModuleOperator& o) {
  for (size_t i = 0; i < blocks.size(); ++i) blocks[i] -= o.blocks[i];
  return *this;
}

ModuleOperator& ModuleOperator::operator*=(cxd s) {
  for (auto& b : blocks) b *= s;
  return *this;
}

ModuleOperator operator+(ModuleOperator a, const ModuleOperator& b) { return a += b; }
ModuleOperator operator-(ModuleOperator a, const ModuleOperator& b) { return a -= b; }
ModuleOperator operator*(cxd s, ModuleOperator a) { return a *= s; }

ModuleOperator compose(const ModuleOperator& a, const ModuleOperator& b) {
  if (a.parent != b.parent) throw StructuralError("compose: module mismatch");
  ModuleOperator r = a;
  for (size_t i = 0; i < r.blocks.size(); ++i) r.blocks[i] = a.blocks[i] * b.blocks[i];
  return r;
}

ModuleOperator rank_one(const ModuleElement& x, const ModuleElement& y) {
  require_same_parent(x, y, "rank_one");
  ModuleOperator r = ModuleOperator::zero(x.parent);
  for (size_t i = 0; i < r.blocks.size(); ++i) r.blocks[i] = x.blocks[i] * y.blocks[i].adjoint();
  return r;
}

void PresentedModule::check_shape() const {
  size_t p = gram.size();
  for (const auto& row : gram)
    if (row.size() != p) throw StructuralError("presented module gram is not square");
  for (size_t a = 0; a < p; ++a)
    for (size_t b = 0; b < p; ++b)
      if (gram[a][b].parent != coeff) throw StructuralError("gram entry has wrong algebra");
}

AlgebraElement presented_inner(const PresentedModule& m, const PresentedElement& x,
                               const PresentedElement& y) {
  AlgebraElement r = AlgebraElement::zero(m.coeff);
  int p = m.generators();
  for (int a = 0; a < p; ++a) {
    if (x.coeffs[a].norm() == 0.0) continue;
    for (int b = 0; b < p; ++b)
      r += mul(mul(x.coeffs[a].adjoint(), m.gram[a][b]), y.coeffs[b]);
  }
  return r;
}

HilbertModule dual(const HilbertModule& mod) {
  if (!mod.full())
    throw PreconditionError("dual: module has a zero block; operator algebra degenerates");
  std::vector<int> dims(mod.mults.begin(), mod.mults.end());
  std::vector<int> mults(mod.coeff.block_dims.begin(), mod.coeff.block_dims.end());
  return {MultiMatrixAlgebra(dims), mults};
}

ModuleElement dual_element(const HilbertModule& dual_mod, const ModuleElement& x) {
  std::vector<Mat> b;
  b.reserve(x.blocks.size());
  for (const auto& m : x.blocks) b.push_back(m.adjoint());
  return {dual_mod, std::move(b)};
}

HilbertModule direct_sum(const HilbertModule& a, const HilbertModule& b) {
  if (a.coeff != b.coeff) throw StructuralError("direct_sum: coefficient algebras differ");
  std::vector<int> m(a.mults);
  for (size_t i = 0; i < m.size(); ++i) m[i] += b.mults[i];
  return {a.coeff, m};
}

HilbertModule module_power(const HilbertModule& mod, int n) {
  if (n < 0) throw PreconditionError("module_power: n must be >= 0");
  std::vector<int> m(mod.mults);
  for (auto& v : m) v *= n;
  return {mod.coeff, m};
}

UnitVectorDecision unit_vector_exists(const HilbertModule& mod) {
  for (int i = 0; i < mod.blocks(); ++i)
    if (mod.mult(i) < mod.dim(i)) return {false, std::nullopt, i};
  ModuleElement xi = ModuleElement::zero(mod);
  for (int i = 0; i < mod.blocks(); ++i)
    xi.blocks[i].topRows(mod.dim(i)) = Mat::Identity(mod.dim(i), mod.dim(i));
  return {true, UnitVector{xi}, -1};
}

Lemma32Result lemma32_unit_vector(const HilbertModule& mod, double tol) {
  if (!mod.full()) throw PreconditionError("lemma32_unit_vector: module is not full");
  int copies = 1;
  for (int i = 0; i < mod.blocks(); ++i)
    copies = std::max(copies, (mod.dim(i) + mod.mult(i) - 1) / mod.mult(i));

  HilbertModule power = module_power(mod, copies);

  // Generic recipe: pick spanning x_j, solve sum_j <x_j, y_j> = 1 exactly
  // (per block the column systems decouple), then normalize X.
  std::mt19937_64 rng(0x5eed5eedULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<ModuleElement> xs;
  for (int j = 0; j < copies; ++j) {
    ModuleElement x = ModuleElement::zero(mod);
    for (auto& blk : x.blocks)
      for (int r = 0; r < blk.rows(); ++r)
        for (int c = 0; c < blk.cols(); ++c) blk(r, c) = cxd(gauss(rng), gauss(rng));
    xs.push_back(x);
  }

  ModuleElement X = ModuleElement::zero(power);
  ModuleElement Y = ModuleElement::zero(power);
  for (int i = 0; i < mod.blocks(); ++i) {
    int m = mod.mult(i), n = mod.dim(i);
    Mat A(n, copies * m);
    for (int j = 0; j < copies; ++j) A.middleCols(j * m, m) = xs[j].blocks[i].adjoint();
    Mat W = A.completeOrthogonalDecomposition().solve(Mat::Identity(n, n));
    for (int j = 0; j < copies; ++j) {
      X.blocks[i].middleRows(j * m, m) = xs[j].blocks[i];
      Y.blocks[i].middleRows(j * m, m) = W.middleRows(j * m, m);
    }
  }

  AlgebraElement xy = inner(X, Y);
  double solve_residual = (xy - AlgebraElement::identity(mod.coeff)).norm();
  if (solve_residual > 1e-6)
    throw Error("lemma32_unit_vector: could not solve sum <x_j,y_j> = 1 (residual " +
                std::to_string(solve_residual) + ")");

  double ynorm2 = inner(Y, Y).norm();
  AlgebraElement bound = mul(xy, xy.adjoint());
  double lower = min_eigenvalue(bound) / ynorm2;
  AlgebraElement gram = inner(X, X);
  if (min_eigenvalue(gram) < 0.5 * lower)
    throw Error("lemma32_unit_vector: invertibility certificate failed");

  ModuleElement xi = rmul(X, invert(psd_sqrt(gram, tol), tol));
  return {copies, power, UnitVector{xi}, lower};
}

PresentedQuasiONB quasi_onb(const PresentedModule& m, double tol) {
  m.check_shape();
  int p = m.generators();
  std::vector<PresentedElement> gens(p);
  for (int a = 0; a < p; ++a) {
    gens[a].coeffs.assign(p, AlgebraElement::zero(m.coeff));
    gens[a].coeffs[a] = AlgebraElement::identity(m.coeff);
  }

  PresentedQuasiONB out;
  int guard = 0, max_iter = p + m.coeff.total_dim() * p + 4;
  while (!gens.empty() && guard++ < max_iter) {
    // pick the remaining generator of maximal norm; break ties by the trace
    // of <x,x> so that broad generators win over narrow ones
    int best = -1;
    double best_norm = tol, best_trace = -1.0;
    std::vector<AlgebraElement> grams(gens.size(), AlgebraElement::zero(m.coeff));
    for (size_t a = 0; a < gens.size(); ++a) {
      grams[a] = presented_inner(m, gens[a], gens[a]);
      double nrm = grams[a].norm();
      double tr = 0.0;
      for (const auto& blk : grams[a].blocks) tr += blk.trace().real();
      if (nrm > best_norm + 1e-12 ||
          (nrm > best_norm - 1e-12 && tr > best_trace + 1e-12)) {
        best = static_cast<int>(a);
        best_norm = nrm;
        best_trace = tr;
      }
    }
    if (best < 0) break;  // every residual is below tol

    AlgebraElement q = grams[best];
    AlgebraElement proj = support_projection(q, tol);
    AlgebraElement s = pinv_sqrt(q, tol);
    PresentedElement e = gens[best];
    for (auto& c : e.coeffs) c = mul(c, s);
    out.elements.push_back(e);
    out.projections.push_back(proj);

    gens.erase(gens.begin() + best);
    for (auto& g : gens) {
      AlgebraElement ip = presented_inner(m, e, g);
      for (int a = 0; a < p; ++a) g.coeffs[a] -= mul(e.coeffs[a], ip);
    }
  }
  return out;
}

QuasiONB quasi_onb(const HilbertModule& mod, double tol) {
  // present the module by a broad partial-identity per block plus all units
  std::vector<ModuleElement> gens;
  for (int i = 0; i < mod.blocks(); ++i) {
    int m = mod.mult(i), n = mod.dim(i);
    if (m == 0) continue;
    ModuleElement pid = ModuleElement::zero(mod);
    int d = std::min(m, n);
    pid.blocks[i].topLeftCorner(d, d) = Mat::Identity(d, d);
    gens.push_back(pid);
    for (int r = 0; r < m; ++r)
      for (int s = 0; s < n; ++s) gens.push_back(ModuleElement::unit(mod, i, r, s));
  }
  PresentedModule pm{mod.coeff, {}};
  int p = static_cast<int>(gens.size());
  pm.gram.assign(p, std::vector<AlgebraElement>(p, AlgebraElement::zero(mod.coeff)));
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) pm.gram[a][b] = inner(gens[a], gens[b]);

  PresentedQuasiONB pb = quasi_onb(pm, tol);
  QuasiONB out;
  for (size_t t = 0; t < pb.elements.size(); ++t) {
    ModuleElement e = ModuleElement::zero(mod);
    for (int a = 0; a < p; ++a) e += rmul(gens[a], pb.elements[t].coeffs[a]);
    out.pairs.push_back({e, pb.projections[t]});
  }
  return out;
}

double quasi_onb_defect(const QuasiONB& b, const HilbertModule& mod) {
  double worst = 0.0;
  ModuleOperator sum = ModuleOperator::zero(mod);
  for (size_t i = 0; i < b.pairs.size(); ++i) {
    sum += rank_one(b.pairs[i].e, b.pairs[i].e);
    for (size_t j = 0; j < b.pairs.size(); ++j) {
      AlgebraElement ip = inner(b.pairs[i].e, b.pairs[j].e);
      if (i == j) ip -= b.pairs[j].p;
      worst = std::max(worst, ip.norm());
    }
  }
  worst = std::max(worst, (sum - ModuleOperator::identity(mod)).norm());
  return worst;
}

NormalizedModule normalize(const PresentedModule& m, double tol) {
  m.check_shape();
  int p = m.generators();
  int k = m.coeff.blocks();

  // Hermiticity of the gram
  double scale = 1.0;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) scale = std::max(scale, m.gram[a][b].norm());
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      if ((m.gram[a][b].adjoint() - m.gram[b][a]).norm() > 1e3 * tol * scale)
        throw StructuralError("normalize: gram is not Hermitian");

  std::vector<int> mults(k, 0);
  std::vector<Mat> coord_blocks(k);  // rank x (p*n_i) per block
  for (int i = 0; i < k; ++i) {
    int n = m.coeff.dim(i);
    Mat G(p * n, p * n);
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b)
        G.block(a * n, b * n, n, n) = m.gram[a][b].blocks[i];
    G = 0.5 * (G + G.adjoint()).eval();
    if (p == 0) {
      coord_blocks[i] = Mat::Zero(0, 0);
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(G);
    Eigen::VectorXd ev = es.eigenvalues();
    double top = std::max(ev.size() ? ev.maxCoeff() : 0.0, 0.0);
    if (ev.size() && ev.minCoeff() < -std::max(tol * std::max(top, 1.0), tol))
      throw NotPositiveError("normalize: gram is not positive semidefinite on block " +
                                 std::to_string(i),
                             i, ev.minCoeff());
    double thr = tol * std::max(top, 1.0);
    int rank = 0;
    for (int j = 0; j < ev.size(); ++j)
      if (ev(j) > thr) ++rank;
    mults[i] = rank;
    Mat C(rank, p * n);
    int row = 0;
    for (int j = 0; j < ev.size(); ++j)
      if (ev(j) > thr) C.row(row++) = std::sqrt(ev(j)) * es.eigenvectors().col(j).adjoint();
    coord_blocks[i] = std::move(C);
  }

  HilbertModule module(m.coeff, mults);
  NormalizedModule out{module, {}};
  out.coords.reserve(p);
  for (int a = 0; a < p; ++a) {
    ModuleElement x = ModuleElement::zero(module);
    for (int i = 0; i < k; ++i) {
      int n = m.coeff.dim(i);
      for (int s = 0; s < n; ++s) x.blocks[i].col(s) = coord_blocks[i].col(a * n + s);
    }
    out.coords.push_back(std::move(x));
  }
  return out;
}

}  // namespace ckit
