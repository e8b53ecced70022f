#include "ckit/pslice.hpp"

#include <Eigen/QR>
#include <random>

namespace ckit {

std::vector<ModuleElement> module_units(const HilbertModule& mod) {
  std::vector<ModuleElement> out;
  for (int j = 0; j < mod.blocks(); ++j)
    for (int r = 0; r < mod.mult(j); ++r)
      for (int s = 0; s < mod.dim(j); ++s) out.push_back(ModuleElement::unit(mod, j, r, s));
  return out;
}

namespace {

Vec vec_element(const ModuleElement& x) {
  Vec v(x.parent.total_dim());
  int off = 0;
  for (const auto& b : x.blocks) {
    for (int c = 0; c < b.cols(); ++c) v.segment(off + c * b.rows(), b.rows()) = b.col(c);
    off += static_cast<int>(b.size());
  }
  return v;
}

}  // namespace

ModuleElement ProductSystemSlice::one() const {
  const HilbertModule& m0 = level_module(0);
  ModuleElement e = ModuleElement::zero(m0);
  for (int j = 0; j < m0.blocks(); ++j) e.blocks[j] = Mat::Identity(m0.mult(j), m0.dim(j));
  return e;
}

ModuleElement ProductSystemSlice::mult(int s, int t, const ModuleElement& xs,
                                       const ModuleElement& yt) const {
  if (s < 0 || t < 0 || s + t > depth) throw PreconditionError("slice mult out of range");
  if (trivial_base) {
    ModuleElement out = ModuleElement::zero(level_module(s + t));
    for (size_t j = 0; j < out.blocks.size(); ++j) out.blocks[j] = xs.blocks[j] * yt.blocks[j];
    return out;
  }
  if (t == 0) {
    // y is a coefficient: act on the right
    AlgebraElement b(base.module.coeff, yt.blocks);
    return rmul(xs, b);
  }
  if (s == 0) {
    AlgebraElement b(base.module.coeff, xs.blocks);
    return levels[static_cast<size_t>(t)].left_mul(b, yt);
  }
  if (t == 1) return step[static_cast<size_t>(s)].apply(xs, yt);
  // expand y_t into products of level-(t-1) and level-1 units
  std::vector<ModuleElement> cache;  // x o u_beta at level s+t-1, lazily filled
  const auto units_tm1 = module_units(level_module(t - 1));
  const auto units_1 = module_units(level_module(1));
  cache.assign(units_tm1.size(), ModuleElement());
  std::vector<bool> have(units_tm1.size(), false);
  ModuleElement out = ModuleElement::zero(level_module(s + t));
  const auto& units_t = module_units(level_module(t));
  for (size_t a = 0; a < units_t.size(); ++a) {
    // coefficient of unit a inside y_t
    cxd coeff = 0.0;
    {
      int idx = static_cast<int>(a);
      int off = 0;
      for (int j = 0; j < level_module(t).blocks(); ++j) {
        int cnt = level_module(t).mult(j) * level_module(t).dim(j);
        if (idx < off + cnt) {
          int local = idx - off;
          int r = local / level_module(t).dim(j), c = local % level_module(t).dim(j);
          coeff = yt.blocks[j](r, c);
          break;
        }
        off += cnt;
      }
    }
    if (coeff == cxd(0.0)) continue;
    for (const auto& [beta, gamma, d] :
         unit_expansion[static_cast<size_t>(t)][a].terms) {
      if (!have[static_cast<size_t>(beta)]) {
        cache[static_cast<size_t>(beta)] = mult(s, t - 1, xs, units_tm1[static_cast<size_t>(beta)]);
        have[static_cast<size_t>(beta)] = true;
      }
      out += (coeff * d) * mult(s + t - 1, 1, cache[static_cast<size_t>(beta)],
                                units_1[static_cast<size_t>(gamma)]);
    }
  }
  return out;
}

double ProductSystemSlice::associativity_defect(int max_checks) const {
  double worst = 0.0;
  std::mt19937_64 rng(0x51edULL);
  int done = 0;
  for (int r = 0; r <= depth && done < max_checks; ++r)
    for (int s = 0; s <= depth - r && done < max_checks; ++s)
      for (int t = 0; t <= depth - r - s && done < max_checks; ++t) {
        if (r + s + t == 0) continue;
        auto pick = [&](int lvl) {
          auto units = module_units(level_module(lvl));
          if (units.empty()) return ModuleElement::zero(level_module(lvl));
          return units[rng() % units.size()];
        };
        ModuleElement x = pick(r), y = pick(s), z = pick(t);
        ModuleElement lhs = mult(r + s, t, mult(r, s, x, y), z);
        ModuleElement rhs = mult(r, s + t, x, mult(s, t, y, z));
        worst = std::max(worst, (lhs - rhs).norm());
        ++done;
      }
  return worst;
}

ProductSystemSlice build_slice(const Correspondence& e, int depth, double tol) {
  if (depth < 0) throw PreconditionError("build_slice: depth must be >= 0");
  if (e.left != e.module.coeff)
    throw PreconditionError("build_slice: base must be a correspondence over one algebra");
  ProductSystemSlice s;
  s.base = e;
  s.depth = depth;
  s.levels.push_back(trivial_correspondence(e.left));
  s.trivial_base = corr_is_trivial(e, tol);
  if (s.trivial_base) {
    for (int t = 1; t <= depth; ++t) s.levels.push_back(e);
    return s;
  }
  s.step.resize(1);  // index 0 unused: E_0 o E is the canonical left action
  s.unit_expansion.resize(static_cast<size_t>(std::max(depth + 1, 2)));
  if (depth >= 1) s.levels.push_back(e);
  for (int t = 2; t <= depth; ++t) {
    CorrTensorResult r = tensor(s.levels[static_cast<size_t>(t - 1)], e, tol);
    s.step.push_back(r.data);
    s.levels.push_back(std::move(r.corr));
    // expansion of level-t units in the spanning products
    const auto units_tm1 = module_units(s.level_module(t - 1));
    const auto units_1 = module_units(e.module);
    const auto units_t = module_units(s.level_module(t));
    int dim = s.level_module(t).total_dim();
    Mat span(dim, static_cast<Eigen::Index>(units_tm1.size() * units_1.size()));
    for (size_t b = 0; b < units_tm1.size(); ++b)
      for (size_t g = 0; g < units_1.size(); ++g)
        span.col(static_cast<Eigen::Index>(b * units_1.size() + g)) =
            vec_element(s.step.back().apply(units_tm1[b], units_1[g]));
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(span);
    auto& exps = s.unit_expansion[static_cast<size_t>(t)];
    exps.resize(units_t.size());
    for (size_t a = 0; a < units_t.size(); ++a) {
      Vec c = cod.solve(vec_element(units_t[a]));
      if ((span * c - vec_element(units_t[a])).norm() > 1e3 * tol)
        throw Error("build_slice: level units are not spanned by products");
      for (size_t b = 0; b < units_tm1.size(); ++b)
        for (size_t g = 0; g < units_1.size(); ++g) {
          cxd v = c(static_cast<Eigen::Index>(b * units_1.size() + g));
          if (std::abs(v) > 1e-13)
            exps[a].terms.emplace_back(static_cast<int>(b), static_cast<int>(g), v);
        }
    }
  }
  return s;
}

PSUnit make_unit(const ProductSystemSlice& s, const ModuleElement& xi1, double tol) {
  PSUnit u;
  u.xi.push_back(s.one());
  if (s.depth >= 1) u.xi.push_back(xi1);
  for (int t = 2; t <= s.depth; ++t)
    u.xi.push_back(s.mult(t - 1, 1, u.xi[static_cast<size_t>(t - 1)], xi1));
  double ud = 0.0;
  for (int t = 0; t <= s.depth; ++t) {
    AlgebraElement g = inner(u.xi[static_cast<size_t>(t)], u.xi[static_cast<size_t>(t)]);
    ud = std::max(ud, (g - AlgebraElement::identity(g.parent)).norm());
  }
  u.unitality_defect = ud;
  u.unital = ud <= 1e3 * tol;
  double md = 0.0;
  for (int a = 0; a <= s.depth; ++a)
    for (int b = 0; a + b <= s.depth; ++b)
      md = std::max(md, (s.mult(a, b, u.xi[static_cast<size_t>(a)], u.xi[static_cast<size_t>(b)]) -
                         u.xi[static_cast<size_t>(a + b)])
                            .norm());
  u.multiplicativity_defect = md;
  return u;
}

}  // namespace ckit
