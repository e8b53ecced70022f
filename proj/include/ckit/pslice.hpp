#pragma once

#include "ckit/corresp.hpp"

namespace ckit {

/// Discrete product system E^{(o)} truncated at depth N: materialized tensor
/// powers E_0 = B, E_n = E^{(o)n} together with the multiplication maps
/// E_s o E_t -> E_{s+t} realized on normal-form coordinates.
struct ProductSystemSlice {
  Correspondence base;
  int depth = 0;
  std::vector<Correspondence> levels;  // levels[0] = trivial correspondence

  bool trivial_base = false;           // all levels equal B, products multiply
  std::vector<TensorData> step;        // step[s]: levels[s] o base -> levels[s+1], s >= 1
  // expansion of level-t units into products of level-(t-1) and level-1 units
  struct Expansion {
    std::vector<std::tuple<int, int, cxd>> terms;  // (beta, gamma, coeff)
  };
  std::vector<std::vector<Expansion>> unit_expansion;  // [t][unit index], t >= 2

  const HilbertModule& level_module(int t) const { return levels[static_cast<size_t>(t)].module; }
  ModuleElement one() const;  // identity of E_0

  /// x_s o y_t evaluated in E_{s+t} (s + t <= depth).
  ModuleElement mult(int s, int t, const ModuleElement& xs, const ModuleElement& yt) const;

  /// Max associativity residual over sampled triples r+s+t <= depth.
  double associativity_defect(int max_checks = 200) const;
};

ProductSystemSlice build_slice(const Correspondence& e, int depth, double tol = kDefaultTol);

/// Enumeration of the standard units of a module, used by slice checks.
std::vector<ModuleElement> module_units(const HilbertModule& mod);

struct PSUnit {
  std::vector<ModuleElement> xi;  // xi[0] = 1, xi[t] in E_t
  bool unital = false;
  double unitality_defect = 0.0;      // max over t of || <xi_t,xi_t> - 1 ||
  double multiplicativity_defect = 0.0;  // max over s+t<=N of || xi_s o xi_t - xi_{s+t} ||
};

/// Powers of a single vector xi_1; unital iff every level is a unit vector.
PSUnit make_unit(const ProductSystemSlice& s, const ModuleElement& xi1, double tol = kDefaultTol);

}  // namespace ckit
