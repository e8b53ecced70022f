#include "ckit/scenario.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include "ckit/intsolve.hpp"
#include "ckit/reprn.hpp"

namespace ckit {

namespace {

struct Declarations {
  std::map<std::string, MultiMatrixAlgebra> algebras;
  std::map<std::string, HilbertModule> modules;
  std::map<std::string, Correspondence> correspondences;
  std::map<std::string, Endomorphism> endomorphisms;
  std::map<std::string, RepresentedAlgebra> represented;
  std::map<std::string, std::pair<std::string, json>> elements;  // module name + payload
};

const Correspondence& find_corr(const Declarations& d, const std::string& name) {
  auto it = d.correspondences.find(name);
  if (it == d.correspondences.end())
    throw StructuralError("unresolved correspondence '" + name + "'");
  return it->second;
}

HilbertModule find_module(const Declarations& d, const std::string& name) {
  auto it = d.modules.find(name);
  if (it != d.modules.end()) return it->second;
  auto ic = d.correspondences.find(name);
  if (ic != d.correspondences.end()) return ic->second.module;
  throw StructuralError("unresolved module '" + name + "'");
}

std::vector<long long> ll_vector(const json& j) { return j.get<std::vector<long long>>(); }

// expectation: keys ending in _le / _ge bound the reported numeric field,
// anything else must match exactly
void apply_expectations(const json& expect, json& result, bool& ok) {
  for (const auto& item : expect.items()) {
    const std::string& key = item.key();
    auto ends_with = [&](const char* suf) {
      size_t n = std::strlen(suf);
      return key.size() > n && key.compare(key.size() - n, n, suf) == 0;
    };
    if (ends_with("_le") || ends_with("_ge")) {
      std::string field = key.substr(0, key.size() - 3);
      if (!result.contains(field)) {
        result["expect_error"] = "field '" + field + "' not reported";
        ok = false;
        continue;
      }
      double got = result.at(field).get<double>();
      double bound = item.value().get<double>();
      bool pass = ends_with("_le") ? got <= bound : got >= bound;
      if (!pass) {
        result["failed_expectation"] = key;
        ok = false;
      }
    } else {
      if (!result.contains(key) || result.at(key) != item.value()) {
        result["failed_expectation"] = key;
        ok = false;
      }
    }
  }
}

json run_command(const json& cmd, Declarations& decl, double tol, int depth) {
  const std::string op = cmd.at("op").get<std::string>();
  json out;
  out["op"] = op;

  auto corr_arg = [&](const char* key = "correspondence") -> const Correspondence& {
    return find_corr(decl, cmd.at(key).get<std::string>());
  };

  if (op == "unit_vector_exists") {
    HilbertModule mod = find_module(decl, cmd.at("module").get<std::string>());
    UnitVectorDecision d = unit_vector_exists(mod);
    out["exists"] = d.exists;
    if (!d.exists) out["failing_block"] = d.failing_block;
    if (d.exists) {
      AlgebraElement g = inner(d.certificate->element, d.certificate->element);
      out["residual"] = (g - AlgebraElement::identity(g.parent)).norm();
    }
  } else if (op == "lemma32") {
    HilbertModule mod = find_module(decl, cmd.at("module").get<std::string>());
    Lemma32Result r = lemma32_unit_vector(mod, tol);
    AlgebraElement g = inner(r.xi.element, r.xi.element);
    out["copies"] = r.copies;
    out["residual"] = (g - AlgebraElement::identity(g.parent)).norm();
  } else if (op == "tensor_iso") {
    const Correspondence& e = corr_arg("left");
    const Correspondence& f = corr_arg("right");
    CorrTensorResult t = tensor(e, f, tol);
    std::string target = cmd.at("target").get<std::string>();
    const Correspondence cmparg = target == "trivial"
                                      ? trivial_correspondence(t.corr.module.coeff)
                                      : find_corr(decl, target);
    auto wit = iso_witness(t.corr, cmparg, tol);
    out["iso"] = static_cast<bool>(wit);
    out["mu"] = imat_to_json(extract_multiplicity(t.corr, tol));
    if (wit) out["residual"] = wit->residual;
  } else if (op == "extract_mu") {
    out["mu"] = imat_to_json(extract_multiplicity(corr_arg(), tol));
  } else if (op == "endo_exists" || op == "esemigroup_exists") {
    EndoExistence r = op == "endo_exists" ? endo_exists(corr_arg(), tol)
                                          : esemigroup_exists(corr_arg(), tol);
    out["exists"] = r.exists;
    if (r.exists) {
      out["m"] = r.m;
      bool eq = std::all_of(r.m.begin(), r.m.end(), [&](long long v) { return v == r.m[0]; });
      out["equal_entries"] = eq;
    } else {
      out["certificate"] = r.certificate;
    }
  } else if (op == "endo_construct") {
    EndoConstruction r = endo_construct(corr_arg(), ll_vector(cmd.at("m")), tol);
    out["residual"] = r.roundtrip_residual;
    out["mults"] = r.f.mults;
  } else if (op == "conjugacy") {
    const Correspondence& e = corr_arg();
    EndoConstruction a = endo_construct(e, ll_vector(cmd.at("m1")), tol);
    EndoConstruction b = endo_construct(e, ll_vector(cmd.at("m2")), tol);
    ConjugacyResult r = conjugacy_check(a.theta, a.f, b.theta, b.f, tol);
    out["conjugate"] = r.conjugate;
    if (r.conjugate) out["residual"] = r.residual;
  } else if (op == "morita_check") {
    MoritaCheck r = is_morita_equivalence(corr_arg(), tol);
    out["ok"] = r.ok;
    if (r.ok) {
      out["perm"] = r.witness->perm;
      out["residual"] = std::max(r.witness->left_identity_residual,
                                 r.witness->right_identity_residual);
    } else {
      out["reason"] = r.reason;
    }
  } else if (op == "morita_equivalent") {
    MoritaDecision r =
        correspondences_morita_equivalent(corr_arg("left"), corr_arg("right"), tol);
    out["equivalent"] = r.equivalent;
    if (r.equivalent) {
      out["perm"] = r.perm;
      out["residual"] = r.intertwine_residual;
    }
  } else if (op == "transport") {
    MoritaCheck chk = is_morita_equivalence(corr_arg("morita"), tol);
    if (!chk.ok) throw PreconditionError("transport: witness is not a Morita equivalence");
    TransportedCorrespondence t = transport_correspondence(corr_arg(), *chk.witness, tol);
    out["mu"] = imat_to_json(extract_multiplicity(t.corr, tol));
    out["residual"] = t.mu_law_residual;
  } else if (op == "commutant") {
    RepresentedAlgebra ra(corr_arg().module.coeff, cmd.at("g").get<std::vector<int>>());
    CommutantResult r = commutant_correspondence(represent(corr_arg(), ra), tol);
    out["mu"] = imat_to_json(r.mu_prime);
    out["residual"] = r.residual;
  } else if (op == "double_commutant") {
    RepresentedAlgebra ra(corr_arg().module.coeff, cmd.at("g").get<std::vector<int>>());
    DoubleCommutantResult r = double_commutant_check(represent(corr_arg(), ra), tol);
    out["ok"] = r.ok;
    out["residual"] = r.residual;
  } else if (op == "bridge_roundtrip") {
    const Correspondence& e = corr_arg();
    EndoConstruction con = endo_construct(e, ll_vector(cmd.at("m")), tol);
    RepresentedAlgebra ra(e.module.coeff, cmd.at("g").get<std::vector<int>>());
    Theorem95EndoToRep fwd = theorem95_endo_to_rep(con.theta, con.f, ra, tol);
    RepresentedCorrespondence rc = represent(correspondence_of(con.theta, con.f, tol).e_theta, ra);
    Theorem95RepToEndo back = theorem95_rep_to_endo(rc, fwd.commutant, fwd.rep_prime, tol);
    ConjugacyResult round = conjugacy_check(con.theta, con.f, back.theta, back.f, tol);
    out["roundtrip_conjugate"] = round.conjugate;
    out["residual"] = std::max({fwd.residual, back.residual, round.residual});
  } else if (op == "rep_exists") {
    RepExistence r = rep_exists(corr_arg(), tol);
    out["exists"] = r.exists;
    if (r.exists) out["g"] = r.g;
  } else if (op == "rep_construct") {
    RepConstruction r = rep_construct(corr_arg(), ll_vector(cmd.at("g")), tol);
    out["residual"] = std::max({r.check.covariance, r.check.bimodule, r.unitary_residual});
    out["nondegenerate"] = r.check.nondegenerate;
    out["faithful"] = r.check.faithful;
  } else if (op == "fock") {
    RepresentedAlgebra ra(corr_arg().module.coeff, cmd.at("g").get<std::vector<int>>());
    int n = cmd.value("depth", depth);
    FockResult r = fock_representation(corr_arg(), ra, n, tol);
    out["covariance_interior"] = r.covariance_interior;
    out["covariance_boundary"] = r.covariance_boundary;
    out["vacuum_defect"] = r.vacuum_defect;
    out["interior_leakage"] = r.interior_leakage;
  } else if (op == "dilate") {
    const Correspondence& e = corr_arg();
    auto it = decl.elements.find(cmd.at("xi").get<std::string>());
    if (it == decl.elements.end()) throw StructuralError("unresolved element");
    HilbertModule mod = find_module(decl, it->second.first);
    if (mod != e.module) throw StructuralError("dilate: xi lives in the wrong module");
    ModuleElement xi = module_element_from_json(mod, it->second.second);
    int n = cmd.value("depth", depth);
    InductiveDilation r = inductive_dilation(e, xi, n, tol);
    double interior = 0.0, boundary = 0.0;
    for (size_t t = 0; t < r.report.mult_defect.size(); ++t)
      interior = std::max(interior, r.report.mult_defect[t]);
    for (double v : r.report.unit_defect) boundary = std::max(boundary, v);
    out["interior_mult_defect"] = interior;
    out["unit_defect"] = boundary;
    out["unitality_defect"] = r.report.unitality_defect;
  } else if (op == "amplification_unit_vector") {
    AmplificationUnitVector r =
        unit_vector_in_amplification(corr_arg(), cmd.at("n").get<int>(), 32, tol);
    out["criterion"] = r.criterion;
    if (!r.criterion) {
      out["search_defect"] = r.search_best_defect;
      out["rank_bound"] = r.rank_bound;
    }
  } else if (op == "quasi_onb_check") {
    HilbertModule mod = find_module(decl, cmd.at("module").get<std::string>());
    QuasiONB b = quasi_onb(mod, tol);
    out["pairs"] = b.pairs.size();
    out["defect"] = quasi_onb_defect(b, mod);
  } else if (op == "build_slice") {
    const Correspondence& e = corr_arg();
    int n = cmd.value("depth", depth);
    ProductSystemSlice s = build_slice(e, n, tol);
    IMat mu = extract_multiplicity(e, tol);
    IMat power = mu_identity(mu.rows());
    bool ok = true;
    for (int t = 1; t <= n; ++t) {
      power = mu_product(power, mu);
      ok = ok && extract_multiplicity(s.levels[static_cast<size_t>(t)], tol) == power;
    }
    out["mu_power_ok"] = ok;
    out["associativity"] = s.associativity_defect();
  } else {
    throw StructuralError("unknown op '" + op + "'");
  }
  return out;
}

}  // namespace

std::string ScenarioReport::human() const {
  std::ostringstream os;
  os << "scenario " << machine.value("scenario", std::string("?")) << "\n";
  if (structural) {
    os << "  structural error: " << error << "\n";
    return os.str();
  }
  for (const auto& c : machine.at("commands"))
    os << "  [" << c.value("verdict", std::string("?")) << "] " << c.value("op", std::string("?"))
       << "\n";
  os << passed << " passed, " << failed << " failed\n";
  return os.str();
}

ScenarioReport run_scenario(const json& doc, const std::string& name,
                            std::optional<double> tol_override,
                            std::optional<uint64_t> seed_override) {
  ScenarioReport rep;
  rep.machine["scenario"] = name;
  try {
    require_keys(doc, {"version", "options", "declarations", "commands"}, "scenario");
    if (!doc.contains("version") || doc.at("version").get<int>() != 1)
      throw StructuralError("scenario: missing or unsupported version");
    double tol = kDefaultTol;
    uint64_t seed = 0;
    int depth = 4;
    if (doc.contains("options")) {
      require_keys(doc.at("options"), {"tol", "seed", "depth"}, "options");
      tol = doc.at("options").value("tol", tol);
      seed = doc.at("options").value("seed", seed);
      depth = doc.at("options").value("depth", depth);
    }
    if (tol_override) tol = *tol_override;
    if (seed_override) seed = *seed_override;
    rep.machine["input_hash"] = hash_hex(doc.dump());
    rep.machine["tol"] = tol;
    rep.machine["seed"] = seed;

    Declarations decl;
    if (doc.contains("declarations"))
      for (const auto& item : doc.at("declarations").items()) {
        const json& d = item.value();
        require_keys(d, {"algebra", "module", "correspondence", "endomorphism", "represented",
                         "element"},
                     "declaration");
        if (d.size() != 1) throw StructuralError("declaration must contain exactly one object");
        if (d.contains("algebra"))
          decl.algebras.emplace(item.key(), algebra_from_json(d.at("algebra")));
        else if (d.contains("module"))
          decl.modules.emplace(item.key(), module_from_json(d.at("module")));
        else if (d.contains("correspondence")) {
          Correspondence e = correspondence_from_json(d.at("correspondence"));
          e.validate(tol);
          decl.correspondences.emplace(item.key(), std::move(e));
        } else if (d.contains("endomorphism")) {
          Endomorphism t = endomorphism_from_json(d.at("endomorphism"));
          decl.endomorphisms.emplace(item.key(), std::move(t));
        } else if (d.contains("represented"))
          decl.represented.emplace(item.key(), represented_from_json(d.at("represented")));
        else {
          require_keys(d.at("element"), {"module", "blocks"}, "element");
          decl.elements.emplace(item.key(),
                                std::make_pair(d.at("element").at("module").get<std::string>(),
                                               d.at("element").at("blocks")));
        }
      }

    json commands = json::array();
    if (doc.contains("commands"))
      for (const auto& cmd : doc.at("commands")) {
        json result;
        bool ok = true;
        try {
          result = run_command(cmd, decl, tol, depth);
          if (cmd.contains("expect")) apply_expectations(cmd.at("expect"), result, ok);
        } catch (const Error& err) {
          result["op"] = cmd.value("op", std::string("?"));
          result["error"] = err.what();
          ok = false;
        }
        result["verdict"] = ok ? "pass" : "fail";
        ok ? ++rep.passed : ++rep.failed;
        commands.push_back(std::move(result));
      }
    rep.machine["commands"] = std::move(commands);
    rep.machine["passed"] = rep.passed;
    rep.machine["failed"] = rep.failed;
  } catch (const std::exception& err) {
    rep.structural = true;
    rep.error = err.what();
    rep.machine["structural_error"] = err.what();
  }
  return rep;
}

ScenarioReport run_scenario_file(const std::string& path, std::optional<double> tol_override,
                                 std::optional<uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) {
    ScenarioReport rep;
    rep.structural = true;
    rep.error = "cannot open " + path;
    rep.machine["structural_error"] = rep.error;
    return rep;
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const std::exception& err) {
    ScenarioReport rep;
    rep.structural = true;
    rep.error = err.what();
    rep.machine["structural_error"] = rep.error;
    return rep;
  }
  return run_scenario(doc, path, tol_override, seed_override);
}

namespace {

bool next_matrix(std::vector<int>& entries, int mu_max) {
  for (size_t i = 0; i < entries.size(); ++i) {
    if (entries[i] < mu_max) {
      ++entries[i];
      std::fill(entries.begin(), entries.begin() + static_cast<long>(i), 0);
      return true;
    }
  }
  return false;
}

}  // namespace

SweepReport run_sweep(const SweepConfig& cfg) {
  SweepReport rep;
  json failures = json::array();
  long long index = 0, executed = 0;
  double worst_residual = 0.0;

  for (int k = 1; k <= cfg.k_max; ++k) {
    std::vector<int> dims(static_cast<size_t>(k)), g(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
      dims[static_cast<size_t>(i)] = (i % cfg.dims_max) + 1;
      g[static_cast<size_t>(i)] = (i % 2) + 1;
    }
    MultiMatrixAlgebra b(dims);

    std::vector<int> entries(static_cast<size_t>(k * k), 0);
    bool more = true;
    while (more) {
      IMat mu(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) mu(i, j) = entries[static_cast<size_t>(i * k + j)];
      more = next_matrix(entries, cfg.mu_max);

      bool zero_line = false;
      for (int i = 0; i < k; ++i) {
        if (mu.row(i).sum() == 0 || mu.col(i).sum() == 0) zero_line = true;
      }
      if (zero_line) continue;
      ++index;
      if (cfg.limit > 0 && executed >= cfg.limit) continue;
      ++executed;

      json fail;
      try {
        Correspondence e = from_multiplicity(b, b, mu);
        RepExistence re = rep_exists(e);
        RepresentedAlgebra ra(b, g);
        RepresentedCorrespondence rc = represent(e, ra);
        CommutantResult cm = commutant_correspondence(rc);
        if (cm.mu_prime != IMat(mu.transpose())) fail["transpose_law"] = false;
        EndoExistence ee = endo_exists(cm.corr_prime);
        if (re.exists != ee.exists) fail["duality"] = false;

        // Morita shadow: stability of the fixed-vector criterion under all
        // block permutations
        EndoExistence direct = endo_exists(e);
        std::vector<int> perm(static_cast<size_t>(k));
        std::iota(perm.begin(), perm.end(), 0);
        do {
          IMat moved(k, k);
          for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
              moved(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]) = mu(i, j);
          FixedVectorResult fv = positive_fixed_vector(moved, true);
          if (fv.exists != direct.exists) fail["morita_shadow"] = false;
        } while (std::next_permutation(perm.begin(), perm.end()));

        if (cfg.heavy_checks) {
          DoubleCommutantResult dc = double_commutant_check(rc);
          if (!dc.ok || dc.residual > 1e-8) fail["double_commutant"] = dc.residual;
          worst_residual = std::max(worst_residual, dc.residual);
        }
      } catch (const std::exception& err) {
        fail["exception"] = err.what();
      }
      if (!fail.empty()) {
        fail["k"] = k;
        fail["mu"] = imat_to_json(mu);
        failures.push_back(std::move(fail));
      }
    }
  }

  rep.instances = executed;
  rep.failures = static_cast<long long>(failures.size());
  rep.machine["k_max"] = cfg.k_max;
  rep.machine["dims_max"] = cfg.dims_max;
  rep.machine["mu_max"] = cfg.mu_max;
  rep.machine["seed"] = cfg.seed;
  rep.machine["instances"] = executed;
  rep.machine["enumerated"] = index;
  rep.machine["failures"] = failures;
  rep.machine["worst_double_commutant_residual"] = worst_residual;
  rep.hash = hash_hex(rep.machine.dump());
  rep.machine["report_hash"] = rep.hash;
  return rep;
}

}  // namespace ckit
