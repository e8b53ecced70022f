#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "ckit/intsolve.hpp"
#include "ckit/reprn.hpp"
#include "ckit/scenario.hpp"

using namespace ckit;

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open " + path);
  return json::parse(in);
}

Correspondence load_corr(const std::string& path) {
  json j = load_json(path);
  if (!j.contains("correspondence"))
    throw StructuralError(path + ": expected a correspondence descriptor");
  Correspondence e = correspondence_from_json(j.at("correspondence"));
  e.validate();
  return e;
}

std::vector<long long> parse_vec(const std::string& csv) {
  std::vector<long long> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoll(tok));
  return out;
}

void emit(const json& out, const std::string& to_file) {
  std::string text = out.dump(2);
  if (!to_file.empty()) {
    std::ofstream f(to_file);
    f << text << "\n";
  }
  std::cout << text << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corres-kit: finite-dimensional Hilbert-module and correspondence toolkit"};
  app.require_subcommand(1);

  std::string file, file2, out_json, mvec, gvec, xi_path;
  double tol = kDefaultTol;
  uint64_t seed = 0;
  int depth = 4, amp = 2;
  int k_max = 3, dims_max = 3, mu_max = 2;
  long long limit = -1;

  auto* run = app.add_subcommand("run", "execute a scenario file");
  run->add_option("file", file)->required();
  run->add_option("--tol", tol);
  run->add_option("--seed", seed);
  run->add_option("--json", out_json, "write the machine report to a file");

  auto* sweep = app.add_subcommand("sweep", "exhaustive duality sweep");
  sweep->add_option("--k", k_max);
  sweep->add_option("--dims", dims_max);
  sweep->add_option("--mu-max", mu_max);
  sweep->add_option("--limit", limit);
  sweep->add_option("--seed", seed);
  sweep->add_option("--json", out_json);

  auto* morita = app.add_subcommand("morita", "Morita equivalence decisions");
  auto* mcheck = morita->add_subcommand("check", "is the correspondence a Morita equivalence");
  mcheck->add_option("file", file)->required();
  auto* mequiv = morita->add_subcommand("equivalent", "are two correspondences Morita equivalent");
  mequiv->add_option("file", file)->required();
  mequiv->add_option("other", file2)->required();
  auto* mtrans = morita->add_subcommand("transport", "transport E along M");
  mtrans->add_option("file", file)->required();
  mtrans->add_option("witness", file2)->required();

  auto* endo = app.add_subcommand("endo", "endomorphism <-> correspondence dictionary");
  auto* eexists = endo->add_subcommand("exists", "positive fixed vector of mu^T");
  eexists->add_option("file", file)->required();
  auto* esemi = endo->add_subcommand("esemigroup", "subinvariant vector decision");
  esemi->add_option("file", file)->required();
  auto* econs = endo->add_subcommand("construct", "build (F, theta) from a fixed vector");
  econs->add_option("file", file)->required();
  econs->add_option("--m", mvec)->required();
  auto* eof = endo->add_subcommand("of", "correspondence of an endomorphism");
  eof->add_option("file", file, "endomorphism descriptor")->required();
  eof->add_option("module", file2, "module descriptor")->required();
  auto* edil = endo->add_subcommand("dilate", "truncated inductive-limit dilation");
  edil->add_option("file", file)->required();
  edil->add_option("--xi", xi_path, "module element descriptor")->required();
  edil->add_option("--depth", depth);

  auto* comm = app.add_subcommand("commutant", "the represented picture");
  auto* cof = comm->add_subcommand("of", "commutant correspondence");
  cof->add_option("file", file)->required();
  cof->add_option("--g", gvec)->required();
  auto* cdouble = comm->add_subcommand("double", "double commutant check");
  cdouble->add_option("file", file)->required();
  cdouble->add_option("--g", gvec)->required();
  auto* cbridge = comm->add_subcommand("bridge", "endomorphism <-> representation round trip");
  cbridge->add_option("file", file)->required();
  cbridge->add_option("--m", mvec)->required();
  cbridge->add_option("--g", gvec)->required();

  auto* repc = app.add_subcommand("rep", "representations of correspondences");
  auto* rexists = repc->add_subcommand("exists", "positive fixed vector of mu");
  rexists->add_option("file", file)->required();
  auto* rcons = repc->add_subcommand("construct", "faithful nondegenerate representation");
  rcons->add_option("file", file)->required();
  rcons->add_option("--g", gvec)->required();
  auto* rfock = repc->add_subcommand("fock", "truncated Fock representation");
  rfock->add_option("file", file)->required();
  rfock->add_option("--g", gvec)->required();
  rfock->add_option("--depth", depth);
  auto* ramp = repc->add_subcommand("amplification", "unit vectors in M_n(E)");
  ramp->add_option("file", file)->required();
  ramp->add_option("--n", amp);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ScenarioReport r = run_scenario_file(file, tol, seed);
      if (!out_json.empty()) {
        std::ofstream f(out_json);
        f << r.machine.dump(2) << "\n";
      }
      std::cout << r.human();
      return r.exit_code();
    }
    if (*sweep) {
      SweepConfig cfg{k_max, dims_max, mu_max, seed, limit, true};
      SweepReport r = run_sweep(cfg);
      emit(r.machine, out_json);
      return r.exit_code();
    }
    if (*mcheck) {
      MoritaCheck r = is_morita_equivalence(load_corr(file));
      json out{{"ok", r.ok}};
      if (r.ok) {
        out["perm"] = r.witness->perm;
        out["left_identity_residual"] = r.witness->left_identity_residual;
        out["right_identity_residual"] = r.witness->right_identity_residual;
      } else
        out["reason"] = r.reason;
      emit(out, out_json);
      return r.ok ? 0 : 1;
    }
    if (*mequiv) {
      MoritaDecision r = correspondences_morita_equivalent(load_corr(file), load_corr(file2));
      json out{{"equivalent", r.equivalent}};
      if (r.equivalent) {
        out["perm"] = r.perm;
        out["residual"] = r.intertwine_residual;
      }
      emit(out, out_json);
      return 0;
    }
    if (*mtrans) {
      MoritaCheck chk = is_morita_equivalence(load_corr(file2));
      if (!chk.ok) throw PreconditionError("witness is not a Morita equivalence: " + chk.reason);
      TransportedCorrespondence t = transport_correspondence(load_corr(file), *chk.witness);
      json out{{"mu", imat_to_json(extract_multiplicity(t.corr))},
               {"mu_law_residual", t.mu_law_residual},
               {"result", correspondence_to_json(t.corr)}};
      emit(out, out_json);
      return 0;
    }
    if (*eexists || *esemi) {
      EndoExistence r = *eexists ? endo_exists(load_corr(file)) : esemigroup_exists(load_corr(file));
      json out{{"exists", r.exists}};
      if (r.exists)
        out["m"] = r.m;
      else
        out["certificate"] = r.certificate;
      emit(out, out_json);
      return 0;
    }
    if (*econs) {
      EndoConstruction r = endo_construct(load_corr(file), parse_vec(mvec));
      json out{{"mults", r.f.mults}, {"roundtrip_residual", r.roundtrip_residual}};
      emit(out, out_json);
      return 0;
    }
    if (*eof) {
      json je = load_json(file);
      Endomorphism theta = endomorphism_from_json(je.at("endomorphism"));
      HilbertModule f = module_from_json(load_json(file2).at("module"));
      CorrespondenceOf r = correspondence_of(theta, f);
      json out{{"mu", imat_to_json(extract_multiplicity(r.e_theta))},
               {"conjugation_residual", r.conjugation_residual},
               {"correspondence", correspondence_to_json(r.e_theta)}};
      emit(out, out_json);
      return 0;
    }
    if (*edil) {
      Correspondence e = load_corr(file);
      json jx = load_json(xi_path);
      ModuleElement xi = module_element_from_json(e.module, jx.at("blocks"));
      InductiveDilation r = inductive_dilation(e, xi, depth);
      json out{{"unit_defect", r.report.unit_defect},
               {"mult_defect", r.report.mult_defect},
               {"compat_defect", r.report.compat_defect},
               {"unitality_defect", r.report.unitality_defect}};
      emit(out, out_json);
      return 0;
    }
    if (*cof || *cdouble) {
      Correspondence e = load_corr(file);
      RepresentedAlgebra ra(e.module.coeff,
                            std::vector<int>(parse_vec(gvec).begin(), parse_vec(gvec).end()));
      if (*cof) {
        CommutantResult r = commutant_correspondence(represent(e, ra));
        emit(json{{"mu", imat_to_json(r.mu_prime)}, {"residual", r.residual}}, out_json);
      } else {
        DoubleCommutantResult r = double_commutant_check(represent(e, ra));
        emit(json{{"ok", r.ok}, {"residual", r.residual}}, out_json);
        return r.ok ? 0 : 1;
      }
      return 0;
    }
    if (*cbridge) {
      Correspondence e = load_corr(file);
      EndoConstruction con = endo_construct(e, parse_vec(mvec));
      RepresentedAlgebra ra(e.module.coeff,
                            std::vector<int>(parse_vec(gvec).begin(), parse_vec(gvec).end()));
      Theorem95EndoToRep fwd = theorem95_endo_to_rep(con.theta, con.f, ra);
      RepresentedCorrespondence rc = represent(correspondence_of(con.theta, con.f).e_theta, ra);
      Theorem95RepToEndo back = theorem95_rep_to_endo(rc, fwd.commutant, fwd.rep_prime);
      ConjugacyResult round = conjugacy_check(con.theta, con.f, back.theta, back.f);
      emit(json{{"roundtrip_conjugate", round.conjugate},
                {"residual", std::max({fwd.residual, back.residual, round.residual})}},
           out_json);
      return round.conjugate ? 0 : 1;
    }
    if (*rexists) {
      RepExistence r = rep_exists(load_corr(file));
      json out{{"exists", r.exists}};
      if (r.exists)
        out["g"] = r.g;
      else
        out["certificate"] = r.certificate;
      emit(out, out_json);
      return 0;
    }
    if (*rcons) {
      RepConstruction r = rep_construct(load_corr(file), parse_vec(gvec));
      emit(json{{"covariance", r.check.covariance},
                {"bimodule", r.check.bimodule},
                {"nondegenerate", r.check.nondegenerate},
                {"faithful", r.check.faithful}},
           out_json);
      return 0;
    }
    if (*rfock) {
      Correspondence e = load_corr(file);
      RepresentedAlgebra ra(e.module.coeff,
                            std::vector<int>(parse_vec(gvec).begin(), parse_vec(gvec).end()));
      FockResult r = fock_representation(e, ra, depth);
      emit(json{{"covariance_interior", r.covariance_interior},
                {"covariance_boundary", r.covariance_boundary},
                {"vacuum_defect", r.vacuum_defect},
                {"interior_leakage", r.interior_leakage}},
           out_json);
      return 0;
    }
    if (*ramp) {
      AmplificationUnitVector r = unit_vector_in_amplification(load_corr(file), amp);
      json out{{"criterion", r.criterion}};
      if (!r.criterion) {
        out["failing_block"] = r.failing_block;
        out["search_defect"] = r.search_best_defect;
        out["rank_bound"] = r.rank_bound;
      }
      emit(out, out_json);
      return 0;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
