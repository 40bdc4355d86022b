#include "hmgh/applications.hpp"
#include "hmgh/criteria.hpp"
#include "hmgh/density_io.hpp"
#include "hmgh/errors.hpp"
#include "hmgh/manybody.hpp"
#include "hmgh/measures.hpp"
#include "hmgh/states.hpp"
#include "hmgh/sweep.hpp"
#include "hmgh/unstable.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace hmgh;
using nlohmann::ordered_json;

namespace {

struct Common {
  int n = 3;
  int d = 2;
  std::string out;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::uint64_t max_dim = kDefaultMaxDim;
};

struct StateOpts {
  std::string in;
  std::string kind;
  std::string family;
  int m = 1;
  std::string bell = "phi+";
  std::string basis;
  double alpha = 1.0;
  double beta = 0.0;
  double noise = 0.0;
};

struct CritOpts {
  std::string name = "gme";
  int k = 2, f = 2, m = 0;  // m = 0: same as --m
  std::string block = "1";
  std::string probe;
  std::string normalisation = "standard";
  std::string chain;
  std::string det_i, det_j;
};

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw DomainError("cannot open '" + c.out + "' for writing");
  f << text;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw DomainError("not an integer: '" + item + "'");
    } catch (const std::logic_error&) {
      throw DomainError("not an integer: '" + item + "'");
    }
  }
  return out;
}

// Blocks are given with 1-based site labels.
std::vector<int> parse_block(const std::string& text) {
  std::vector<int> b = parse_ints(text);
  for (int& s : b) {
    if (s < 1) throw DomainError("site labels start at 1");
    --s;
  }
  return b;
}

FamilySpec family_spec(const Common& c, const StateOpts& s) {
  FamilySpec f;
  f.family = parse_family(s.family);
  f.n = c.n;
  f.d = c.d;
  f.m = s.m;
  f.alpha = s.alpha;
  f.beta = s.beta;
  return f;
}

DensityMatrix dense_state(const Common& c, const StateOpts& s) {
  if (!s.in.empty()) {
    DensityMatrix rho = load_density(s.in);
    require_dense(rho.shape(), c.max_dim);
    return rho;
  }
  if (!s.family.empty()) {
    MixtureProvider mix = family_state(family_spec(c, s));
    require_dense(mix.shape(), c.max_dim);
    return mix.to_dense(c.max_dim);
  }
  StateSpec spec;
  spec.kind = parse_state_kind(s.kind.empty() ? "ghz" : s.kind);
  spec.n = c.n;
  spec.d = c.d;
  spec.m = s.m;
  spec.bell = s.bell;
  if (spec.kind == StateKind::basis_product) {
    if (s.basis.empty()) throw DomainError("basis states need --basis");
    spec.basis = parse_multiindex(s.basis);
  }
  if (spec.kind != StateKind::smolin && spec.kind != StateKind::bell) require_dense(SystemShape::uniform(c.n, c.d), c.max_dim);
  DensityMatrix rho = make_density(spec);
  return s.noise > 0.0 ? mix_white_noise(rho, s.noise) : rho;
}

void add_state_opts(CLI::App* app, StateOpts& s) {
  app->add_option("--in", s.in, "Density matrix JSON file");
  app->add_option("--kind", s.kind, "ghz, w, dicke, smolin, bell, basis");
  app->add_option("--family", s.family, "ghz-iso, dicke-iso, ghz-w, gmd");
  app->add_option("--m", s.m, "Excitation number for Dicke states")->check(CLI::PositiveNumber);
  app->add_option("--bell", s.bell, "phi+, phi-, psi+, psi-");
  app->add_option("--basis", s.basis, "Product basis label, e.g. 0101");
  app->add_option("--alpha", s.alpha, "Family weight of the GHZ (or Dicke) state");
  app->add_option("--beta", s.beta, "Family weight of the W state");
  app->add_option("--noise", s.noise, "White-noise weight mixed into --kind states")->check(CLI::Range(0.0, 1.0));
}

void add_crit_opts(CLI::App* app, CritOpts& c) {
  app->add_option("--criterion", c.name,
                  "ppt, bipartite, gme, ksep, dicke, q0, qm, double, ntuple, fidelity-ghz3, fidelity-w3, mlinear, det");
  app->add_option("--k", c.k, "k for ksep");
  app->add_option("--f", c.f, "Dimension f for q0 and qm");
  app->add_option("--cm", c.m, "m for dicke and qm (default: --m)");
  app->add_option("--block", c.block, "Transposed block for ppt, 1-based, comma-separated");
  app->add_option("--probe", c.probe, "Probe pair, e.g. 000,111");
  app->add_option("--normalisation", c.normalisation, "ksep normalisation: standard or doubled");
  app->add_option("--chain", c.chain, "mlinear probes: two-site labels, comma-separated");
  app->add_option("--det-i", c.det_i, "det row labels, comma-separated");
  app->add_option("--det-j", c.det_j, "det column labels, comma-separated");
}

CriterionSpec criterion_spec(const CritOpts& o, const StateOpts& s) {
  CriterionSpec c;
  c.name = o.name;
  c.k = o.k;
  c.f = o.f;
  c.m = o.m > 0 ? o.m : s.m;
  c.block = parse_block(o.block);
  if (!o.probe.empty()) c.probe = parse_probe(o.probe);
  if (o.normalisation == "doubled") c.normalisation = KsepNormalisation::doubled_coherence;
  else if (o.normalisation != "standard") throw DomainError("normalisation must be standard or doubled");
  std::stringstream ss(o.chain);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) c.chain.push_back(parse_multiindex(item));
  c.det_i = parse_ints(o.det_i);
  c.det_j = parse_ints(o.det_j);
  return c;
}

CriterionReport with_tol(CriterionReport r, const Common& c) {
  if (c.tol) {
    r.tol = *c.tol;
    r.violated = r.value > r.tol;
  }
  return r;
}

std::vector<double> range_values(const std::vector<double>& list, double start, double stop, double step) {
  if (!list.empty()) return list;
  ScanSpec s;
  s.start = start;
  s.stop = stop;
  s.step = step;
  return scan_grid(s);
}

PauliExpectations read_expectations(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError(std::string("expectations file is not valid JSON: ") + e.what());
  }
  // Accept the output of `qss simulate` as well as a bare expectations object.
  if (j.is_object() && j.contains("expectations")) j = nlohmann::json(j["expectations"]);
  if (!j.is_object() || !j.contains("strings") || !j.contains("values") || !j["strings"].is_array() || !j["values"].is_array() ||
      j["strings"].size() != j["values"].size())
    throw DomainError("expectations JSON needs equal-length 'strings' and 'values' arrays");
  PauliExpectations out;
  for (std::size_t i = 0; i < j["strings"].size(); ++i) {
    PauliString s;
    for (const auto& l : j["strings"][i]) {
      const int v = l.get<int>();
      if (v < 0 || v > 3) throw DomainError("Pauli labels must be 0..3");
      s.labels.push_back(v);
    }
    out[s] = j["values"][i].get<double>();
  }
  return out;
}

// nlohmann prints doubles with the shortest round-trip form; reports use %.17g.
std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hmgh: multipartite separability criteria and their applications"};
  app.require_subcommand(1);
  Common c;
  app.add_option("--n", c.n, "Number of subsystems")->check(CLI::PositiveNumber);
  app.add_option("--d", c.d, "Local dimension")->check(CLI::Range(2, 1 << 16));
  app.add_option("--out", c.out, "Output file (default stdout)");
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--tol", c.tol, "Tolerance (violation tolerance, or bisection tolerance for threshold)");
  app.add_option("--max-dim", c.max_dim, "Largest dense dimension");

  StateOpts st;
  CritOpts co;

  auto* state = app.add_subcommand("state", "Build a state and write its density matrix as JSON");
  add_state_opts(state, st);

  auto* crit = app.add_subcommand("crit", "Evaluate a criterion on a state");
  add_state_opts(crit, st);
  add_crit_opts(crit, co);

  std::string measure_name = "cgme";
  auto* measure = app.add_subcommand("measure", "Entanglement measures: cgme, cgme-bound, schmidt-rank");
  add_state_opts(measure, st);
  add_crit_opts(measure, co);
  measure->add_option("--measure", measure_name, "cgme, cgme-bound, schmidt-rank");

  std::string var = "alpha";
  double start = 0.0, stop = 1.0, step = 0.01;
  std::vector<double> points;
  int threads = 0;
  auto* scan_cmd = app.add_subcommand("scan", "Criterion values along a family parameter (CSV)");
  add_state_opts(scan_cmd, st);
  add_crit_opts(scan_cmd, co);
  scan_cmd->add_option("--var", var, "alpha or beta");
  scan_cmd->add_option("--start", start);
  scan_cmd->add_option("--stop", stop);
  scan_cmd->add_option("--step", step);
  scan_cmd->add_option("--points", points, "Explicit grid, comma-separated")->delimiter(',');
  scan_cmd->add_option("--threads", threads, "Worker threads (0: all cores)");

  double lo = 0.0, hi = 1.0;
  auto* thr = app.add_subcommand("threshold", "Bisect the detection threshold along a family parameter");
  add_state_opts(thr, st);
  add_crit_opts(thr, co);
  thr->add_option("--var", var, "alpha or beta");
  thr->add_option("--lo", lo);
  thr->add_option("--hi", hi);

  std::string lattice = "ring";
  std::vector<double> hs{0.0}, gammas{0.0}, kts{0.0};
  int restarts = 32;
  auto* mb = app.add_subcommand("manybody", "Heisenberg entanglement gaps (CSV)");
  mb->add_option("--lattice", lattice, "ring or chain");
  mb->add_option("--field", hs, "Field values, comma-separated")->delimiter(',');
  mb->add_option("--gamma", gammas, "Anisotropy values, comma-separated")->delimiter(',');
  mb->add_option("--kT", kts, "Temperatures, comma-separated; 0 is the ground state")->delimiter(',');
  mb->add_option("--restarts", restarts)->check(CLI::PositiveNumber);

  auto* qss = app.add_subcommand("qss", "Three-party secret sharing");
  qss->require_subcommand(1);
  std::uint64_t rounds = 1000, shots = 0;
  bool eavesdrop = false;
  auto* qsim = qss->add_subcommand("simulate", "Run rounds and verify the resource");
  qsim->add_option("--rounds", rounds);
  qsim->add_flag("--eavesdrop", eavesdrop, "Replace the resource by an intercepted product state");
  qsim->add_option("--shots", shots, "Shots per Pauli string (0: exact expectations)");
  std::string exp_path;
  auto* qver = qss->add_subcommand("verify", "Evaluate the verification inequality from expectations");
  qver->add_option("--expectations", exp_path)->required();
  auto* qtab = qss->add_subcommand("table", "Alice's conditional state for every Bob/Charlie outcome (CSV)");

  std::vector<double> ts;
  double t_start = 0.0, t_stop = 1.0, t_step = 0.1, g1 = 1.0, g2 = 1.0;
  ChshBoundOptions bopts;
  auto* uns = app.add_subcommand("unstable", "CHSH bounds for decaying two-level systems (CSV)");
  uns->add_option("--t", ts, "Times, comma-separated")->delimiter(',');
  uns->add_option("--t-start", t_start);
  uns->add_option("--t-stop", t_stop);
  uns->add_option("--t-step", t_step);
  uns->add_option("--gamma1", g1);
  uns->add_option("--gamma2", g2);
  uns->add_option("--theta-steps", bopts.theta_steps);
  uns->add_option("--phi-steps", bopts.phi_steps);

  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) sub->fallthrough();
  for (auto* sub : qss->get_subcommands([](const CLI::App*) { return true; })) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*state) {
      std::ostringstream out;
      write_density_json(out, dense_state(c, st));
      emit(c, out.str());
    } else if (*crit) {
      CriterionSpec spec = criterion_spec(co, st);
      CriterionReport r;
      if (st.in.empty() && !st.family.empty() && spec.name != "ppt") {
        r = evaluate_criterion(spec, family_state(family_spec(c, st)));
      } else {
        r = evaluate_criterion(spec, dense_state(c, st));
      }
      emit(c, report_to_json(with_tol(r, c)) + "\n");
    } else if (*measure) {
      ordered_json j;
      MeasureResult m;
      if (measure_name == "cgme" || measure_name == "schmidt-rank") {
        if (!st.in.empty() || !st.family.empty() || st.noise > 0.0 || st.kind == "smolin")
          throw DomainError(measure_name + " needs a pure --kind state");
        StateSpec spec;
        spec.kind = parse_state_kind(st.kind.empty() ? "ghz" : st.kind);
        spec.n = c.n;
        spec.d = c.d;
        spec.m = st.m;
        spec.bell = st.bell;
        if (spec.kind == StateKind::basis_product) spec.basis = parse_multiindex(st.basis);
        require_dense(SystemShape::uniform(spec.kind == StateKind::bell ? 2 : c.n, c.d), c.max_dim);
        StateVector psi = std::get<StateVector>(make_state(spec));
        if (measure_name == "cgme") {
          m = cgme_pure(psi);
        } else {
          m = {"schmidt_rank", static_cast<double>(schmidt_rank(psi, parse_block(co.block))), true};
        }
      } else if (measure_name == "cgme-bound") {
        CriterionSpec spec = criterion_spec(co, st);
        DensityMatrix rho = dense_state(c, st);
        m = cgme_lower_bound(rho, spec.probe ? *spec.probe : uniform_probe(rho.shape().size(), 0, rho.shape().dim(0) - 1));
      } else {
        throw DomainError("unknown measure '" + measure_name + "'");
      }
      j["name"] = m.name;
      j["value"] = "@V@";
      j["exact"] = m.exact;
      std::string text = dump(j);
      text.replace(text.find("\"@V@\""), 5, format_double(m.value));
      emit(c, text);
    } else if (*scan_cmd) {
      if (st.family.empty()) throw DomainError("scan needs --family");
      ScanSpec s;
      s.family = family_spec(c, st);
      s.criterion = criterion_spec(co, st);
      s.variable = parse_sweep_variable(var);
      s.start = start;
      s.stop = stop;
      s.step = step;
      s.points = points;
      s.threads = threads;
      emit(c, scan_csv(scan(s)));
    } else if (*thr) {
      if (st.family.empty()) throw DomainError("threshold needs --family");
      ThresholdSpec s;
      s.family = family_spec(c, st);
      s.criterion = criterion_spec(co, st);
      s.variable = parse_sweep_variable(var);
      s.lo = lo;
      s.hi = hi;
      if (c.tol) s.tol = *c.tol;
      ThresholdResult r = threshold(s);
      std::ostringstream out;
      out << "{\n  \"threshold\": " << format_double(r.value) << ",\n  \"lo\": " << format_double(r.lo)
          << ",\n  \"hi\": " << format_double(r.hi) << ",\n  \"iterations\": " << r.iterations
          << ",\n  \"violated_above\": " << (r.violated_above ? "true" : "false") << "\n}\n";
      emit(c, out.str());
    } else if (*mb) {
      Lattice lat;
      if (lattice == "ring") lat = Lattice::ring(c.n);
      else if (lattice == "chain") lat = Lattice::chain(c.n);
      else throw DomainError("lattice must be ring or chain");
      KsepEnergyOptions opts;
      opts.restarts = restarts;
      opts.seed = c.seed;
      std::ostringstream out;
      out << "h,gamma,kT,E0";
      for (int k = 2; k <= c.n; ++k) out << ",E_" << k << "sep";
      out << ",detected_k,cgme_ground\n";
      bool all_converged = true;
      for (double g : gammas) {
        for (double h : hs) {
          Matrix ham = heisenberg_hamiltonian(lat, HeisenbergParams::anisotropic(g, h));
          GapReport rep = entanglement_gaps(ham, c.n, opts);
          for (std::size_t k = 1; k < rep.converged.size(); ++k) all_converged = all_converged && rep.converged[k];
          GroundState gs = ground_state(ham);
          const double cg = gs.vector ? cgme_pure(*gs.vector).value : std::nan("");
          for (double kT : kts) {
            if (kT < 0.0) throw DomainError("kT must be non-negative");
            const int det = kT == 0.0 ? detected_k(gs.state, rep) : detected_k(thermal_state(ham, kT).state, rep);
            out << format_double(h) << ',' << format_double(g) << ',' << format_double(kT) << ','
                << format_double(rep.e0);
            for (int k = 2; k <= c.n; ++k) out << ',' << format_double(rep.ksep(k));
            out << ',' << det << ',' << format_double(cg) << '\n';
          }
        }
      }
      emit(c, out.str());
      if (!all_converged) std::cerr << "warning: some k-separable minimisations hit the sweep limit\n";
    } else if (*qsim) {
      QssSummary s = qss_simulate(rounds, c.seed, eavesdrop, shots);
      std::ostringstream out;
      out << "{\n  \"rounds\": " << s.rounds << ",\n  \"sifted\": " << s.sifted << ",\n  \"errors\": " << s.errors
          << ",\n  \"error_rate\": " << format_double(s.sifted ? double(s.errors) / double(s.sifted) : 0.0)
          << ",\n  \"eavesdrop\": " << (s.eavesdrop ? "true" : "false")
          << ",\n  \"verification\": " << report_to_json(with_tol(s.verification, c)) << ",\n  \"expectations\": {\n";
      out << "    \"strings\": [";
      bool first = true;
      for (const auto& [k, v] : s.expectations) {
        out << (first ? "" : ", ") << "[" << k.labels[0] << ", " << k.labels[1] << ", " << k.labels[2] << "]";
        first = false;
      }
      out << "],\n    \"values\": [";
      first = true;
      for (const auto& [k, v] : s.expectations) {
        out << (first ? "" : ", ") << format_double(v);
        first = false;
      }
      out << "]\n  }\n}\n";
      emit(c, out.str());
    } else if (*qver) {
      emit(c, report_to_json(with_tol(qss_verification_value(read_expectations(exp_path)), c)) + "\n");
    } else if (*qtab) {
      std::ostringstream out;
      out << "bob,charlie,alice\n";
      auto table = qss_table();
      const auto& labels = qss_labels();
      for (int b = 0; b < 4; ++b)
        for (int ch = 0; ch < 4; ++ch)
          out << labels[b].to_string() << ',' << labels[ch].to_string() << ',' << table[b][ch].to_string() << '\n';
      emit(c, out.str());
    } else if (*uns) {
      std::ostringstream out;
      out << "t,B_minus,B_plus,singlet_value\n";
      bool all_converged = true;
      for (double t : range_values(ts, t_start, t_stop, t_step)) {
        ChshSettings s = ChshSettings::standard(t, g1, g2);
        ChshBound b = chsh_bound(s, bopts);
        all_converged = all_converged && b.converged;
        out << format_double(t) << ',' << format_double(b.b_minus) << ',' << format_double(b.b_plus) << ','
            << format_double(singlet_value(s)) << '\n';
      }
      emit(c, out.str());
      if (!all_converged) std::cerr << "warning: local refinement hit its iteration limit\n";
    }
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << " (requested " << e.requested() << ")\n";
    return 3;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
