#include "cli.hpp"

#include "shadowcert/behaviors.hpp"
#include "shadowcert/errors.hpp"
#include "shadowcert/extlp.hpp"
#include "shadowcert/finitedata.hpp"
#include "shadowcert/frontier.hpp"
#include "shadowcert/io.hpp"
#include "shadowcert/npa.hpp"
#include "shadowcert/parallel.hpp"
#include "shadowcert/qkernel.hpp"
#include "shadowcert/random.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace shadowcert::cli {

using nlohmann::json;

namespace {

struct Globals {
  std::string format = "csv";
  std::string out_path;
  std::uint64_t seed = 0;
};

// Exit status carried out of a subcommand without being an error.
struct Verdict {
  int code = kExitOk;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

json read_json_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

void emit_table(std::ostream& out, const CsvTable& t, const std::string& format) {
  if (format == "csv") {
    write_csv(out, t);
    return;
  }
  json rows = json::array();
  for (const auto& r : t.rows) {
    json o = json::object();
    for (std::size_t i = 0; i < t.header.size(); ++i) {
      const auto& v = r[i];
      char* end = nullptr;
      const double d = std::strtod(v.c_str(), &end);
      if (end && *end == '\0' && !v.empty())
        o[t.header[i]] = d;
      else
        o[t.header[i]] = v;
    }
    rows.push_back(std::move(o));
  }
  out << rows.dump(2) << '\n';
}

// bell | werner:ETA | lhv:FILE
TrialSource parse_strategy(const std::string& spec, std::string& description) {
  description = spec;
  if (spec == "bell") return bell_strategy();
  if (spec.rfind("werner:", 0) == 0) {
    double eta = 0.0;
    try {
      std::size_t pos = 0;
      eta = std::stod(spec.substr(7), &pos);
      if (pos != spec.size() - 7) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("strategy: cannot parse visibility in '" + spec + "'");
    }
    if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("strategy: werner visibility must lie in [0,1]");
    return bell_strategy(QuantumState(werner_state(eta)));
  }
  if (spec.rfind("lhv:", 0) == 0) return lhv_model_from_json(read_json_file(spec.substr(4)));
  throw ParseError("strategy: expected bell, werner:ETA or lhv:FILE, got '" + spec + "'");
}

Behavior source_behavior(const TrialSource& s) {
  return std::visit(
      [](const auto& v) -> Behavior {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, QuantumStrategy>)
          return born_behavior(v);
        else
          return lhv_behavior(v);
      },
      s);
}

// ---------------------------------------------------------------------------

struct FrontierArgs {
  double s_min = 0.0;
  double s_max = kTsirelson<double>;
  int points = 200;
};

Verdict cmd_frontier(const FrontierArgs& a, const Globals& g, std::ostream& out) {
  if (!(a.s_min >= 0.0 && a.s_max <= kTsirelson<double> + kScoreRangeSlack && a.s_min < a.s_max))
    throw DomainError("frontier: need 0 <= s-min < s-max <= 2 sqrt2");
  std::vector<CertificateRecord<double>> rows;
  for (double s : linspace(a.s_min, std::min(a.s_max, kTsirelson<double>), a.points)) rows.push_back(certify(s));
  emit_table(out, frontier_table(rows), g.format);
  return {};
}

struct CertifyArgs {
  std::optional<double> s12;
  std::string trials;
  std::optional<double> s_hat;
  std::optional<std::uint64_t> n_min;
  double alpha = 0.01;
  std::string estimator = "correlator_wise";
};

Verdict cmd_certify(const CertifyArgs& a, std::ostream& out) {
  const int sources = (a.s12 ? 1 : 0) + (a.trials.empty() ? 0 : 1) + (a.s_hat || a.n_min ? 1 : 0);
  if (sources != 1) throw DomainError("certify: give exactly one of --s12, --trials, or --s-hat with --n-min");
  if (a.s12) {
    out << to_json(certify(*a.s12)).dump(2) << '\n';
    return {};
  }
  if (a.s_hat || a.n_min) {
    if (!a.s_hat || !a.n_min) throw DomainError("certify: --s-hat and --n-min go together");
    if (a.estimator != "correlator_wise") throw DomainError("certify: direct input supports the correlator_wise estimator only");
    CorrelatorStats st;
    st.s_hat = *a.s_hat;
    st.n_min = *a.n_min;
    out << to_json(lower_confidence_bound(st, a.alpha)).dump(2) << '\n';
    return {};
  }
  auto in = open_input(a.trials);
  const TrialBatch batch = read_trials_csv(in);
  FiniteDataCertificate c;
  if (a.estimator == "correlator_wise")
    c = lower_confidence_bound(estimate_correlators(batch), a.alpha);
  else if (a.estimator == "single_trial")
    c = single_trial_lcb(batch, a.alpha);
  else
    throw DomainError("certify: estimator must be correlator_wise or single_trial");
  out << to_json(c).dump(2) << '\n';
  return {};
}

struct SimulateArgs {
  std::string strategy = "bell";
  std::uint64_t n = 0;
};

Verdict cmd_simulate(const SimulateArgs& a, const Globals& g, std::ostream& out) {
  std::string description;
  const TrialSource src = parse_strategy(a.strategy, description);
  write_trials_csv(out, simulate_trials(src, a.n, g.seed, description));
  return {};
}

Verdict cmd_werner(int points, const Globals& g, std::ostream& out) {
  if (points < 2) throw DomainError("werner: points must be >= 2");
  emit_table(out, werner_table(werner_scan(linspace(0.0, 1.0, points))), g.format);
  return {};
}

struct ScanArgs {
  std::vector<double> alphas{0.0, 0.5, 1.0, 1.5};
  int grid = 60;
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  int max_iters = 100000;
};

Verdict cmd_npa_scan(const ScanArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  if (a.alphas.empty()) throw DomainError("npa-scan: no alphas given");
  if (a.grid < 2) throw DomainError("npa-scan: grid must be >= 2");
  NpaOptions opt;
  opt.sdp.abs_tol = a.abs_tol;
  opt.sdp.rel_tol = a.rel_tol;
  opt.sdp.max_iterations = a.max_iters;
  const auto rows = scan(a.alphas, a.grid, opt);
  emit_table(out, scan_table(rows), g.format);

  Verdict v;
  for (const auto& r : rows)
    if (!r.error.empty()) v.code = kExitSolver;
  if (std::find(a.alphas.begin(), a.alphas.end(), 0.0) != a.alphas.end()) {
    double max_dev = 0.0, sum = 0.0;
    int certified = 0, violations = 0;
    for (const auto& r : rows) {
      if (r.alpha != 0.0 || !r.solution.certified) continue;
      const double exact = s13_max(r.s);
      const double dev = std::abs(r.solution.primal - exact);
      if (r.solution.primal < exact - 1e-6 || dev > 1e-3) ++violations;
      max_dev = std::max(max_dev, dev);
      sum += dev;
      ++certified;
    }
    err << "alpha=0 sanity: certified " << certified << "/" << a.grid << ", max deviation " << max_dev
        << ", mean deviation " << (certified ? sum / certified : 0.0) << ", violations " << violations << '\n';
    if (violations) v.code = kExitVerification;
  }
  return v;
}

Verdict cmd_npa_dump(double alpha, double s, std::ostream& out) {
  out << problem_dump(assemble(alpha, s)).dump(2) << '\n';
  return {};
}

struct VerifyArgs {
  int instances = 100;
  std::string cls = "both";
};

Verdict cmd_verify_distance(const VerifyArgs& a, const Globals& g, std::ostream& out) {
  if (a.instances < 1) throw DomainError("verify-distance: instances must be >= 1");
  if (a.cls != "ns" && a.cls != "classical" && a.cls != "both")
    throw DomainError("verify-distance: class must be ns, classical or both");
  struct Job {
    ExtensionClass cls;
    std::uint64_t index;
    json record;
    double discrepancy = 0.0;
    bool ok = true;
  };
  std::vector<Job> jobs;
  for (int i = 0; i < a.instances; ++i) {
    if (a.cls != "classical") jobs.push_back({ExtensionClass::NoSignalling, static_cast<std::uint64_t>(i), {}});
    if (a.cls != "ns") jobs.push_back({ExtensionClass::Classical, static_cast<std::uint64_t>(i), {}});
  }
  parallel_for(jobs.size(), [&](std::size_t k) {
    Job& job = jobs[k];
    const bool classical = job.cls == ExtensionClass::Classical;
    auto gen = make_engine(derive_seed(g.seed, 2 * job.index + (classical ? 1 : 0)));
    std::optional<LhvModel> model;
    if (classical) model = random_lhv_model(gen);
    const Behavior p = classical ? lhv_behavior(*model) : random_no_signalling_behavior(gen);
    const ExtensionProblem prob{p, job.cls, {}};
    const double capacity = anticollusion_capacity(prob).value;
    const double distance = shadow_tv_distance(prob).value;
    job.discrepancy = std::abs(capacity - distance);
    job.record = {{"instance", job.index},
                  {"class", to_string(job.cls)},
                  {"behavior", to_json(p)},
                  {"capacity", capacity},
                  {"distance", distance},
                  {"discrepancy", job.discrepancy}};
    job.ok = job.discrepancy < 1e-6;
    if (classical) {
      // copied-seed colluder replays party 2's rule
      const Behavior ext = copied_seed_extension(*model, model->responses[1]);
      const Behavior p13 = relabel_13_to_12(marginal(ext, std::vector<int>{0, 2}), 2, 2);
      const double a12 = game_score(p, chsh_kernel());
      const double c13 = game_score(p13, chsh_kernel());
      const bool witness = std::abs(c13 - a12) <= 1e-14;
      job.record["copied_seed"] = {{"a12", a12}, {"c13", c13}, {"witness_ok", witness}};
      job.ok = job.ok && witness && capacity < 1e-9 && distance < 1e-9;
    }
    job.record["pass"] = job.ok;
  });
  double max_disc = 0.0;
  bool all_ok = true;
  for (const auto& job : jobs) {
    out << job.record.dump() << '\n';
    max_disc = std::max(max_disc, job.discrepancy);
    all_ok = all_ok && job.ok;
  }
  out << json{{"summary", {{"records", jobs.size()}, {"max_discrepancy", max_disc}, {"pass", all_ok}}}}.dump() << '\n';
  return {all_ok ? kExitOk : kExitVerification};
}

Verdict cmd_game_separation(std::ostream& out) {
  const GameKernel k = chsh_kernel();

  // long double keeps S12 on the Tsirelson point, where sqrt(8 - s^2) is steep
  const auto bell_ld = bell_strategy<long double>();
  const auto& o = bell_ld.observables;
  const auto cert = certify(chsh_score(bell_ld.state, o[0][0], o[0][1], o[1][0], o[1][1]));
  const double a12_q = game_score(born_behavior(bell_ld), k);
  const QuantumStrategy bell = bell_strategy();
  const auto ts = tightness_settings<double>();
  CVector<double> amp = CVector<double>::Zero(8);
  amp(0) = amp(6) = std::sqrt(0.5);
  const QuantumStrategy tri{QuantumState(Ket(amp)),
                            {bell.observables[0], bell.observables[1],
                             std::array<Observable, 2>{Observable(ts[2], 2, "C0"), Observable(ts[3], 2, "C1")}}};
  const Behavior p13_q = relabel_13_to_12(marginal(born_behavior(tri), std::vector<int>{0, 2}), 2, 2);
  const double v_q = static_cast<double>(cert.omega13_max);

  auto classical_side = [&](const LhvModel& m) {
    const Behavior p12 = lhv_behavior(m);
    const Behavior ext = copied_seed_extension(m, m.responses[1]);
    const Behavior p13 = relabel_13_to_12(marginal(ext, std::vector<int>{0, 2}), 2, 2);
    const double a = game_score(p12, k);
    const double v = game_score(p13, k);
    return json{{"behavior", to_json(p12)}, {"a12", a}, {"v_copied_seed", v}, {"u1", a - v}};
  };
  LhvModel best;
  best.weights = Eigen::VectorXd::Ones(1);
  best.responses = {{deterministic_response(std::vector<int>{0, 0}, 2)}, {deterministic_response(std::vector<int>{0, 0}, 2)}};
  LhvModel uniform;
  uniform.weights = Eigen::VectorXd::Ones(1);
  uniform.responses = {{Eigen::MatrixXd::Constant(2, 2, 0.5)}, {Eigen::MatrixXd::Constant(2, 2, 0.5)}};

  const json report = {
      {"quantum",
       {{"a12", a12_q},
        {"s12", static_cast<double>(cert.s12)},
        {"v_certified", v_q},
        {"u1", a12_q - v_q},
        {"product_extension_c13", game_score(p13_q, k)}}},
      {"classical", {{"best_chsh", classical_side(best)}, {"uniform_output", classical_side(uniform)}}},
      {"tool_version", version()}};
  out << report.dump(2) << '\n';
  return {};
}

Verdict cmd_behavior_export(const std::string& spec, std::ostream& out) {
  std::string description;
  out << to_json(source_behavior(parse_strategy(spec, description))).dump(2) << '\n';
  return {};
}

Verdict cmd_behavior_check(const std::string& path, double tol, std::ostream& out) {
  const Behavior p = behavior_from_json(read_json_file(path));
  const auto rep = check_no_signalling(p, tol);
  out << json{{"max_residual", rep.max_residual}, {"pass", rep.pass}, {"tolerance", tol}}.dump(2) << '\n';
  return {rep.pass ? kExitOk : kExitVerification};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certification toolkit for strategic non-shareability of Bell correlations", "shadowcert"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(version()));

  Globals g;
  app.add_option("--format", g.format, "Table output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", g.out_path, "Output file (default stdout)");
  app.add_option("--seed", g.seed, "Random seed");

  FrontierArgs fa;
  auto* frontier = app.add_subcommand("frontier", "Certified CHSH frontier table");
  frontier->add_option("--s-min", fa.s_min);
  frontier->add_option("--s-max", fa.s_max);
  frontier->add_option("--points", fa.points)->check(CLI::Range(2, 10000000));

  CertifyArgs ca;
  auto* certify_cmd = app.add_subcommand("certify", "Analytic or finite-data certificate");
  certify_cmd->add_option("--s12", ca.s12, "Authorized CHSH score");
  certify_cmd->add_option("--trials", ca.trials, "Trial CSV file (x,y,a,b)");
  certify_cmd->add_option("--s-hat", ca.s_hat, "Estimated CHSH score");
  certify_cmd->add_option("--n-min", ca.n_min, "Smallest per-setting sample count");
  certify_cmd->add_option("--alpha", ca.alpha, "Failure probability");
  certify_cmd->add_option("--estimator", ca.estimator)->check(CLI::IsMember({"correlator_wise", "single_trial"}));

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Simulate CHSH trials");
  simulate->add_option("--strategy", sa.strategy, "bell | werner:ETA | lhv:FILE");
  simulate->add_option("--n", sa.n, "Number of trials")->required();

  int werner_points = 101;
  auto* werner = app.add_subcommand("werner", "Werner-noise gap scan");
  werner->add_option("--points", werner_points);

  ScanArgs na;
  auto* npa_scan = app.add_subcommand("npa-scan", "Tilted-CHSH level-2 scan with diagnostics");
  npa_scan->add_option("--alphas", na.alphas, "Comma-separated tilts")->delimiter(',');
  npa_scan->add_option("--grid", na.grid, "Thresholds per tilt");
  npa_scan->add_option("--abs-tol", na.abs_tol);
  npa_scan->add_option("--rel-tol", na.rel_tol);
  npa_scan->add_option("--max-iters", na.max_iters);

  double dump_alpha = 0.0, dump_s = 2.0;
  auto* npa_dump = app.add_subcommand("npa-dump", "Moment problem as JSON");
  npa_dump->add_option("--alpha", dump_alpha);
  npa_dump->add_option("--s", dump_s);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify-distance", "Capacity vs. shadow distance on random instances");
  verify->add_option("--instances", va.instances);
  verify->add_option("--class", va.cls)->check(CLI::IsMember({"ns", "classical", "both"}));

  auto* game = app.add_subcommand("game-separation", "Classical vs. quantum payoff separation");

  auto* behavior = app.add_subcommand("behavior", "Behavior import/export");
  behavior->require_subcommand(1);
  std::string export_spec = "bell", check_path;
  double check_tol = 1e-9;
  auto* bexport = behavior->add_subcommand("export", "Behavior JSON of a strategy");
  bexport->add_option("--strategy", export_spec, "bell | werner:ETA | lhv:FILE");
  auto* bcheck = behavior->add_subcommand("check", "No-signalling check of a behavior JSON file");
  bcheck->add_option("file", check_path)->required();
  bcheck->add_option("--tol", check_tol);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  std::ostringstream buffer;
  Verdict v;
  try {
    if (*frontier)
      v = cmd_frontier(fa, g, buffer);
    else if (*certify_cmd)
      v = cmd_certify(ca, buffer);
    else if (*simulate)
      v = cmd_simulate(sa, g, buffer);
    else if (*werner)
      v = cmd_werner(werner_points, g, buffer);
    else if (*npa_scan)
      v = cmd_npa_scan(na, g, buffer, err);
    else if (*npa_dump)
      v = cmd_npa_dump(dump_alpha, dump_s, buffer);
    else if (*verify)
      v = cmd_verify_distance(va, g, buffer);
    else if (*game)
      v = cmd_game_separation(buffer);
    else if (*bexport)
      v = cmd_behavior_export(export_spec, buffer);
    else if (*bcheck)
      v = cmd_behavior_check(check_path, check_tol, buffer);
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const InfeasibleError& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  if (g.out_path.empty()) {
    out << buffer.str();
  } else {
    std::ofstream f(g.out_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << g.out_path << "'\n";
      return kExitInput;
    }
    f << buffer.str();
  }
  return v.code;
}

}  // namespace shadowcert::cli
