#include "shadowcert/npa.hpp"

#include "shadowcert/errors.hpp"
#include "shadowcert/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace shadowcert {

std::string to_string(const Word& w) {
  if (w.empty()) return "I";
  std::string out;
  for (const auto& l : w) {
    out += static_cast<char>('A' + static_cast<int>(l.party));
    out += static_cast<char>('0' + l.setting);
  }
  return out;
}

Word parse_word(const std::string& text) {
  if (text == "I" || text.empty()) return {};
  if (text.size() % 2 != 0) throw ParseError("word: expected letter/setting pairs, got '" + text + "'");
  Word w;
  for (std::size_t i = 0; i < text.size(); i += 2) {
    const char p = text[i], s = text[i + 1];
    if (p < 'A' || p > 'C' || (s != '0' && s != '1')) throw ParseError("word: invalid letter in '" + text + "'");
    w.push_back({static_cast<NpaParty>(p - 'A'), static_cast<std::uint8_t>(s - '0')});
  }
  return w;
}

Word adjoint(const Word& w) { return Word(w.rbegin(), w.rend()); }

namespace {

Word reduce(Word w) {
  while (true) {
    std::stable_sort(w.begin(), w.end(), [](const Letter& a, const Letter& b) { return a.party < b.party; });
    Word out;
    for (const auto& l : w) {
      if (!out.empty() && out.back() == l)
        out.pop_back();
      else
        out.push_back(l);
    }
    if (out == w) return out;
    w = std::move(out);
  }
}

}  // namespace

CanonicalWord canonicalize(const Word& w) {
  Word a = reduce(w);
  Word b = reduce(adjoint(a));
  if (b < a) return {std::move(b), true};
  return {std::move(a), false};
}

std::vector<Word> build_word_set(int level) {
  if (level != 1 && level != 2) throw DomainError("build_word_set: level must be 1 or 2");
  const NpaParty parties[] = {NpaParty::A, NpaParty::B, NpaParty::C};
  std::vector<Word> words{{}};
  for (auto p : parties)
    for (std::uint8_t x = 0; x < 2; ++x) words.push_back({{p, x}});
  if (level == 1) return words;
  for (auto p : parties) words.push_back({{p, 0}, {p, 1}});
  const std::pair<NpaParty, NpaParty> pairs[] = {
      {NpaParty::A, NpaParty::B}, {NpaParty::A, NpaParty::C}, {NpaParty::B, NpaParty::C}};
  for (const auto& [p, q] : pairs)
    for (std::uint8_t x = 0; x < 2; ++x)
      for (std::uint8_t y = 0; y < 2; ++y) words.push_back({{p, x}, {q, y}});
  return words;
}

MomentStructure::MomentStructure(int level) : level_(level), words_(build_word_set(level)) {
  const auto n = static_cast<Eigen::Index>(words_.size());
  entry_.resize(n, n);
  std::map<Word, int> ids;
  ids[Word{}] = 0;
  variables_.push_back(Word{});
  self_adjoint_.push_back(true);
  for (Eigen::Index u = 0; u < n; ++u)
    for (Eigen::Index v = 0; v < n; ++v) {
      Word prod = adjoint(words_[static_cast<std::size_t>(u)]);
      const auto& wv = words_[static_cast<std::size_t>(v)];
      prod.insert(prod.end(), wv.begin(), wv.end());
      const auto key = canonicalize(prod).word;
      auto [it, inserted] = ids.emplace(key, static_cast<int>(variables_.size()));
      if (inserted) {
        variables_.push_back(key);
        self_adjoint_.push_back(reduce(adjoint(key)) == key);
      }
      entry_(u, v) = it->second;
    }
}

std::optional<int> MomentStructure::find(const Word& w) const {
  const auto key = canonicalize(w).word;
  const auto it = std::find(variables_.begin(), variables_.end(), key);
  if (it == variables_.end()) return std::nullopt;
  return static_cast<int>(it - variables_.begin());
}

int MomentStructure::at(const std::string& word) const {
  const auto id = find(parse_word(word));
  if (!id) throw DomainError("moment structure: word '" + word + "' has no variable");
  return *id;
}

Eigen::MatrixXd MomentStructure::moment_matrix(const Eigen::VectorXd& moments) const {
  if (moments.size() != variable_count()) throw DimensionError("moment_matrix: wrong moment vector length");
  Eigen::MatrixXd g(entry_.rows(), entry_.cols());
  for (Eigen::Index u = 0; u < g.rows(); ++u)
    for (Eigen::Index v = 0; v < g.cols(); ++v) g(u, v) = moments(entry_(u, v));
  return g;
}

Eigen::VectorXd tilted_chsh(const MomentStructure& st, double alpha, NpaParty other) {
  const char o = static_cast<char>('A' + static_cast<int>(other));
  auto w = [&](int x, int y) { return std::string("A") + char('0' + x) + o + char('0' + y); };
  Eigen::VectorXd c = Eigen::VectorXd::Zero(st.variable_count());
  c(st.at("A0")) += alpha;
  c(st.at(w(0, 0))) += 1.0;
  c(st.at(w(0, 1))) += 1.0;
  c(st.at(w(1, 0))) += 1.0;
  c(st.at(w(1, 1))) -= 1.0;
  return c;
}

double tilted_classical_bound(double alpha) { return 2.0 + alpha; }
double tilted_quantum_bound(double alpha) { return std::sqrt(8.0 + 2.0 * alpha * alpha); }

MomentProblem assemble(std::shared_ptr<const MomentStructure> structure, double alpha, double s) {
  if (!(alpha >= 0.0 && alpha <= 2.0)) throw DomainError("assemble: alpha must lie in [0,2]");
  if (!std::isfinite(s) || s > tilted_quantum_bound(alpha) + 1e-9)
    throw DomainError("assemble: threshold s exceeds the quantum maximum sqrt(8+2 alpha^2)");
  MomentProblem p;
  p.alpha = alpha;
  p.s = s;
  p.objective = tilted_chsh(*structure, alpha, NpaParty::C);
  p.authorized = tilted_chsh(*structure, alpha, NpaParty::B);
  p.structure = std::move(structure);
  return p;
}

MomentProblem assemble(double alpha, double s, int level) {
  return assemble(std::make_shared<const MomentStructure>(level), alpha, s);
}

SdpProblem to_sdp(const MomentProblem& problem) {
  const auto& st = *problem.structure;
  const Eigen::Index n = st.size();
  const Eigen::Index m = st.variable_count() - 1;
  SdpProblem sdp;
  sdp.c = Eigen::MatrixXd::Zero(n + 1, n + 1);
  sdp.a.assign(static_cast<std::size_t>(m), Eigen::MatrixXd::Zero(n + 1, n + 1));
  for (Eigen::Index u = 0; u < n; ++u)
    for (Eigen::Index v = 0; v < n; ++v) {
      const int id = st.entry()(u, v);
      if (id == 0)
        sdp.c(u, v) = 1.0;
      else
        sdp.a[static_cast<std::size_t>(id - 1)](u, v) = -1.0;
    }
  sdp.c(n, n) = -problem.s;
  sdp.b.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    sdp.a[static_cast<std::size_t>(k)](n, n) = -problem.authorized(k + 1);
    sdp.b(k) = problem.objective(k + 1);
  }
  return sdp;
}

MomentSolution solve(const MomentProblem& problem, const NpaOptions& options) {
  const SdpProblem sdp = to_sdp(problem);
  const SdpResult r = sdp_solve(sdp, options.sdp);
  MomentSolution sol;
  sol.status = r.status;
  sol.iterations = r.iterations;
  sol.moments.resize(problem.structure->variable_count());
  sol.moments(0) = 1.0;
  sol.moments.tail(r.y.size()) = r.y;
  sol.primal = problem.objective.dot(sol.moments);
  sol.dual = r.primal_objective;
  sol.dual_available =
      (r.status == SdpStatus::Optimal || r.status == SdpStatus::OptimalInaccurate) && r.x.allFinite();
  sol.gap = std::abs(sol.dual - sol.primal);

  Eigen::VectorXd certificate_residual(sdp.constraints());
  for (Eigen::Index k = 0; k < sdp.constraints(); ++k)
    certificate_residual(k) = sdp.a[static_cast<std::size_t>(k)].cwiseProduct(r.x).sum() - sdp.b(k);
  const double authorized_violation = std::max(0.0, problem.s - problem.authorized.dot(sol.moments));
  sol.max_residual = std::max(authorized_violation,
                              certificate_residual.size() ? certificate_residual.cwiseAbs().maxCoeff() : 0.0);
  const Eigen::MatrixXd gamma = problem.structure->moment_matrix(sol.moments);
  sol.min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gamma, Eigen::EigenvaluesOnly).eigenvalues()(0);
  sol.certified = certify_point(sol, options.certificate);
  return sol;
}

bool certify_point(const MomentSolution& sol, const CertificateTolerances& tol) {
  return sol.status == SdpStatus::Optimal && sol.dual_available && sol.gap < tol.gap &&
         sol.max_residual < tol.residual && sol.min_eig >= -tol.psd;
}

std::vector<double> threshold_grid(double alpha, int points) {
  if (points < 2) throw DomainError("threshold_grid: need at least 2 points");
  const double lo = tilted_classical_bound(alpha), hi = tilted_quantum_bound(alpha);
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) grid[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (points - 1);
  grid.back() = hi;
  return grid;
}

std::vector<ScanRow> scan(const std::vector<double>& alphas, int grid_points, const NpaOptions& options) {
  for (double a : alphas)
    if (!(a >= 0.0 && a <= 2.0)) throw DomainError("scan: alpha must lie in [0,2]");
  const auto structure = std::make_shared<const MomentStructure>(2);
  std::vector<ScanRow> rows;
  for (double a : alphas)
    for (double s : threshold_grid(a, grid_points)) rows.push_back({a, s, {}, {}});
  parallel_for(rows.size(), [&](std::size_t i) {
    auto& row = rows[i];
    try {
      row.solution = solve(assemble(structure, row.alpha, row.s), options);
    } catch (const std::exception& e) {
      row.error = e.what();
      row.solution.certified = false;
    }
  });
  return rows;
}

SanityReport alpha0_sanity(int grid_points, const NpaOptions& options) {
  SanityReport rep;
  rep.rows = scan({0.0}, grid_points, options);
  double sum = 0.0;
  int count = 0;
  for (const auto& row : rep.rows) {
    rep.certified_mask.push_back(row.solution.certified);
    if (!row.solution.certified) continue;
    const double exact = std::sqrt(std::max(0.0, (2.0 * std::sqrt(2.0) - row.s) * (2.0 * std::sqrt(2.0) + row.s)));
    const double dev = std::abs(row.solution.primal - exact);
    rep.max_dev = std::max(rep.max_dev, dev);
    sum += dev;
    ++count;
  }
  rep.mean_dev = count ? sum / count : 0.0;
  return rep;
}

}  // namespace shadowcert
