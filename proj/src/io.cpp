#include "shadowcert/io.hpp"

#include "shadowcert/errors.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#ifndef SHADOWCERT_VERSION
#define SHADOWCERT_VERSION "0.0.0"
#endif

namespace shadowcert {

using nlohmann::json;

const char* version() { return SHADOWCERT_VERSION; }

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

double parse_double(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ParseError("csv: trailing characters in number '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    throw ParseError("csv: not a number: '" + s + "'");
  } catch (const std::out_of_range&) {
    // denormals and overflow still carry a value
    return std::strtod(s.c_str(), nullptr);
  }
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError("csv: not an integer: '" + s + "'");
  return v;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ParseError("csv: missing column '" + name + "'");
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  return parse_double(rows.at(row).at(column(name)));
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim_cr(line);
    if (line.empty()) continue;
    auto fields = split(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size())
      throw ParseError("csv: line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                       " fields, expected " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(fields));
  }
  if (!have_header) throw ParseError("csv: empty input");
  return t;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto line = [&](const std::vector<std::string>& f) {
    for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << f[i];
    out << '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
}

void write_trials_csv(std::ostream& out, const TrialBatch& batch) {
  batch.validate();
  out << "x,y,a,b\n";
  for (const auto& t : batch.trials)
    out << int(t.x) << ',' << int(t.y) << ',' << int(t.a) << ',' << int(t.b) << '\n';
}

TrialBatch read_trials_csv(std::istream& in) {
  const CsvTable t = read_csv(in);
  if (t.header != std::vector<std::string>{"x", "y", "a", "b"}) throw ParseError("trials: header must be x,y,a,b");
  TrialBatch batch;
  batch.source = "file";
  batch.trials.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    const int x = parse_int(r[0]), y = parse_int(r[1]), a = parse_int(r[2]), b = parse_int(r[3]);
    if ((x != 0 && x != 1) || (y != 0 && y != 1) || (a != 1 && a != -1) || (b != 1 && b != -1))
      throw ParseError("trials: row " + std::to_string(i + 1) + " out of range");
    batch.trials.push_back(
        {static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y), static_cast<std::int8_t>(a), static_cast<std::int8_t>(b)});
  }
  return batch;
}

json to_json(const Behavior& p) {
  json table = json::array();
  for (Eigen::Index r = 0; r < p.table().rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < p.table().cols(); ++c) row.push_back(p.table()(r, c));
    table.push_back(std::move(row));
  }
  return {{"parties", p.parties()}, {"inputs", p.inputs()}, {"outputs", p.outputs()}, {"table", std::move(table)}};
}

Behavior behavior_from_json(const json& j) {
  try {
    const auto inputs = j.at("inputs").get<std::vector<int>>();
    const auto outputs = j.at("outputs").get<std::vector<int>>();
    if (j.contains("parties") && j.at("parties").get<std::size_t>() != inputs.size())
      throw ParseError("behavior json: 'parties' disagrees with alphabet lists");
    const auto rows = j.at("table").get<std::vector<std::vector<double>>>();
    Eigen::MatrixXd table(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<Eigen::Index>(rows[r].size()) != table.cols()) throw ParseError("behavior json: ragged table");
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        table(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return Behavior(inputs, outputs, std::move(table));
  } catch (const json::exception& e) {
    throw ParseError(std::string("behavior json: ") + e.what());
  }
}

json to_json(const LhvModel& m) {
  json responses = json::array();
  for (const auto& party : m.responses) {
    json lambdas = json::array();
    for (const auto& r : party) {
      json rows = json::array();
      for (Eigen::Index t = 0; t < r.rows(); ++t) {
        json row = json::array();
        for (Eigen::Index x = 0; x < r.cols(); ++x) row.push_back(r(t, x));
        rows.push_back(std::move(row));
      }
      lambdas.push_back(std::move(rows));
    }
    responses.push_back(std::move(lambdas));
  }
  return {{"weights", std::vector<double>(m.weights.data(), m.weights.data() + m.weights.size())},
          {"responses", std::move(responses)}};
}

LhvModel lhv_model_from_json(const json& j) {
  try {
    LhvModel m;
    const auto w = j.at("weights").get<std::vector<double>>();
    m.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    for (const auto& party : j.at("responses")) {
      ResponseTable table;
      for (const auto& lam : party) {
        const auto rows = lam.get<std::vector<std::vector<double>>>();
        if (rows.empty()) throw ParseError("lhv json: empty response table");
        Eigen::MatrixXd r(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
        for (std::size_t t = 0; t < rows.size(); ++t) {
          if (static_cast<Eigen::Index>(rows[t].size()) != r.cols()) throw ParseError("lhv json: ragged response table");
          for (std::size_t x = 0; x < rows[t].size(); ++x)
            r(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(x)) = rows[t][x];
        }
        table.push_back(std::move(r));
      }
      m.responses.push_back(std::move(table));
    }
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("lhv json: ") + e.what());
  }
}

json to_json(const FiniteDataCertificate& c) {
  return {{"s_hat", c.s_hat},
          {"radius", c.radius},
          {"s_lcb", c.s_lcb},
          {"s_cert", c.s_cert},
          {"gamma_lcb", c.gamma_lcb},
          {"confidence", c.confidence},
          {"n_min", c.n_min},
          {"estimator", to_string(c.estimator)},
          {"assumptions", kCertificateAssumptions},
          {"tool_version", version()}};
}

json to_json(const CertificateRecord<double>& c) {
  json prov = std::visit(
      [](const auto& p) -> json {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, FiniteDataProvenance>)
          return {{"kind", "finite_data"}, {"confidence", p.confidence}, {"n_min", p.n_min}};
        else
          return {{"kind", "analytic"}};
      },
      c.provenance);
  return {{"s12", c.s12},
          {"s13_max", c.s13_max},
          {"omega12", c.omega12},
          {"omega13_max", c.omega13_max},
          {"gamma_plus", c.gamma_plus},
          {"regime", to_string(c.regime)},
          {"provenance", std::move(prov)},
          {"tool_version", version()}};
}

json problem_dump(const MomentProblem& p) {
  const auto& st = *p.structure;
  json words = json::array();
  for (const auto& w : st.words()) words.push_back(to_string(w));
  json vars = json::array();
  for (int i = 0; i < st.variable_count(); ++i)
    vars.push_back({{"id", i}, {"word", to_string(st.variables()[static_cast<std::size_t>(i)])}, {"self_adjoint", st.self_adjoint(i)}});
  json entry = json::array();
  for (Eigen::Index u = 0; u < st.entry().rows(); ++u) {
    json row = json::array();
    for (Eigen::Index v = 0; v < st.entry().cols(); ++v) row.push_back(st.entry()(u, v));
    entry.push_back(std::move(row));
  }
  auto sparse = [](const Eigen::VectorXd& c) {
    json out = json::object();
    for (Eigen::Index i = 0; i < c.size(); ++i)
      if (c(i) != 0.0) out[std::to_string(i)] = c(i);
    return out;
  };
  return {{"level", st.level()},
          {"alpha", p.alpha},
          {"s", p.s},
          {"words", std::move(words)},
          {"variables", std::move(vars)},
          {"entry", std::move(entry)},
          {"fixed", {{"variable", 0}, {"value", 1.0}}},
          {"objective", {{"sense", "maximize"}, {"coefficients", sparse(p.objective)}}},
          {"constraints",
           json::array({{{"kind", "psd"}, {"matrix", "entry"}},
                        {{"kind", "linear_ge"}, {"coefficients", sparse(p.authorized)}, {"rhs", p.s}}})}};
}

CsvTable frontier_table(const std::vector<CertificateRecord<double>>& rows) {
  CsvTable t{{"s", "s13_max", "omega12", "omega13_max", "gamma_plus"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({format_number(r.s12), format_number(r.s13_max), format_number(r.omega12),
                      format_number(r.omega13_max), format_number(r.gamma_plus)});
  return t;
}

CsvTable werner_table(const std::vector<WernerRecord<double>>& rows) {
  CsvTable t{{"eta", "s12", "a12", "c13_max", "gap"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({format_number(r.eta), format_number(r.s12), format_number(r.a12), format_number(r.c13_max_bound),
                      format_number(r.gap)});
  return t;
}

CsvTable scan_table(const std::vector<ScanRow>& rows) {
  CsvTable t{{"alpha", "s", "primal", "dual", "gap", "max_residual", "min_eig", "status", "certified"}, {}};
  for (const auto& r : rows) {
    const auto& s = r.solution;
    const std::string status = r.error.empty() ? to_string(s.status) : "error";
    t.rows.push_back({format_number(r.alpha), format_number(r.s), format_number(s.primal), format_number(s.dual),
                      format_number(s.gap), format_number(s.max_residual), format_number(s.min_eig), status,
                      s.certified ? "yes" : "no"});
  }
  return t;
}

std::vector<ScanCsvRow> parse_scan_table(const CsvTable& t) {
  std::vector<ScanCsvRow> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string cert = t.rows[i][t.column("certified")];
    if (cert != "yes" && cert != "no") throw ParseError("scan csv: certified must be yes or no");
    out.push_back({t.number(i, "alpha"), t.number(i, "s"), t.number(i, "primal"), t.number(i, "dual"), t.number(i, "gap"),
                   t.number(i, "max_residual"), t.number(i, "min_eig"), t.rows[i][t.column("status")], cert == "yes"});
  }
  return out;
}

}  // namespace shadowcert
