#include "tkz/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "tkz/errors.hpp"

namespace tkz::io {
namespace {

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

template <typename T>
T get_as(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("field \"") + what + "\" has the wrong type");
  }
}

}  // namespace

json to_json(cplx z) { return json::array({real_to_json(z.real()), real_to_json(z.imag())}); }

cplx complex_from(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {real_from(j[0]), real_from(j[1])};
  if (j.is_object() && j.contains("num")) return {rational_from(j).to_double(), 0.0};
  throw ConfigError("expected a complex number [re, im], got " + j.dump());
}

json to_json(const Rational& r) { return json{{"num", r.num()}, {"den", r.den()}}; }

Rational rational_from(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_object()) {
    const auto num = get_as<std::int64_t>(need(j, "num"), "num");
    const auto den = j.contains("den") ? get_as<std::int64_t>(j.at("den"), "den") : 1;
    if (den == 0) throw ConfigError("rational with zero denominator");
    return Rational(num, den);
  }
  throw ConfigError("expected a rational {\"num\", \"den\"}, got " + j.dump());
}

json to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from(const json& j) {
  if (!j.is_array()) throw ConfigError("expected a matrix (array of rows)");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols) throw ConfigError("ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from(j[r][c]);
  }
  return m;
}

json to_json(const std::vector<cplx>& v) {
  json a = json::array();
  for (auto z : v) a.push_back(to_json(z));
  return a;
}

std::vector<cplx> cvector_from(const json& j) {
  if (!j.is_array()) throw ConfigError("expected an array of complex numbers");
  std::vector<cplx> v;
  for (const auto& e : j) v.push_back(complex_from(e));
  return v;
}

json real_to_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double real_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ConfigError("expected a real number, got " + j.dump());
}

json to_json(const rcalc::RElement& f) {
  const int n = f.num_vars();
  json terms = json::array();
  for (const auto& [key, c] : f.terms()) {
    json diffs = json::object();
    for (int i = 0; i < n; ++i)
      for (int k = i + 1; k < n; ++k) {
        const auto m = key.diffs[rcalc::pair_index(n, i, k)];
        if (m != 0) diffs[std::to_string(i + 1) + "," + std::to_string(k + 1)] = m;
      }
    terms.push_back(json{{"coeff", to_json(c)}, {"powers", key.powers}, {"diffs", diffs}});
  }
  return json{{"n", n}, {"t", f.root_order()}, {"terms", terms}};
}

rcalc::RElement relement_from(const json& j) {
  const int n = get_as<int>(need(j, "n"), "n");
  const int t = get_as<int>(need(j, "t"), "t");
  if (n < 1 || t < 1) throw ConfigError("RElement needs n >= 1 and t >= 1");
  rcalc::RElement f(n, t);
  for (const auto& term : need(j, "terms")) {
    rcalc::MonomialKey key;
    key.powers = get_as<std::vector<std::int64_t>>(need(term, "powers"), "powers");
    if (static_cast<int>(key.powers.size()) != n) throw ConfigError("RElement term has the wrong number of powers");
    key.diffs.assign(static_cast<std::size_t>(rcalc::pair_count(n)), 0);
    if (term.contains("diffs")) {
      for (const auto& [label, m] : term.at("diffs").items()) {
        int i = 0, k = 0;
        char comma = 0;
        std::istringstream is(label);
        if (!(is >> i >> comma >> k) || comma != ',' || i < 1 || k < 1 || i > n || k > n || i == k)
          throw ConfigError("bad difference label \"" + label + "\"");
        if (i > k) throw ConfigError("difference labels must be written with the smaller index first");
        key.diffs[rcalc::pair_index(n, i - 1, k - 1)] = get_as<std::int64_t>(m, "diffs");
      }
    }
    f += rcalc::RElement::monomial(n, t, key, complex_from(need(term, "coeff")));
  }
  return f;
}

json to_json(const rcalc::RMatrix& m) {
  json entries = json::array();
  for (const auto& e : m.entries) entries.push_back(to_json(e));
  return json{{"rows", m.rows}, {"cols", m.cols}, {"entries", entries}};
}

rcalc::RMatrix rmatrix_from(const json& j) {
  const int rows = get_as<int>(need(j, "rows"), "rows");
  const int cols = get_as<int>(need(j, "cols"), "cols");
  const auto& entries = need(j, "entries");
  if (!entries.is_array() || static_cast<int>(entries.size()) != rows * cols)
    throw ConfigError("RMatrix entry count does not match rows * cols");
  rcalc::RMatrix m;
  m.rows = rows;
  m.cols = cols;
  for (const auto& e : entries) m.entries.push_back(relement_from(e));
  return m;
}

json to_json(const connection::ConnectionSystem& conn) {
  json alpha = json::array();
  for (const auto& a : conn.alpha) alpha.push_back(to_json(a));
  json a = json::array();
  for (const auto& m : conn.A) a.push_back(to_json(m));
  return json{{"format", "tkz-connection-1"}, {"n", conn.n},         {"t", conn.t},
              {"state_dim", conn.state_dim},  {"dims", conn.dims},   {"alpha", alpha},
              {"description", conn.description}, {"A", a}};
}

connection::ConnectionSystem connection_from(const json& j) {
  connection::ConnectionSystem c;
  c.n = get_as<int>(need(j, "n"), "n");
  c.t = get_as<int>(need(j, "t"), "t");
  c.state_dim = get_as<int>(need(j, "state_dim"), "state_dim");
  if (j.contains("dims")) c.dims = get_as<std::vector<int>>(j.at("dims"), "dims");
  if (j.contains("alpha"))
    for (const auto& a : j.at("alpha")) c.alpha.push_back(rational_from(a));
  if (j.contains("description")) c.description = get_as<std::string>(j.at("description"), "description");
  for (const auto& m : need(j, "A")) c.A.push_back(rmatrix_from(m));
  if (static_cast<int>(c.A.size()) != c.n) throw ConfigError("connection must have one matrix per variable");
  for (const auto& m : c.A)
    if (m.rows != c.state_dim || m.cols != c.state_dim) throw ConfigError("connection matrix has the wrong size");
  return c;
}

json to_json(const ChangeOfVariables& cov) {
  json delta = json::array();
  for (bool inf : cov.at_infinity) delta.push_back(inf ? "inf" : "0");
  std::vector<cplx> beta(cov.beta.data(), cov.beta.data() + cov.beta.size());
  return json{{"A", to_json(cov.A)}, {"beta", to_json(beta)}, {"delta", delta}, {"t", cov.t}};
}

ChangeOfVariables change_from(const json& j) {
  CMatrix a = matrix_from(need(j, "A"));
  const int n = static_cast<int>(a.rows());
  CVector beta = CVector::Zero(n);
  if (j.contains("beta")) {
    auto b = cvector_from(j.at("beta"));
    if (static_cast<int>(b.size()) != n) throw ConfigError("beta has the wrong length");
    for (int i = 0; i < n; ++i) beta(i) = b[i];
  }
  std::vector<bool> inf(n, false);
  if (j.contains("delta")) {
    const auto& d = j.at("delta");
    if (!d.is_array() || static_cast<int>(d.size()) != n) throw ConfigError("delta has the wrong length");
    for (int i = 0; i < n; ++i) {
      const auto s = d[i].is_string() ? d[i].get<std::string>() : d[i].dump();
      if (s == "inf") inf[i] = true;
      else if (s != "0") throw ConfigError("delta entries must be \"0\" or \"inf\"");
    }
  }
  const int t = j.contains("t") ? get_as<int>(j.at("t"), "t") : 1;
  return make_change(a, beta, inf, t);
}

json to_json(const rcalc::MatrixSeries& s) {
  auto cut = [](std::int64_t c) { return c >= rcalc::kNoCutoff ? json(nullptr) : json(c); };
  json cutoffs = json::array(), lower = json::array();
  for (auto c : s.cutoffs()) cutoffs.push_back(cut(c));
  for (auto c : s.lower()) lower.push_back(cut(c));
  json terms = json::array();
  for (const auto& [key, m] : s.terms()) {
    json t{{"exps", key.exps}, {"coeff", to_json(m)}};
    bool any_log = false;
    for (auto l : key.logs) any_log = any_log || l != 0;
    if (any_log) t["logs"] = key.logs;
    terms.push_back(std::move(t));
  }
  return json{{"n", s.num_vars()}, {"den", s.den()}, {"cutoffs", cutoffs}, {"lower", lower}, {"terms", terms}};
}

rcalc::MatrixSeries matrix_series_from(const json& j) {
  const int n = get_as<int>(need(j, "n"), "n");
  const int den = get_as<int>(need(j, "den"), "den");
  auto read = [&](const char* key) {
    std::vector<std::int64_t> v;
    for (const auto& c : need(j, key)) v.push_back(c.is_null() ? rcalc::kNoCutoff : get_as<std::int64_t>(c, key));
    if (static_cast<int>(v.size()) != n) throw ConfigError(std::string(key) + " has the wrong length");
    return v;
  };
  rcalc::MatrixSeries s(n, den, read("cutoffs"), read("lower"));
  for (const auto& t : need(j, "terms")) {
    rcalc::SeriesKey key;
    key.exps = get_as<std::vector<std::int64_t>>(need(t, "exps"), "exps");
    key.logs = t.contains("logs") ? get_as<std::vector<int>>(t.at("logs"), "logs") : std::vector<int>(n, 0);
    if (static_cast<int>(key.exps.size()) != n || static_cast<int>(key.logs.size()) != n)
      throw ConfigError("series term has the wrong number of exponents");
    s.add_term(key, matrix_from(need(t, "coeff")));
  }
  return s;
}

json to_json(const singular::TransformedSystem& ts) {
  json cutoffs = json::array(), comps = json::array();
  for (const auto& c : ts.cutoffs) cutoffs.push_back(to_json(c));
  for (const auto& b : ts.B) comps.push_back(to_json(b));
  return json{{"format", "tkz-transformed-1"}, {"change", to_json(ts.cov)},   {"state_dim", ts.state_dim},
              {"den", ts.den},                 {"cutoffs", cutoffs},         {"branches", ts.options.branches},
              {"hypothesis", ts.hypothesis()}, {"components", comps}};
}

singular::TransformedSystem transformed_from(const json& j) {
  singular::TransformedSystem ts;
  ts.cov = change_from(need(j, "change"));
  ts.state_dim = get_as<int>(need(j, "state_dim"), "state_dim");
  ts.den = get_as<int>(need(j, "den"), "den");
  for (const auto& c : need(j, "cutoffs")) ts.cutoffs.push_back(rational_from(c));
  if (j.contains("branches")) ts.options.branches = get_as<std::vector<int>>(j.at("branches"), "branches");
  for (const auto& b : need(j, "components")) ts.B.push_back(matrix_series_from(b));
  if (ts.size() != ts.cov.size()) throw ConfigError("transformed system needs one component per variable");
  return ts;
}

json to_json(const singular::Verdict& v) {
  json offenders = json::array();
  for (const auto& o : v.offenders) {
    json e = json::array();
    for (const auto& r : o.exponents) e.push_back(to_json(r));
    offenders.push_back(json{{"component", o.component + 1}, {"exponents", e}, {"magnitude", o.magnitude}});
  }
  json mins = json::array();
  for (const auto& comp : v.min_exponents) {
    json row = json::array();
    for (const auto& m : comp) row.push_back(m ? to_json(*m) : json(nullptr));
    mins.push_back(std::move(row));
  }
  return json{{"holomorphic", v.holomorphic}, {"offenders", offenders}, {"min_exponents", mins}};
}

json to_json(const singular::IndicialData& d) {
  json exact = json::array();
  for (const auto& e : d.exact) exact.push_back(e ? to_json(*e) : json(nullptr));
  return json{{"H0", to_json(d.H0)}, {"exponents", to_json(d.exponents)}, {"exact", exact}, {"resonant", d.resonant}};
}

json to_json(const frobenius::FrobeniusSolution& sol) {
  json s = json::array();
  for (const auto& m : sol.S) s.push_back(to_json(m));
  return json{{"format", "tkz-frobenius-1"},
              {"Lambda", to_json(sol.Lambda)},
              {"T", to_json(sol.T)},
              {"shifts", sol.shifts},
              {"order", sol.order},
              {"radius", real_to_json(sol.radius)},
              {"coefficient_radius", real_to_json(sol.coefficient_radius)},
              {"resonant", sol.resonant},
              {"log_depth", sol.log_depth},
              {"S", s}};
}

json to_json(const transport::PathSpec& p) {
  json v = json::array();
  for (const auto& x : p.vertices) v.push_back(to_json(x));
  return json{{"vertices", v}, {"branch_start", p.branch_start}, {"avoid_margin", p.avoid_margin}};
}

transport::PathSpec path_from(const json& j) {
  transport::PathSpec p;
  for (const auto& v : need(j, "vertices")) p.vertices.push_back(cvector_from(v));
  if (j.contains("branch_start")) p.branch_start = get_as<std::vector<int>>(j.at("branch_start"), "branch_start");
  if (j.contains("avoid_margin")) p.avoid_margin = real_from(j.at("avoid_margin"));
  transport::validate_path(p);
  return p;
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_file(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

}  // namespace tkz::io
