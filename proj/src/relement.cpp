#include "tkz/relement.hpp"

#include <cmath>
#include <sstream>

#include "tkz/errors.hpp"

namespace tkz::rcalc {

namespace {

cplx ipow(cplx base, std::int64_t e) {
  bool inv = e < 0;
  std::uint64_t k = static_cast<std::uint64_t>(inv ? -e : e);
  cplx result{1.0, 0.0};
  while (k) {
    if (k & 1U) result *= base;
    base *= base;
    k >>= 1U;
  }
  return inv ? cplx{1.0, 0.0} / result : result;
}

}  // namespace

int pair_count(int n) { return n * (n - 1) / 2; }

int pair_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

RElement::RElement(int num_vars, int t) : n_(num_vars), t_(t) {
  if (num_vars < 0 || t <= 0) throw ConfigError("RElement: need num_vars >= 0 and t >= 1");
}

RElement RElement::constant(int num_vars, int t, cplx c) {
  RElement out(num_vars, t);
  MonomialKey key{std::vector<std::int64_t>(num_vars, 0), std::vector<std::int64_t>(pair_count(num_vars), 0)};
  out.add_term(key, c);
  return out;
}

RElement RElement::power(int num_vars, int t, int i, const Rational& r, cplx coeff) {
  Rational scaled = r * Rational(t);
  if (!scaled.is_integer()) throw ConfigError("exponent " + r.str() + " is not in (1/" + std::to_string(t) + ")Z");
  RElement out(num_vars, t);
  MonomialKey key{std::vector<std::int64_t>(num_vars, 0), std::vector<std::int64_t>(pair_count(num_vars), 0)};
  key.powers.at(i) = scaled.num();
  out.add_term(key, coeff);
  return out;
}

RElement RElement::difference(int num_vars, int t, int i, int j, std::int64_t m, cplx coeff) {
  if (i == j) throw ConfigError("difference (x_i - x_i) is identically zero");
  RElement out(num_vars, t);
  MonomialKey key{std::vector<std::int64_t>(num_vars, 0), std::vector<std::int64_t>(pair_count(num_vars), 0)};
  key.diffs.at(pair_index(num_vars, i, j)) = m;
  // (x_j − x_i)^m = (−1)^m (x_i − x_j)^m.
  if (i > j && (m % 2 != 0)) coeff = -coeff;
  out.add_term(key, coeff);
  return out;
}

RElement RElement::monomial(int num_vars, int t, MonomialKey key, cplx coeff) {
  if (static_cast<int>(key.powers.size()) != num_vars || static_cast<int>(key.diffs.size()) != pair_count(num_vars))
    throw ConfigError("monomial key has the wrong shape");
  RElement out(num_vars, t);
  out.add_term(key, coeff);
  return out;
}

void RElement::add_term(const MonomialKey& key, cplx c) {
  if (c == cplx{0.0, 0.0}) return;
  auto [it, inserted] = terms_.emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx{0.0, 0.0}) terms_.erase(it);
  }
}

RElement RElement::with_root_order(int t) const {
  if (t % t_ != 0) throw ConfigError("root order " + std::to_string(t) + " is not a multiple of " + std::to_string(t_));
  const std::int64_t f = t / t_;
  RElement out(n_, t);
  for (const auto& [key, c] : terms_) {
    MonomialKey k = key;
    for (auto& p : k.powers) p *= f;
    out.terms_.emplace(std::move(k), c);
  }
  return out;
}

namespace {

std::pair<RElement, RElement> common_order(const RElement& a, const RElement& b) {
  if (a.num_vars() != b.num_vars()) throw ConfigError("RElement operands have different variable counts");
  if (a.root_order() == b.root_order()) return {a, b};
  int t = static_cast<int>(lcm64(a.root_order(), b.root_order()));
  return {a.with_root_order(t), b.with_root_order(t)};
}

}  // namespace

RElement RElement::operator+(const RElement& o) const {
  if (t_ != o.t_ || n_ != o.n_) {
    auto [a, b] = common_order(*this, o);
    return a + b;
  }
  RElement out = *this;
  for (const auto& [k, c] : o.terms_) out.add_term(k, c);
  return out;
}

RElement RElement::operator-() const { return scaled(-1.0); }

RElement RElement::operator-(const RElement& o) const { return *this + (-o); }

RElement RElement::scaled(cplx c) const {
  RElement out(n_, t_);
  if (c == cplx{0.0, 0.0}) return out;
  for (const auto& [k, v] : terms_) out.add_term(k, v * c);
  return out;
}

RElement RElement::operator*(const RElement& o) const {
  if (t_ != o.t_ || n_ != o.n_) {
    auto [a, b] = common_order(*this, o);
    return a * b;
  }
  RElement out(n_, t_);
  for (const auto& [ka, ca] : terms_)
    for (const auto& [kb, cb] : o.terms_) {
      MonomialKey k = ka;
      for (std::size_t i = 0; i < k.powers.size(); ++i) k.powers[i] += kb.powers[i];
      for (std::size_t i = 0; i < k.diffs.size(); ++i) k.diffs[i] += kb.diffs[i];
      out.add_term(k, ca * cb);
    }
  return out;
}

bool operator==(const RElement& a, const RElement& b) {
  return a.n_ == b.n_ && a.t_ == b.t_ && a.terms_ == b.terms_;
}

Rational RElement::degree(const MonomialKey& key) const {
  Rational d(0);
  for (auto p : key.powers) d += Rational(p, t_);
  for (auto m : key.diffs) d += Rational(m);
  return d;
}

std::optional<Rational> RElement::homogeneous_degree() const {
  std::optional<Rational> deg;
  for (const auto& [k, c] : terms_) {
    Rational d = degree(k);
    if (deg && *deg != d) return std::nullopt;
    deg = d;
  }
  return deg;
}

std::string RElement::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
    for (int i = 0; i < n_; ++i)
      if (k.powers[i] != 0) os << "*x" << i + 1 << "^(" << Rational(k.powers[i], t_).str() << ")";
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        auto m = k.diffs[pair_index(n_, i, j)];
        if (m != 0) os << "*(x" << i + 1 << "-x" << j + 1 << ")^(" << m << ")";
      }
  }
  return os.str();
}

cplx eval_monomial(const MonomialKey& key, int t, const std::vector<cplx>& z, const std::vector<cplx>& logs) {
  const int n = static_cast<int>(z.size());
  cplx value{1.0, 0.0};
  cplx exponent{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    const std::int64_t num = key.powers[i];
    if (num == 0) continue;
    if (num % t == 0) {
      const std::int64_t e = num / t;
      if (z[i] == cplx{0.0, 0.0} && e < 0)
        throw SingularPointError("pole of x" + std::to_string(i + 1) + "^(" + std::to_string(e) + ") at x" +
                                 std::to_string(i + 1) + " = 0");
      value *= ipow(z[i], e);
    } else {
      if (z[i] == cplx{0.0, 0.0})
        throw SingularPointError("fractional power x" + std::to_string(i + 1) + "^(" + Rational(num, t).str() +
                                 ") evaluated at x" + std::to_string(i + 1) + " = 0");
      exponent += (static_cast<double>(num) / t) * logs[i];
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const std::int64_t m = key.diffs[pair_index(n, i, j)];
      if (m == 0) continue;
      cplx d = z[i] - z[j];
      if (d == cplx{0.0, 0.0} && m < 0)
        throw SingularPointError("pole of (x" + std::to_string(i + 1) + " - x" + std::to_string(j + 1) + ")^(" +
                                 std::to_string(m) + ") on x" + std::to_string(i + 1) + " = x" + std::to_string(j + 1));
      value *= ipow(d, m);
    }
  if (exponent != cplx{0.0, 0.0}) value *= std::exp(exponent);
  return value;
}

cplx eval_with_logs(const RElement& f, const std::vector<cplx>& z, const std::vector<cplx>& logs) {
  if (static_cast<int>(z.size()) != f.num_vars() || logs.size() != z.size())
    throw ConfigError("eval: point has " + std::to_string(z.size()) + " coordinates, expected " +
                      std::to_string(f.num_vars()));
  cplx sum{0.0, 0.0};
  for (const auto& [k, c] : f.terms()) sum += c * eval_monomial(k, f.root_order(), z, logs);
  return sum;
}

cplx eval(const RElement& f, const std::vector<cplx>& z, const std::vector<int>& p) {
  if (p.size() != z.size()) throw ConfigError("eval: branch tuple size mismatch");
  std::vector<cplx> logs(z.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    logs[i] = z[i] == cplx{0.0, 0.0} ? cplx{0.0, 0.0} : branch_log(z[i], p[i]);
  return eval_with_logs(f, z, logs);
}

RElement differentiate(const RElement& f, int i) {
  const int n = f.num_vars();
  const int t = f.root_order();
  if (i < 0 || i >= n) throw ConfigError("differentiate: variable index out of range");
  RElement out(n, t);
  for (const auto& [key, c] : f.terms()) {
    if (key.powers[i] != 0) {
      MonomialKey k = key;
      k.powers[i] -= t;
      out += RElement::monomial(n, t, k, c * (static_cast<double>(key.powers[i]) / t));
    }
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const int idx = pair_index(n, i, j);
      const std::int64_t m = key.diffs[idx];
      if (m == 0) continue;
      MonomialKey k = key;
      k.diffs[idx] -= 1;
      // x_i is the first entry of the stored pair iff i < j.
      const double sign = i < j ? 1.0 : -1.0;
      out += RElement::monomial(n, t, k, c * (sign * static_cast<double>(m)));
    }
  }
  return out;
}

RMatrix::RMatrix(int r, int c, int num_vars, int t)
    : rows(r), cols(c), entries(static_cast<std::size_t>(r) * c, RElement(num_vars, t)) {}

CMatrix RMatrix::eval(const std::vector<cplx>& z, const std::vector<int>& p) const {
  CMatrix out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = rcalc::eval((*this)(r, c), z, p);
  return out;
}

CMatrix RMatrix::eval_with_logs(const std::vector<cplx>& z, const std::vector<cplx>& logs) const {
  CMatrix out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = rcalc::eval_with_logs((*this)(r, c), z, logs);
  return out;
}

RMatrix RMatrix::differentiate(int i) const {
  RMatrix out = *this;
  for (auto& e : out.entries) e = rcalc::differentiate(e, i);
  return out;
}

bool operator==(const RMatrix& a, const RMatrix& b) {
  return a.rows == b.rows && a.cols == b.cols && a.entries == b.entries;
}

void add_scaled(RMatrix& target, const RElement& coeff, const CMatrix& m) {
  for (int r = 0; r < target.rows; ++r)
    for (int c = 0; c < target.cols; ++c) {
      if (m(r, c) == cplx{0.0, 0.0}) continue;
      target(r, c) += coeff.scaled(m(r, c));
    }
}

MatrixEvaluator::MatrixEvaluator(const RMatrix& m) : rows_(m.rows), cols_(m.cols) {
  std::map<MonomialKey, CMatrix> grouped;
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) {
      const RElement& e = m(r, c);
      n_ = e.num_vars();
      t_ = e.root_order();
      for (const auto& [k, v] : e.terms()) {
        auto it = grouped.find(k);
        if (it == grouped.end()) it = grouped.emplace(k, CMatrix::Zero(m.rows, m.cols)).first;
        it->second(r, c) += v;
      }
    }
  for (auto& [k, mat] : grouped) {
    keys_.push_back(k);
    coeffs_.push_back(std::move(mat));
  }
}

CMatrix MatrixEvaluator::eval_with_logs(const std::vector<cplx>& z, const std::vector<cplx>& logs) const {
  CMatrix out = CMatrix::Zero(rows_, cols_);
  for (std::size_t k = 0; k < keys_.size(); ++k) out += eval_monomial(keys_[k], t_, z, logs) * coeffs_[k];
  return out;
}

}  // namespace tkz::rcalc
