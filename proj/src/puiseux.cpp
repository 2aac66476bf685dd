#include "tkz/puiseux.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tkz/errors.hpp"

namespace tkz::rcalc {

namespace {

std::int64_t sat_add(std::int64_t a, std::int64_t b) {
  if (a >= kNoCutoff || b >= kNoCutoff) return kNoCutoff;
  return std::clamp<std::int64_t>(a + b, -kNoCutoff, kNoCutoff);
}

std::int64_t sat_mul(std::int64_t a, std::int64_t f) {
  if (a >= kNoCutoff) return kNoCutoff;
  if (a <= -kNoCutoff) return -kNoCutoff;
  return a * f;
}

bool is_zero(const cplx& c) { return c == cplx{0.0, 0.0}; }
bool is_zero(const CMatrix& m) { return m.size() == 0 || (m.array() == cplx{0.0, 0.0}).all(); }
double magnitude(const cplx& c) { return std::abs(c); }
double magnitude(const CMatrix& m) { return m.size() == 0 ? 0.0 : max_abs(m); }

cplx ipow(cplx base, std::int64_t e) {
  bool inv = e < 0;
  std::uint64_t k = static_cast<std::uint64_t>(inv ? -e : e);
  cplx r{1.0, 0.0};
  while (k) {
    if (k & 1U) r *= base;
    base *= base;
    k >>= 1U;
  }
  return inv ? cplx{1.0, 0.0} / r : r;
}

cplx term_value(const SeriesKey& key, int den, const std::vector<cplx>& eta, const std::vector<cplx>& logs) {
  cplx v{1.0, 0.0};
  cplx expo{0.0, 0.0};
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const std::int64_t e = key.exps[i];
    if (e != 0) {
      if (e % den == 0) {
        if (eta[i] == cplx{0.0, 0.0} && e < 0)
          throw SingularPointError("series term with negative power of eta" + std::to_string(i + 1) + " at 0");
        v *= ipow(eta[i], e / den);
      } else {
        if (eta[i] == cplx{0.0, 0.0})
          throw SingularPointError("fractional power of eta" + std::to_string(i + 1) + " at 0");
        expo += (static_cast<double>(e) / den) * logs[i];
      }
    }
    if (key.logs[i] != 0) v *= ipow(logs[i], key.logs[i]);
  }
  if (expo != cplx{0.0, 0.0}) v *= std::exp(expo);
  return v;
}

}  // namespace

std::int64_t cutoff_numerator(const Rational& c, int den) {
  Rational x = c * Rational(den);
  return -((-x).floor());
}

double binomial(const Rational& r, int k) {
  double x = r.to_double();
  double b = 1.0;
  for (int i = 0; i < k; ++i) b *= (x - i) / (i + 1);
  return b;
}

template <typename Coeff>
BasicSeries<Coeff>::BasicSeries(int n, int den, std::vector<std::int64_t> cutoffs, std::vector<std::int64_t> lower)
    : n_(n), den_(den), cut_(std::move(cutoffs)), lower_(std::move(lower)) {
  if (den <= 0) throw ConfigError("series denominator must be positive");
  if (static_cast<int>(cut_.size()) != n || static_cast<int>(lower_.size()) != n)
    throw ConfigError("series cutoff/lower-bound vectors have the wrong length");
}

template <typename Coeff>
BasicSeries<Coeff> BasicSeries<Coeff>::monomial(int n, int den, std::vector<std::int64_t> exps, const Coeff& c) {
  BasicSeries s(n, den, std::vector<std::int64_t>(n, kNoCutoff), exps);
  s.add_term(SeriesKey{std::move(exps), std::vector<int>(n, 0)}, c);
  return s;
}

template <typename Coeff>
void BasicSeries<Coeff>::add_term(const SeriesKey& key, const Coeff& c) {
  if (is_zero(c)) return;
  for (int i = 0; i < n_; ++i)
    if (key.exps[i] >= cut_[i]) return;
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(key, c);
  } else {
    it->second += c;
    if (is_zero(it->second)) terms_.erase(it);
  }
}

template <typename Coeff>
BasicSeries<Coeff> BasicSeries<Coeff>::with_den(int den) const {
  if (den == den_) return *this;
  if (den % den_ != 0) throw ConfigError("series denominator " + std::to_string(den) + " is not a multiple");
  const std::int64_t f = den / den_;
  std::vector<std::int64_t> cut(n_), low(n_);
  for (int i = 0; i < n_; ++i) {
    cut[i] = sat_mul(cut_[i], f);
    low[i] = sat_mul(lower_[i], f);
  }
  BasicSeries out(n_, den, cut, low);
  for (const auto& [k, c] : terms_) {
    SeriesKey key = k;
    for (auto& e : key.exps) e *= f;
    out.terms_.emplace(std::move(key), c);
  }
  return out;
}

template <typename Coeff>
BasicSeries<Coeff> BasicSeries<Coeff>::truncated(const std::vector<std::int64_t>& cutoffs) const {
  std::vector<std::int64_t> cut(n_);
  for (int i = 0; i < n_; ++i) cut[i] = std::min(cut_[i], cutoffs.at(i));
  BasicSeries out(n_, den_, cut, lower_);
  for (const auto& [k, c] : terms_) out.add_term(k, c);
  return out;
}

template <typename Coeff>
BasicSeries<Coeff> BasicSeries<Coeff>::pruned(double tol) const {
  BasicSeries out(n_, den_, cut_, lower_);
  for (const auto& [k, c] : terms_)
    if (magnitude(c) > tol) out.terms_.emplace(k, c);
  return out;
}

template <typename Coeff>
BasicSeries<Coeff> BasicSeries<Coeff>::shifted(const std::vector<std::int64_t>& exps) const {
  std::vector<std::int64_t> cut(n_), low(n_);
  for (int i = 0; i < n_; ++i) {
    cut[i] = sat_add(cut_[i], exps[i]);
    low[i] = sat_add(lower_[i], exps[i]);
  }
  BasicSeries out(n_, den_, cut, low);
  for (const auto& [k, c] : terms_) {
    SeriesKey key = k;
    for (int i = 0; i < n_; ++i) key.exps[i] += exps[i];
    out.terms_.emplace(std::move(key), c);
  }
  return out;
}

template <typename Coeff>
BasicSeries<Coeff> BasicSeries<Coeff>::operator+(const BasicSeries& o) const {
  if (n_ != o.n_) throw ConfigError("series operands have different variable counts");
  if (den_ != o.den_) {
    int d = static_cast<int>(lcm64(den_, o.den_));
    return with_den(d) + o.with_den(d);
  }
  std::vector<std::int64_t> cut(n_), low(n_);
  for (int i = 0; i < n_; ++i) {
    cut[i] = std::min(cut_[i], o.cut_[i]);
    low[i] = std::min(lower_[i], o.lower_[i]);
  }
  BasicSeries out(n_, den_, cut, low);
  for (const auto& [k, c] : terms_) out.add_term(k, c);
  for (const auto& [k, c] : o.terms_) out.add_term(k, c);
  return out;
}

template <typename Coeff>
BasicSeries<Coeff> BasicSeries<Coeff>::operator-(const BasicSeries& o) const {
  BasicSeries neg = o;
  for (auto& [k, c] : neg.terms_) c = -c;
  return *this + neg;
}

template <typename Coeff>
std::vector<std::optional<Rational>> BasicSeries<Coeff>::min_exponents() const {
  std::vector<std::optional<Rational>> out(n_);
  for (const auto& [k, c] : terms_)
    for (int i = 0; i < n_; ++i) {
      Rational e(k.exps[i], den_);
      if (!out[i] || e < *out[i]) out[i] = e;
    }
  return out;
}

template <typename Coeff>
std::vector<std::optional<Rational>> BasicSeries<Coeff>::cutoff_values() const {
  std::vector<std::optional<Rational>> out(n_);
  for (int i = 0; i < n_; ++i)
    if (cut_[i] < kNoCutoff) out[i] = Rational(cut_[i], den_);
  return out;
}

template <typename Coeff>
Coeff BasicSeries<Coeff>::eval_with_logs(const std::vector<cplx>& eta, const std::vector<cplx>& logs) const {
  if (static_cast<int>(eta.size()) != n_ || logs.size() != eta.size())
    throw ConfigError("series eval: point has the wrong number of coordinates");
  Coeff sum{};
  bool first = true;
  for (const auto& [k, c] : terms_) {
    cplx v = term_value(k, den_, eta, logs);
    if (first) {
      sum = c * v;
      first = false;
    } else {
      sum += c * v;
    }
  }
  return sum;
}

template <typename Coeff>
Coeff BasicSeries<Coeff>::eval(const std::vector<cplx>& eta, const std::vector<int>& p) const {
  std::vector<cplx> logs(eta.size());
  for (std::size_t i = 0; i < eta.size(); ++i)
    logs[i] = eta[i] == cplx{0.0, 0.0} ? cplx{0.0, 0.0} : branch_log(eta[i], p.at(i));
  return eval_with_logs(eta, logs);
}

template class BasicSeries<cplx>;
template class BasicSeries<CMatrix>;

PuiseuxSeries operator*(const PuiseuxSeries& a, const PuiseuxSeries& b) {
  const int n = a.num_vars();
  if (n != b.num_vars()) throw ConfigError("series operands have different variable counts");
  if (a.den() != b.den()) {
    int d = static_cast<int>(lcm64(a.den(), b.den()));
    return a.with_den(d) * b.with_den(d);
  }
  std::vector<std::int64_t> cut(n), low(n);
  for (int i = 0; i < n; ++i) {
    // A missing term of a has some exponent >= a.cut; combined with b's lower bound this
    // bounds every product term that could be affected.
    cut[i] = std::min(sat_add(a.cutoffs()[i], b.lower()[i]), sat_add(b.cutoffs()[i], a.lower()[i]));
    low[i] = sat_add(a.lower()[i], b.lower()[i]);
  }
  PuiseuxSeries out(n, a.den(), cut, low);
  for (const auto& [ka, ca] : a.terms())
    for (const auto& [kb, cb] : b.terms()) {
      SeriesKey k = ka;
      bool inside = true;
      for (int i = 0; i < n && inside; ++i) {
        k.exps[i] += kb.exps[i];
        k.logs[i] += kb.logs[i];
        inside = k.exps[i] < cut[i];
      }
      if (inside) out.add_term(k, ca * cb);
    }
  return out;
}

PuiseuxSeries scaled(const PuiseuxSeries& a, cplx c) {
  PuiseuxSeries out(a.num_vars(), a.den(), a.cutoffs(), a.lower());
  for (const auto& [k, v] : a.terms()) out.add_term(k, v * c);
  return out;
}

MatrixSeries tensor(const PuiseuxSeries& a, const CMatrix& m) {
  MatrixSeries out(a.num_vars(), a.den(), a.cutoffs(), a.lower());
  for (const auto& [k, v] : a.terms()) out.add_term(k, v * m);
  return out;
}

PuiseuxSeries series_from_terms(int n, int den, std::vector<std::int64_t> cutoffs,
                                const std::map<SeriesKey, cplx>& terms) {
  std::vector<std::int64_t> low = cutoffs;
  for (const auto& [k, c] : terms)
    for (int i = 0; i < n; ++i) low[i] = std::min(low[i], k.exps[i]);
  PuiseuxSeries out(n, den, std::move(cutoffs), std::move(low));
  for (const auto& [k, c] : terms) out.add_term(k, c);
  return out;
}

std::vector<std::optional<Rational>> series_min_exponents(const PuiseuxSeries& s) { return s.min_exponents(); }

PuiseuxSeries iota_expand(const RElement& f, const std::vector<Rational>& cutoffs) {
  const int n = f.num_vars();
  const int t = f.root_order();
  if (static_cast<int>(cutoffs.size()) != n) throw ConfigError("iota_expand: one cutoff per variable required");
  std::vector<std::int64_t> cut(n);
  for (int i = 0; i < n; ++i) cut[i] = cutoff_numerator(cutoffs[i], t);

  std::map<SeriesKey, cplx> acc;
  for (const auto& [key, coeff] : f.terms()) {
    std::vector<std::int64_t> base = key.powers;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) base[i] += key.diffs[pair_index(n, i, j)] * t;

    // Variables are fixed from last to first: x_j's exponent only grows through the
    // pairs (i, j), i < j, and only shrinks through pairs (j, l) chosen earlier.
    std::vector<std::int64_t> exps = base;
    std::function<void(int, int, cplx)> choose = [&](int j, int i, cplx c) {
      if (j < 0) {
        acc[SeriesKey{exps, std::vector<int>(n, 0)}] += c;
        return;
      }
      if (i == j) {
        if (exps[j] < cut[j]) choose(j - 1, 0, c);
        return;
      }
      const std::int64_t m = key.diffs[pair_index(n, i, j)];
      if (m == 0) {
        choose(j, i + 1, c);
        return;
      }
      for (int k = 0;; ++k) {
        const double b = binomial(Rational(m), k);
        if (m >= 0 && k > m) break;
        if (exps[j] + static_cast<std::int64_t>(k) * t >= cut[j]) break;
        exps[j] += static_cast<std::int64_t>(k) * t;
        exps[i] -= static_cast<std::int64_t>(k) * t;
        choose(j, i + 1, c * (b * ((k % 2) ? -1.0 : 1.0)));
        exps[j] -= static_cast<std::int64_t>(k) * t;
        exps[i] += static_cast<std::int64_t>(k) * t;
      }
    };
    choose(n - 1, 0, coeff);
  }
  std::map<SeriesKey, cplx> nonzero;
  for (const auto& [k, c] : acc)
    if (c != cplx{0.0, 0.0}) nonzero.emplace(k, c);
  return series_from_terms(n, t, cut, nonzero);
}

}  // namespace tkz::rcalc
