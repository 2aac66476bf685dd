#include "tkz/change.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <tuple>

#include "tkz/errors.hpp"

namespace tkz {

namespace {

cplx snap(cplx x, double scale) {
  const double tol = 1e-14 * std::max(1.0, scale);
  return {std::abs(x.real()) < tol ? 0.0 : x.real(), std::abs(x.imag()) < tol ? 0.0 : x.imag()};
}

}  // namespace

bool ChangeOfVariables::affine() const {
  for (int i = 0; i < beta.size(); ++i)
    if (beta(i) != cplx{0.0, 0.0}) return true;
  return false;
}

std::vector<cplx> ChangeOfVariables::zeta_of_eta(const std::vector<cplx>& eta) const {
  std::vector<cplx> zeta(eta.size());
  for (int j = 0; j < size(); ++j) {
    if (eta[j] == cplx{0.0, 0.0} && at_infinity[j]) throw SingularPointError("eta at 0 for a component at infinity");
    zeta[j] = std::pow(eta[j], sign(j) * t);
  }
  return zeta;
}

std::vector<cplx> ChangeOfVariables::z_of_eta(const std::vector<cplx>& eta) const {
  std::vector<cplx> zeta = zeta_of_eta(eta);
  std::vector<cplx> z(zeta.size());
  for (int l = 0; l < size(); ++l) {
    cplx s = gamma(l);
    for (int j = 0; j < size(); ++j) s += zeta[j] * B(j, l);
    z[l] = s;
  }
  return z;
}

ChangeOfVariables make_change(const CMatrix& a, const CVector& beta, std::vector<bool> at_infinity, int t) {
  const int n = static_cast<int>(a.rows());
  if (n == 0 || a.cols() != n) throw ConfigError("change of variables: A must be a nonempty square matrix");
  if (beta.size() != n || static_cast<int>(at_infinity.size()) != n)
    throw ConfigError("change of variables: beta and delta must have length " + std::to_string(n));
  if (t <= 0) throw ConfigError("change of variables: t must be positive");
  ChangeOfVariables cov;
  cov.A = a;
  cov.beta = beta;
  cov.at_infinity = std::move(at_infinity);
  cov.t = t;
  cov.condition = condition_number(a);
  if (!std::isfinite(cov.condition) || cov.condition > 1e12) {
    std::ostringstream os;
    os << "change of variables: A is not invertible (condition number " << cov.condition << ")";
    throw ConfigError(os.str());
  }
  cov.B = a.inverse();
  cov.gamma = (beta.transpose() * cov.B).transpose();
  const double sb = max_abs(cov.B);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) cov.B(i, j) = snap(cov.B(i, j), sb);
    cov.gamma(i) = snap(cov.gamma(i), std::max(sb, cov.gamma.cwiseAbs().maxCoeff()));
  }
  return cov;
}

ChangeOfVariables identity_change(int n, int t) {
  return make_change(CMatrix::Identity(n, n), CVector::Zero(n), std::vector<bool>(n, false), t);
}

namespace rcalc {

namespace {

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

/// c0 + Σ_k c_k ζ_k, the image of z_ℓ or of z_i − z_j.
struct LinearForm {
  cplx c0;
  std::vector<cplx> c;
  std::string name;
};

LinearForm form_of(const ChangeOfVariables& cov, int factor) {
  const int n = cov.size();
  LinearForm f;
  f.c.resize(n);
  if (factor < n) {
    f.c0 = cov.gamma(factor);
    for (int k = 0; k < n; ++k) f.c[k] = cov.B(k, factor);
    f.name = "z" + std::to_string(factor + 1);
    return f;
  }
  int idx = factor - n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (pair_index(n, i, j) == idx) {
        f.c0 = cov.gamma(i) - cov.gamma(j);
        for (int k = 0; k < n; ++k) f.c[k] = cov.B(k, i) - cov.B(k, j);
        f.name = "z" + std::to_string(i + 1) + " - z" + std::to_string(j + 1);
      }
  return f;
}

struct Lead {
  bool zero = false;  // the whole factor vanishes identically (nonnegative integer power of 0)
  cplx coeff{1.0, 0.0};
  std::vector<std::int64_t> exps;  // numerators over den
  PuiseuxSeries poly_part;         // exact part when the power is a nonnegative integer
  bool exact_poly = false;
  // (1 + u): u terms as (exponent numerators, coefficient), all exponents >= 0.
  std::vector<std::pair<std::vector<std::int64_t>, cplx>> u;
  Rational r;
  cplx log_lead{0.0, 0.0};  // log of the lead coefficient used for c^r
  int lead_var = -1;
};

class Composer {
 public:
  Composer(const ChangeOfVariables& cov, int f_t, const ComposeOptions& opt)
      : cov_(cov), n_(cov.size()), den_(composed_den(f_t, cov)), opt_(opt) {
    if (opt_.branches.empty()) opt_.branches.assign(n_, 0);
    if (static_cast<int>(opt_.branches.size()) != n_) throw ConfigError("compose: one branch index per variable");
  }

  int den() const { return den_; }

  // η-exponent numerator of ζ_k.
  std::int64_t zeta_exp(int k) const { return static_cast<std::int64_t>(cov_.sign(k)) * cov_.t * den_; }

  const Lead& lead(int factor, const Rational& r) {
    auto key = std::make_tuple(factor, r.num(), r.den());
    auto it = leads_.find(key);
    if (it != leads_.end()) return it->second;
    return leads_.emplace(key, make_lead(factor, r)).first->second;
  }

  PuiseuxSeries part(int factor, const Rational& r, const std::vector<std::int64_t>& box) {
    auto key = std::make_tuple(factor, r.num(), r.den(), box);
    auto it = parts_.find(key);
    if (it != parts_.end()) return it->second;
    return parts_.emplace(key, make_part(lead(factor, r), box)).first->second;
  }

  PuiseuxSeries compose_key(const MonomialKey& key, int f_t, const std::vector<std::int64_t>& q) {
    std::vector<std::pair<int, Rational>> factors;
    for (int l = 0; l < n_; ++l)
      if (key.powers[l] != 0) factors.emplace_back(l, Rational(key.powers[l], f_t));
    for (int p = 0; p < pair_count(n_); ++p)
      if (key.diffs[p] != 0) factors.emplace_back(n_ + p, Rational(key.diffs[p]));

    cplx coeff{1.0, 0.0};
    std::vector<std::int64_t> e(n_, 0);
    for (const auto& [fac, r] : factors) {
      const Lead& ld = lead(fac, r);
      if (ld.zero) return PuiseuxSeries(n_, den_, q, q);
      coeff *= ld.coeff;
      for (int v = 0; v < n_; ++v) e[v] += ld.exps[v];
    }
    std::vector<std::int64_t> box(n_);
    for (int v = 0; v < n_; ++v) box[v] = q[v] - e[v];
    PuiseuxSeries acc(n_, den_, box, std::vector<std::int64_t>(n_, 0));
    acc.add_term(SeriesKey{std::vector<std::int64_t>(n_, 0), std::vector<int>(n_, 0)}, 1.0);
    for (const auto& [fac, r] : factors) {
      if (acc.empty()) break;
      acc = acc * part(fac, r, box);
    }
    return scaled(acc.shifted(e), coeff);
  }

  Lead make_lead(int factor, const Rational& r) const {
    LinearForm form = form_of(cov_, factor);
    Lead ld;
    ld.r = r;
    ld.exps.assign(n_, 0);

    if (r.is_integer() && r.num() >= 0) {
      // Exact polynomial power; no dominance needed.
      PuiseuxSeries poly(n_, den_, std::vector<std::int64_t>(n_, kNoCutoff), std::vector<std::int64_t>(n_, 0));
      std::vector<std::int64_t> low(n_, 0);
      auto add = [&](std::vector<std::int64_t> ex, cplx c) {
        if (c == cplx{0.0, 0.0}) return;
        for (int v = 0; v < n_; ++v) low[v] = std::min(low[v], ex[v]);
        poly.add_term(SeriesKey{std::move(ex), std::vector<int>(n_, 0)}, c);
      };
      add(std::vector<std::int64_t>(n_, 0), form.c0);
      for (int k = 0; k < n_; ++k) {
        std::vector<std::int64_t> ex(n_, 0);
        ex[k] = zeta_exp(k);
        add(ex, form.c[k]);
      }
      poly.set_lower(low);
      if (poly.empty()) {
        ld.zero = true;
        return ld;
      }
      PuiseuxSeries pw = PuiseuxSeries::monomial(n_, den_, std::vector<std::int64_t>(n_, 0), 1.0);
      for (std::int64_t k = 0; k < r.num(); ++k) pw = pw * poly;
      std::vector<std::int64_t> m(n_, kNoCutoff);
      for (const auto& [k, c] : pw.terms())
        for (int v = 0; v < n_; ++v) m[v] = std::min(m[v], k.exps[v]);
      std::vector<std::int64_t> neg(n_);
      for (int v = 0; v < n_; ++v) neg[v] = -m[v];
      ld.exps = m;
      ld.poly_part = pw.shifted(neg);
      ld.poly_part.set_lower(std::vector<std::int64_t>(n_, 0));
      ld.exact_poly = true;
      return ld;
    }

    std::vector<int> inf_terms;
    std::vector<int> zero_terms;
    for (int k = 0; k < n_; ++k) {
      if (form.c[k] == cplx{0.0, 0.0}) continue;
      (cov_.at_infinity[k] ? inf_terms : zero_terms).push_back(k);
    }
    auto degenerate = [&](const std::string& why) {
      throw DegenerateError("factor (" + form.name + ")^(" + r.str() + ") is not component-isolated: " + why);
    };
    cplx lead_c;
    std::vector<std::int64_t> lead_e(n_, 0);
    if (inf_terms.size() >= 2) degenerate("several components at infinity compete for the leading term");
    if (inf_terms.size() == 1) {
      ld.lead_var = inf_terms[0];
      lead_c = form.c[ld.lead_var];
      lead_e[ld.lead_var] = zeta_exp(ld.lead_var);
    } else if (form.c0 != cplx{0.0, 0.0}) {
      lead_c = form.c0;
    } else if (zero_terms.size() == 1) {
      ld.lead_var = zero_terms[0];
      lead_c = form.c[ld.lead_var];
      lead_e[ld.lead_var] = zeta_exp(ld.lead_var);
    } else if (zero_terms.empty()) {
      degenerate("it vanishes identically");
    } else {
      degenerate("it vanishes on a hypersurface through the target point");
    }

    for (int v = 0; v < n_; ++v) {
      Rational ex = Rational(lead_e[v]) * r;
      if (!ex.is_integer()) throw NumericError("compose: exponent denominator too small for " + form.name);
      ld.exps[v] = ex.num();
    }
    ld.log_lead = branch_log(lead_c, factor < n_ ? opt_.branches[factor] : 0);
    ld.coeff = r.is_integer() ? ipow(lead_c, r.num()) : std::exp(r.to_double() * ld.log_lead);

    auto push_u = [&](std::vector<std::int64_t> ex, cplx c) {
      if (c == cplx{0.0, 0.0}) return;
      for (int v = 0; v < n_; ++v) ex[v] -= lead_e[v];
      bool is_lead = true;
      for (auto x : ex) is_lead = is_lead && x == 0;
      if (is_lead) return;
      ld.u.emplace_back(std::move(ex), c / lead_c);
    };
    push_u(std::vector<std::int64_t>(n_, 0), form.c0);
    for (int k = 0; k < n_; ++k) {
      std::vector<std::int64_t> ex(n_, 0);
      ex[k] = zeta_exp(k);
      push_u(ex, form.c[k]);
    }
    for (const auto& [ex, c] : ld.u)
      for (auto x : ex)
        if (x < 0) throw NumericError("compose: internal error, correction term below the leading term");
    return ld;
  }

  PuiseuxSeries make_part(const Lead& ld, const std::vector<std::int64_t>& box) const {
    const std::vector<std::int64_t> zero(n_, 0);
    if (ld.exact_poly) return ld.poly_part.truncated(box);
    PuiseuxSeries out(n_, den_, box, zero);
    out.add_term(SeriesKey{zero, std::vector<int>(n_, 0)}, 1.0);
    if (ld.u.empty()) return out;
    for (auto b : box)
      if (b >= kNoCutoff) throw ConfigError("compose: finite cutoffs are required");
    PuiseuxSeries u(n_, den_, box, zero);
    for (const auto& [ex, c] : ld.u) u.add_term(SeriesKey{ex, std::vector<int>(n_, 0)}, c);
    PuiseuxSeries power(n_, den_, box, zero);
    power.add_term(SeriesKey{zero, std::vector<int>(n_, 0)}, 1.0);
    for (int k = 1;; ++k) {
      power = power * u;
      if (power.empty()) break;
      const double b = binomial(ld.r, k);
      if (b == 0.0) break;
      out += scaled(power, b);
    }
    return out;
  }

 private:
  const ChangeOfVariables& cov_;
  int n_;
  int den_;
  ComposeOptions opt_;
  std::map<std::tuple<int, std::int64_t, std::int64_t>, Lead> leads_;
  std::map<std::tuple<int, std::int64_t, std::int64_t, std::vector<std::int64_t>>, PuiseuxSeries> parts_;
};

std::vector<std::int64_t> numerators(const std::vector<Rational>& cutoffs, int den, int n) {
  if (static_cast<int>(cutoffs.size()) != n) throw ConfigError("compose: one cutoff per variable required");
  std::vector<std::int64_t> q(n);
  for (int v = 0; v < n; ++v) q[v] = cutoff_numerator(cutoffs[v], den);
  return q;
}

}  // namespace

int composed_den(int f_t, const ChangeOfVariables& cov) {
  return static_cast<int>(f_t / std::gcd<std::int64_t>(f_t, cov.t));
}

PuiseuxSeries compose_change(const RElement& f, const ChangeOfVariables& cov, const std::vector<Rational>& cutoffs,
                             const ComposeOptions& opt) {
  if (f.num_vars() != cov.size()) throw ConfigError("compose: variable count mismatch");
  Composer comp(cov, f.root_order(), opt);
  const int n = cov.size();
  auto q = numerators(cutoffs, comp.den(), n);
  PuiseuxSeries acc(n, comp.den(), std::vector<std::int64_t>(n, kNoCutoff), std::vector<std::int64_t>(n, kNoCutoff));
  for (const auto& [key, c] : f.terms()) acc += scaled(comp.compose_key(key, f.root_order(), q), c);
  return acc.truncated(q).pruned(opt.prune_tol);
}

MatrixSeries compose_change(const RMatrix& m, const ChangeOfVariables& cov, const std::vector<Rational>& cutoffs,
                            const ComposeOptions& opt) {
  const int n = cov.size();
  int t = 1;
  for (const auto& e : m.entries) {
    if (e.num_vars() != n) throw ConfigError("compose: variable count mismatch");
    t = static_cast<int>(lcm64(t, e.root_order()));
  }
  RMatrix mm = m;
  for (auto& e : mm.entries) e = e.with_root_order(t);
  MatrixEvaluator ev(mm);
  Composer comp(cov, t, opt);
  auto q = numerators(cutoffs, comp.den(), n);
  MatrixSeries acc(n, comp.den(), std::vector<std::int64_t>(n, kNoCutoff), std::vector<std::int64_t>(n, kNoCutoff));
  for (std::size_t k = 0; k < ev.keys().size(); ++k)
    acc += tensor(comp.compose_key(ev.keys()[k], t, q), ev.coefficients()[k]);
  return acc.truncated(q).pruned(opt.prune_tol);
}

std::vector<int> branch_at(const ChangeOfVariables& cov, const std::vector<cplx>& eta, const ComposeOptions& opt) {
  const int n = cov.size();
  std::vector<int> branches = opt.branches.empty() ? std::vector<int>(n, 0) : opt.branches;
  std::vector<cplx> z = cov.z_of_eta(eta);
  std::vector<int> p(n, 0);
  for (int l = 0; l < n; ++l) {
    LinearForm form = form_of(cov, l);
    // Same leading-term choice as compose, without the degeneracy errors.
    int lead_var = -1;
    cplx lead_c = form.c0;
    for (int k = 0; k < n; ++k)
      if (cov.at_infinity[k] && form.c[k] != cplx{0.0, 0.0}) lead_var = k;
    if (lead_var < 0 && form.c0 == cplx{0.0, 0.0})
      for (int k = 0; k < n; ++k)
        if (form.c[k] != cplx{0.0, 0.0}) lead_var = k;
    if (lead_var >= 0) lead_c = form.c[lead_var];
    if (lead_c == cplx{0.0, 0.0} || z[l] == cplx{0.0, 0.0}) continue;
    cplx lg = branch_log(lead_c, branches[l]);
    cplx lead_val = lead_c;
    if (lead_var >= 0) {
      const double e = static_cast<double>(cov.sign(lead_var) * cov.t);
      lg += e * branch_log(eta[lead_var], 0);
      lead_val *= std::pow(eta[lead_var], cov.sign(lead_var) * cov.t);
    }
    lg += std::log(z[l] / lead_val);
    p[l] = static_cast<int>(std::lround((lg.imag() - arg0(z[l])) / (2.0 * kPi)));
  }
  return p;
}

}  // namespace rcalc
}  // namespace tkz
