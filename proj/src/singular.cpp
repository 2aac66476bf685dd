#include "tkz/singular.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tkz/errors.hpp"

namespace tkz::singular {

std::vector<CMatrix> TransformedSystem::eval(const std::vector<cplx>& eta) const {
  std::vector<CMatrix> out;
  for (const auto& b : B) {
    CMatrix v = b.eval(eta, std::vector<int>(eta.size(), 0));
    out.push_back(v.size() == 0 ? CMatrix::Zero(state_dim, state_dim) : v);
  }
  return out;
}

TransformedSystem transform_system(const connection::ConnectionSystem& conn, const ChangeOfVariables& cov,
                                   const std::vector<Rational>& cutoffs, const rcalc::ComposeOptions& opt) {
  const int n = conn.n;
  if (cov.size() != n) throw ConfigError("change of variables has the wrong dimension");
  if (static_cast<int>(cutoffs.size()) != n) throw ConfigError("one cutoff per variable is required");
  TransformedSystem ts;
  ts.cov = cov;
  ts.state_dim = conn.state_dim;
  ts.cutoffs = cutoffs;
  ts.options = opt;
  ts.den = rcalc::composed_den(conn.t, cov);
  for (int j = 0; j < n; ++j) {
    // Σ_ℓ b_{jℓ} A_ℓ, combined before composing so that exact cancellations happen symbolically.
    rcalc::RMatrix sum(conn.state_dim, conn.state_dim, n, conn.t);
    for (int l = 0; l < n; ++l) {
      const cplx b = cov.B(j, l);
      if (b == cplx{0.0, 0.0}) continue;
      for (std::size_t k = 0; k < sum.entries.size(); ++k) sum.entries[k] += conn.A[l].entries[k].scaled(b);
    }
    const int s = cov.sign(j);
    // ζ_j = η_j^{s t}: compose below the cutoff minus that shift.
    std::vector<Rational> inner = cutoffs;
    inner[j] = inner[j] - Rational(static_cast<std::int64_t>(s) * cov.t);
    rcalc::MatrixSeries comp = rcalc::compose_change(sum, cov, inner, opt);
    std::vector<std::int64_t> shift(n, 0);
    shift[j] = static_cast<std::int64_t>(s) * cov.t * comp.den();
    rcalc::MatrixSeries bj = comp.shifted(shift);
    rcalc::MatrixSeries scaled_bj(n, bj.den(), bj.cutoffs(), bj.lower());
    for (const auto& [key, m] : bj.terms()) scaled_bj.add_term(key, static_cast<double>(s * cov.t) * m);
    ts.B.push_back(std::move(scaled_bj));
  }
  return ts;
}

Verdict verdict_of(const TransformedSystem& ts) {
  Verdict v;
  for (int j = 0; j < ts.size(); ++j) {
    const auto& b = ts.B[j];
    v.min_exponents.push_back(b.min_exponents());
    for (const auto& [key, m] : b.terms()) {
      bool negative = false;
      for (auto e : key.exps) negative = negative || e < 0;
      if (!negative) continue;
      v.holomorphic = false;
      Offender o;
      o.component = j;
      for (auto e : key.exps) o.exponents.emplace_back(e, b.den());
      o.magnitude = max_abs(m);
      v.offenders.push_back(std::move(o));
    }
  }
  return v;
}

SimpleSingularityResult check_simple_singularity(const connection::ConnectionSystem& conn, const ChangeOfVariables& cov,
                                                 const std::vector<Rational>& cutoffs,
                                                 const rcalc::ComposeOptions& opt) {
  TransformedSystem first = transform_system(conn, cov, cutoffs, opt);
  std::vector<Rational> raised = cutoffs;
  for (auto& c : raised) c = c + Rational(cov.t);
  TransformedSystem second = transform_system(conn, cov, raised, opt);
  Verdict v1 = verdict_of(first);
  Verdict v2 = verdict_of(second);

  // Offenders of the finer run that lie inside the coarser box must match exactly.
  auto inside = [&](const Offender& o) {
    for (std::size_t k = 0; k < o.exponents.size(); ++k)
      if (!(o.exponents[k] < cutoffs[k])) return false;
    return true;
  };
  std::set<std::pair<int, std::vector<Rational>>> s1, s2;
  for (const auto& o : v1.offenders) s1.emplace(o.component, o.exponents);
  for (const auto& o : v2.offenders)
    if (inside(o)) s2.emplace(o.component, o.exponents);
  if (v1.holomorphic != v2.holomorphic || s1 != s2)
    throw InconclusiveError("holomorphy verdict changes when the cutoff is raised by " + std::to_string(cov.t) +
                            "; raise the cutoff");
  return {v1, first};
}

IndicialData indicial_from_matrix(const CMatrix& h0) {
  IndicialData d;
  d.H0 = h0;
  Eigen::ComplexEigenSolver<CMatrix> es(h0, false);
  if (es.info() != Eigen::Success) throw NumericError("eigenvalue computation failed for H0");
  for (int i = 0; i < h0.rows(); ++i) d.exponents.push_back(es.eigenvalues()(i));
  std::sort(d.exponents.begin(), d.exponents.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  for (auto& e : d.exponents) {
    std::optional<Rational> r;
    if (std::abs(e.imag()) < 1e-9) r = snap_rational(e.real());
    if (r) e = cplx(r->to_double(), 0.0);
    d.exact.push_back(r);
  }
  for (std::size_t a = 0; a < d.exponents.size(); ++a)
    for (std::size_t b = 0; b < d.exponents.size(); ++b) {
      if (a == b) continue;
      if (d.exact[a] && d.exact[b]) {
        Rational diff = *d.exact[a] - *d.exact[b];
        if (diff.is_integer() && diff.num() > 0) d.resonant = true;
      } else {
        cplx diff = d.exponents[a] - d.exponents[b];
        double k = std::round(diff.real());
        if (k >= 1 && std::abs(diff - cplx(k, 0.0)) < 1e-9) d.resonant = true;
      }
    }
  return d;
}

IndicialData indicial_data(const TransformedSystem& ts, int j) {
  if (j < 0 || j >= ts.size()) throw ConfigError("component index out of range");
  const auto& b = ts.B[j];
  CMatrix h0 = CMatrix::Zero(ts.state_dim, ts.state_dim);
  for (const auto& [key, m] : b.terms()) {
    bool zero = true;
    for (auto e : key.exps) {
      if (e < 0) throw NumericError("B_" + std::to_string(j + 1) + " is not holomorphic; no indicial data");
      zero = zero && e == 0;
    }
    if (zero) h0 = m;
  }
  return indicial_from_matrix(h0);
}

SectionSeries section(const TransformedSystem& ts, int j, const std::vector<cplx>& fixed) {
  const int n = ts.size();
  if (j < 0 || j >= n) throw ConfigError("component index out of range");
  if (static_cast<int>(fixed.size()) != n) throw ConfigError("section needs a value for every eta");
  const auto& b = ts.B[j];
  const std::int64_t cut = b.cutoffs()[j];
  if (cut >= rcalc::kNoCutoff) throw ConfigError("section: component has no finite cutoff");
  const int den = b.den();
  const std::int64_t count = cut <= 0 ? 0 : (cut + den - 1) / den;
  SectionSeries s;
  s.H.assign(static_cast<std::size_t>(count), CMatrix::Zero(ts.state_dim, ts.state_dim));
  for (const auto& [key, m] : b.terms()) {
    const std::int64_t e = key.exps[j];
    if (e < 0) throw NumericError("section: B_" + std::to_string(j + 1) + " has a negative power of eta");
    if (e % den != 0) throw ConfigError("section: fractional power of eta" + std::to_string(j + 1));
    cplx w{1.0, 0.0};
    for (int k = 0; k < n; ++k) {
      if (k == j || key.exps[k] == 0) continue;
      if (key.exps[k] < 0 || key.exps[k] % den != 0)
        throw ConfigError("section: coefficient is not holomorphic in eta" + std::to_string(k + 1));
      w *= std::pow(fixed[k], static_cast<int>(key.exps[k] / den));
    }
    s.H[static_cast<std::size_t>(e / den)] += w * m;
  }
  return s;
}

}  // namespace tkz::singular
