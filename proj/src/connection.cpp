#include "tkz/connection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "tkz/errors.hpp"

namespace tkz::connection {

using rcalc::RElement;
using rcalc::RMatrix;

CMatrix embed(const std::vector<int>& dims, int slot, const CMatrix& op) {
  if (slot < 0 || slot >= static_cast<int>(dims.size())) throw ConfigError("slot index out of range");
  CMatrix out = CMatrix::Identity(1, 1);
  for (int s = 0; s < static_cast<int>(dims.size()); ++s) {
    if (s == slot) {
      if (op.rows() != dims[s] || op.cols() != dims[s])
        throw ConfigError("operator on slot " + std::to_string(s) + " has the wrong size");
      out = kron(out, op);
    } else {
      out = kron(out, CMatrix::Identity(dims[s], dims[s]));
    }
  }
  return out;
}

CMatrix OmegaSet::grouped_pair(int l, int p, const Rational& a) const {
  CMatrix out = CMatrix::Zero(state_dim, state_dim);
  for (int i = 0; i < 2 * alg_dim; ++i)
    if (alpha[i] == a) out += raw_pair[l][p][i];
  return prefactor * out;
}

std::vector<Rational> OmegaSet::alpha_values() const {
  std::set<Rational> s(alpha.begin(), alpha.end());
  return {s.begin(), s.end()};
}

namespace {

struct RawOmega {
  // Unscaled operators; the prefactor is applied once per group so that the identity
  // automorphism reproduces the classical sums bit for bit.
  std::vector<std::vector<std::vector<CMatrix>>> pair;
  std::vector<CMatrix> slot_fixed;   // Σ_{α=0} ρ_ℓ(a^{i'}) ρ_{N+1}(a^i)
  std::vector<CMatrix> slot_moving;  // Σ_{α≠0} α ρ_ℓ(a^i) ρ_ℓ(a^{i'})
};

void validate_reps(const liealg::LieAlgebraData& alg, const SlotReps& reps) {
  for (std::size_t s = 0; s < reps.untwisted.size(); ++s) {
    const auto& r = reps.untwisted[s];
    if (static_cast<int>(r.action.size()) != alg.dim || !r.fully_defined())
      throw ConfigError("slot " + std::to_string(s + 1) + ": representation must define all basis elements");
    double defect = liealg::homomorphism_defect(alg, r);
    if (defect > 1e-10) {
      std::ostringstream os;
      os << "slot " << s + 1 << ": not a representation (defect " << defect << ")";
      throw ConfigError(os.str());
    }
  }
  if (reps.passive_dim < 1) throw ConfigError("passive slot dimension must be positive");
}

}  // namespace

OmegaSet build_omega_set(const liealg::LieAlgebraData& alg, const autmod::AutomorphismData& aut, cplx level,
                         const SlotReps& reps, OmegaOrder order) {
  liealg::require_noncritical(alg, level);
  validate_reps(alg, reps);
  if (aut.dim != alg.dim) throw ConfigError("automorphism and algebra dimensions differ");
  const int n = static_cast<int>(reps.untwisted.size());
  if (n < 1) throw ConfigError("at least one untwisted slot is required");
  const int tw = n + 1;

  OmegaSet om;
  om.n = n;
  om.alg_dim = alg.dim;
  om.level = level;
  om.prefactor = 1.0 / (2.0 * (level + alg.dual_coxeter.to_double()));
  om.alpha = aut.alpha;
  om.order = order;
  om.dims.push_back(reps.passive_dim);
  for (const auto& r : reps.untwisted) om.dims.push_back(r.dim);
  om.dims.push_back(reps.twisted.dim);
  for (int d : om.dims) om.state_dim *= d;

  const int m = aut.size();
  // ρ_s(a^i) for every slot and doubled index, embedded.
  std::vector<std::vector<CMatrix>> local(n);
  for (int l = 0; l < n; ++l) {
    local[l].resize(m);
    for (int i = 0; i < m; ++i) local[l][i] = reps.untwisted[l].act(aut.vec(i), 0.0);
  }
  std::vector<CMatrix> tw_local(m);
  for (int i = 0; i < m; ++i)
    if (aut.alpha[i].is_zero()) tw_local[i] = autmod::twisted_act(aut, reps.twisted, i);

  RawOmega raw;
  raw.pair.assign(n, std::vector<std::vector<CMatrix>>(n));
  for (int l = 0; l < n; ++l)
    for (int p = 0; p < n; ++p) {
      if (l == p) continue;
      raw.pair[l][p].resize(m);
      for (int i = 0; i < m; ++i)
        raw.pair[l][p][i] = embed(om.dims, l + 1, local[l][aut.prime(i)]) * embed(om.dims, p + 1, local[p][i]);
    }
  raw.slot_fixed.assign(n, CMatrix::Zero(om.state_dim, om.state_dim));
  raw.slot_moving.assign(n, CMatrix::Zero(om.state_dim, om.state_dim));
  for (int l = 0; l < n; ++l) {
    CMatrix moving = CMatrix::Zero(om.dims[l + 1], om.dims[l + 1]);
    for (int i = 0; i < m; ++i) {
      if (aut.alpha[i].is_zero()) {
        raw.slot_fixed[l] += embed(om.dims, l + 1, local[l][aut.prime(i)]) * embed(om.dims, tw, tw_local[i]);
      } else {
        const CMatrix& x = local[l][i];
        const CMatrix& y = local[l][aut.prime(i)];
        moving += aut.alpha[i].to_double() * (order == OmegaOrder::Displayed ? CMatrix(x * y) : CMatrix(y * x));
      }
    }
    raw.slot_moving[l] = embed(om.dims, l + 1, moving);
  }

  om.raw_pair = raw.pair;
  om.pair.assign(n, std::vector<std::vector<CMatrix>>(n));
  for (int l = 0; l < n; ++l)
    for (int p = 0; p < n; ++p) {
      if (l == p) continue;
      om.pair[l][p].resize(m);
      for (int i = 0; i < m; ++i) om.pair[l][p][i] = om.prefactor * raw.pair[l][p][i];
    }
  om.slot.resize(n);
  for (int l = 0; l < n; ++l) om.slot[l] = om.prefactor * (raw.slot_fixed[l] - raw.slot_moving[l]);

  for (int k : autmod::fixed_subalgebra(alg, aut)) {
    CMatrix tot = CMatrix::Zero(om.state_dim, om.state_dim);
    for (int l = 0; l < n; ++l) tot += embed(om.dims, l + 1, local[l][k]);
    tot += embed(om.dims, tw, autmod::twisted_act(aut, reps.twisted, k));
    om.fixed_action.push_back(std::move(tot));
  }
  return om;
}

OmegaChecks check_omega(const OmegaSet& om) {
  OmegaChecks c;
  const int m = 2 * om.alg_dim;
  auto prime = [&](int i) { return i < om.alg_dim ? i + om.alg_dim : i - om.alg_dim; };
  for (int l = 0; l < om.n; ++l)
    for (int p = 0; p < om.n; ++p) {
      if (l == p) continue;
      for (int i = 0; i < m; ++i)
        c.symmetry = std::max(c.symmetry, max_abs(om.pair[l][p][i] - om.pair[p][l][prime(i)]));
    }
  // Individual Ω^i need not be invariant when the fixed subalgebra is nonabelian;
  // the sums over one eigenvalue are.
  for (const auto& x : om.fixed_action) {
    for (int l = 0; l < om.n; ++l) {
      for (int p = 0; p < om.n; ++p) {
        if (l == p) continue;
        for (const auto& a : om.alpha_values())
          c.equivariance = std::max(c.equivariance, max_abs(commutator(om.grouped_pair(l, p, a), x)));
      }
      c.equivariance = std::max(c.equivariance, max_abs(commutator(om.slot[l], x)));
    }
  }
  return c;
}

std::vector<CMatrix> ConnectionSystem::eval(const std::vector<cplx>& z, const std::vector<int>& p) const {
  std::vector<CMatrix> out;
  out.reserve(A.size());
  for (const auto& a : A) out.push_back(a.eval(z, p));
  return out;
}

std::vector<CMatrix> ConnectionSystem::eval_with_logs(const std::vector<cplx>& z, const std::vector<cplx>& logs) const {
  std::vector<CMatrix> out;
  out.reserve(A.size());
  for (const auto& a : A) out.push_back(a.eval_with_logs(z, logs));
  return out;
}

ConnectionSystem assemble_connection(const OmegaSet& om, int t) {
  const int n = om.n;
  for (const auto& a : om.alpha)
    if (!(a * Rational(t)).is_integer())
      throw ConfigError("eigenvalue " + a.str() + " is not a multiple of 1/" + std::to_string(t));
  ConnectionSystem conn;
  conn.n = n;
  conn.t = t;
  conn.state_dim = om.state_dim;
  conn.alpha = om.alpha;
  conn.dims = om.dims;
  conn.description = "twisted KZ";
  conn.A.assign(n, RMatrix(om.state_dim, om.state_dim, n, t));
  for (int l = 0; l < n; ++l) {
    for (int p = 0; p < n; ++p) {
      if (p == l) continue;
      for (const auto& a : om.alpha_values()) {
        CMatrix op = om.grouped_pair(l, p, a);
        if (max_abs(op) == 0.0) continue;
        RElement coeff = RElement::power(n, t, p, a) * RElement::power(n, t, l, -a) *
                         RElement::difference(n, t, l, p, -1);
        rcalc::add_scaled(conn.A[l], coeff, op.transpose());
      }
    }
    if (max_abs(om.slot[l]) != 0.0)
      rcalc::add_scaled(conn.A[l], RElement::power(n, t, l, Rational(-1)), om.slot[l].transpose());
  }
  return conn;
}

ConnectionSystem classical_connection(const liealg::LieAlgebraData& alg, cplx level,
                                      const std::vector<liealg::ModuleRep>& untwisted,
                                      const liealg::ModuleRep& twisted, int passive_dim) {
  liealg::require_noncritical(alg, level);
  SlotReps reps{untwisted, twisted, passive_dim};
  validate_reps(alg, reps);
  if (!twisted.fully_defined() || static_cast<int>(twisted.action.size()) != alg.dim)
    throw ConfigError("classical connection needs a representation on the whole algebra in the last slot");
  const int n = static_cast<int>(untwisted.size());
  std::vector<int> dims{passive_dim};
  for (const auto& r : untwisted) dims.push_back(r.dim);
  dims.push_back(twisted.dim);
  int d = 1;
  for (int x : dims) d *= x;
  const cplx pref = 1.0 / (2.0 * (level + alg.dual_coxeter.to_double()));
  const CMatrix dual = liealg::dual_basis(alg);
  const int dim = alg.dim;

  auto rho = [&](const liealg::ModuleRep& r, int i, bool dual_vec) {
    CVector v = dual_vec ? CVector(dual.col(i)) : CVector(CVector::Unit(dim, i));
    return r.act(v, 0.0);
  };

  ConnectionSystem conn;
  conn.n = n;
  conn.t = 1;
  conn.state_dim = d;
  conn.alpha.assign(2 * dim, Rational(0));
  conn.dims = dims;
  conn.A.assign(n, RMatrix(d, d, n, 1));
  for (int l = 0; l < n; ++l) {
    for (int p = 0; p < n; ++p) {
      if (p == l) continue;
      // Σ over I ⊔ I' of ρ_ℓ(a^{i'})ρ_p(a^i), i.e. the Casimir tensor counted from both sides.
      CMatrix raw = CMatrix::Zero(d, d);
      for (int i = 0; i < dim; ++i)
        raw += embed(dims, l + 1, rho(untwisted[l], i, true)) * embed(dims, p + 1, rho(untwisted[p], i, false));
      for (int i = 0; i < dim; ++i)
        raw += embed(dims, l + 1, rho(untwisted[l], i, false)) * embed(dims, p + 1, rho(untwisted[p], i, true));
      CMatrix op = pref * raw;
      if (max_abs(op) == 0.0) continue;
      rcalc::add_scaled(conn.A[l], RElement::difference(n, 1, l, p, -1), op.transpose());
    }
    CMatrix raw = CMatrix::Zero(d, d);
    for (int i = 0; i < dim; ++i)
      raw += embed(dims, l + 1, rho(untwisted[l], i, true)) * embed(dims, n + 1, rho(twisted, i, false));
    for (int i = 0; i < dim; ++i)
      raw += embed(dims, l + 1, rho(untwisted[l], i, false)) * embed(dims, n + 1, rho(twisted, i, true));
    CMatrix op = pref * raw;
    if (max_abs(op) != 0.0) rcalc::add_scaled(conn.A[l], RElement::power(n, 1, l, Rational(-1)), op.transpose());
  }
  conn.description = "classical KZ";
  return conn;
}

ConnectionSystem same_sign_variant(const ConnectionSystem& conn) {
  ConnectionSystem out = conn;
  const int n = conn.n;
  for (int l = 0; l < n; ++l) {
    for (auto& e : out.A[l].entries) {
      RElement flipped(n, e.root_order());
      for (const auto& [key, c] : e.terms()) {
        bool flip = false;
        for (int p = 0; p < l; ++p)
          if (key.diffs[rcalc::pair_index(n, p, l)] % 2 != 0) flip = !flip;
        flipped += RElement::monomial(n, e.root_order(), key, flip ? -c : c);
      }
      e = flipped;
    }
  }
  out.description = conn.description + " (same-sign pair terms)";
  return out;
}

ShapeReport check_shape(const ConnectionSystem& conn) {
  ShapeReport rep;
  const int n = conn.n;
  for (int l = 0; l < n; ++l)
    for (const auto& e : conn.A[l].entries) {
      for (const auto& [key, c] : e.terms()) {
        if (e.degree(key) != Rational(-1)) rep.homogeneous = false;
        int nd = 0;
        int partner = -1;
        for (int p = 0; p < n; ++p) {
          if (p == l) continue;
          if (key.diffs[rcalc::pair_index(n, l, p)] != 0) {
            ++nd;
            partner = p;
          }
        }
        bool ok = true;
        const std::int64_t tt = e.root_order();
        if (nd == 0) {
          for (int v = 0; v < n; ++v) ok = ok && key.powers[v] == (v == l ? -tt : 0);
          for (auto m : key.diffs) ok = ok && m == 0;
        } else if (nd == 1) {
          const int p = partner;
          std::int64_t a = key.powers[p];
          ok = key.diffs[rcalc::pair_index(n, l, p)] == -1 && key.powers[l] == -a && a >= 0 && a < tt;
          for (int v = 0; v < n; ++v)
            if (v != l && v != p) ok = ok && key.powers[v] == 0;
          for (int q = 0; q < rcalc::pair_count(n); ++q)
            if (q != rcalc::pair_index(n, l, p)) ok = ok && key.diffs[q] == 0;
        } else {
          ok = false;
        }
        if (!ok && rep.ok) {
          rep.ok = false;
          rep.offender = "A_" + std::to_string(l + 1) + ": " + RElement::monomial(n, e.root_order(), key, 1.0).str();
        }
      }
    }
  return rep;
}

EulerResult euler_contraction(const ConnectionSystem& conn, const std::vector<std::vector<cplx>>& points,
                              const std::vector<std::vector<int>>& branches) {
  if (points.empty()) throw ConfigError("euler contraction needs at least one sample point");
  EulerResult res;
  res.mean = CMatrix::Zero(conn.state_dim, conn.state_dim);
  for (std::size_t s = 0; s < points.size(); ++s) {
    const auto& z = points[s];
    std::vector<int> p = s < branches.size() ? branches[s] : std::vector<int>(z.size(), 0);
    auto a = conn.eval(z, p);
    CMatrix e = CMatrix::Zero(conn.state_dim, conn.state_dim);
    for (int l = 0; l < conn.n; ++l) e += z[l] * a[l];
    res.mean += e;
    res.values.push_back(std::move(e));
  }
  res.mean /= static_cast<double>(points.size());
  for (const auto& v : res.values)
    for (const auto& w : res.values) res.deviation = std::max(res.deviation, max_abs(v - w));
  return res;
}

FlatnessResult flatness_residual(const ConnectionSystem& conn, const std::vector<cplx>& z, const std::vector<int>& p) {
  FlatnessResult res;
  const int n = conn.n;
  if (n < 2) return res;
  auto a = conn.eval(z, p);
  std::vector<std::vector<CMatrix>> da(n);  // da[m][l] = ∂_l A_m
  for (int m = 0; m < n; ++m)
    for (int l = 0; l < n; ++l) da[m].push_back(conn.A[m].differentiate(l).eval(z, p));
  const double eps = std::numeric_limits<double>::epsilon();
  for (int l = 0; l < n; ++l)
    for (int m = l + 1; m < n; ++m) {
      CMatrix r = da[m][l] - da[l][m] - commutator(a[l], a[m]);
      double v = r.norm();
      res.per_pair.push_back(v);
      res.residual = std::max(res.residual, v);
      double scale = da[m][l].norm() + da[l][m].norm() + 2.0 * a[l].norm() * a[m].norm();
      res.est_error = std::max(res.est_error, 8.0 * conn.state_dim * eps * scale);
    }
  return res;
}

}  // namespace tkz::connection
