#include "tkz/liealg.hpp"

#include <cmath>
#include <sstream>

#include "tkz/errors.hpp"

namespace tkz::liealg {

namespace {

constexpr double kInvariantTol = 1e-12;
constexpr double kMaxCondition = 1e12;

CMatrix gram_from_defining(const std::vector<CMatrix>& mats) {
  const int d = static_cast<int>(mats.size());
  CMatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = (mats[i] * mats[j]).trace();
  return g;
}

std::vector<cplx> structure_from_defining(const std::vector<CMatrix>& mats, const CMatrix& ginv) {
  const int d = static_cast<int>(mats.size());
  std::vector<cplx> sc(static_cast<std::size_t>(d) * d * d, cplx{0.0, 0.0});
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      CMatrix br = commutator(mats[i], mats[j]);
      CVector pair(d);
      for (int m = 0; m < d; ++m) pair(m) = (br * mats[m]).trace();
      CVector coords = ginv * pair;
      for (int k = 0; k < d; ++k) {
        cplx v = coords(k);
        // The sl(n) constants are small integers; drop rounding fuzz.
        if (std::abs(v.real() - std::round(v.real())) < 1e-13) v.real(std::round(v.real()));
        if (std::abs(v.imag() - std::round(v.imag())) < 1e-13) v.imag(std::round(v.imag()));
        sc[(static_cast<std::size_t>(i) * d + j) * d + k] = v;
      }
    }
  return sc;
}

}  // namespace

CVector LieAlgebraData::bracket(const CVector& u, const CVector& v) const {
  CVector out = CVector::Zero(dim);
  for (int i = 0; i < dim; ++i) {
    if (u(i) == cplx{0.0, 0.0}) continue;
    for (int j = 0; j < dim; ++j) {
      cplx w = u(i) * v(j);
      if (w == cplx{0.0, 0.0}) continue;
      for (int k = 0; k < dim; ++k) out(k) += w * c(i, j, k);
    }
  }
  return out;
}

CMatrix LieAlgebraData::ad(int i) const {
  CMatrix m = CMatrix::Zero(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int k = 0; k < dim; ++k) m(k, j) = c(i, j, k);
  return m;
}

AlgebraChecks check_algebra(const LieAlgebraData& alg) {
  AlgebraChecks out;
  const int d = alg.dim;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        out.antisymmetry = std::max(out.antisymmetry, std::abs(alg.c(i, j, k) + alg.c(j, i, k)));
  std::vector<CMatrix> ads;
  for (int i = 0; i < d; ++i) ads.push_back(alg.ad(i));
  // Jacobi in the form ad([a,b]) = [ad a, ad b].
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      CMatrix lhs = CMatrix::Zero(d, d);
      for (int k = 0; k < d; ++k) lhs += alg.c(i, j, k) * ads[k];
      out.jacobi = std::max(out.jacobi, max_abs(lhs - commutator(ads[i], ads[j])));
    }
  // ([a,b],c) + (b,[a,c]) = 0.
  for (int i = 0; i < d; ++i) {
    CMatrix m = ads[i].transpose() * alg.form + alg.form * ads[i];
    out.invariance = std::max(out.invariance, max_abs(m));
  }
  out.symmetry = max_abs(alg.form - alg.form.transpose());
  out.condition = condition_number(alg.form);
  return out;
}

LieAlgebraData make_algebra(std::string name, std::vector<std::string> labels, std::vector<cplx> structure,
                            CMatrix form, Rational dual_coxeter) {
  LieAlgebraData alg;
  alg.dim = static_cast<int>(labels.size());
  if (alg.dim <= 0) throw ConfigError("algebra must have positive dimension");
  if (structure.size() != static_cast<std::size_t>(alg.dim) * alg.dim * alg.dim)
    throw ConfigError("structure constants have the wrong size");
  if (form.rows() != alg.dim || form.cols() != alg.dim) throw ConfigError("form has the wrong shape");
  if (dual_coxeter <= Rational(0)) throw ConfigError("dual Coxeter number must be positive");
  alg.name = std::move(name);
  alg.basis_labels = std::move(labels);
  alg.structure = std::move(structure);
  alg.form = std::move(form);
  alg.dual_coxeter = dual_coxeter;
  AlgebraChecks chk = check_algebra(alg);
  std::ostringstream os;
  if (chk.antisymmetry > kInvariantTol) os << "antisymmetry defect " << chk.antisymmetry << "; ";
  if (chk.jacobi > kInvariantTol) os << "Jacobi defect " << chk.jacobi << "; ";
  if (chk.invariance > kInvariantTol) os << "form invariance defect " << chk.invariance << "; ";
  if (chk.symmetry > kInvariantTol) os << "form not symmetric; ";
  if (!(chk.condition < kMaxCondition)) os << "form singular (condition " << chk.condition << "); ";
  if (!os.str().empty()) throw ConfigError("invalid Lie algebra data: " + os.str());
  return alg;
}

LieAlgebraData build_algebra(const std::string& name, int n) {
  if (name != "sl" && name != "sl(n)") throw ConfigError("unsupported algebra '" + name + "' (supported: sl)");
  if (n < 2) throw ConfigError("sl(n) requires n >= 2");

  auto unit = [n](int i, int j) {
    CMatrix m = CMatrix::Zero(n, n);
    m(i, j) = 1.0;
    return m;
  };
  std::vector<std::pair<int, int>> positive;
  for (int height = 1; height < n; ++height)
    for (int i = 0; i + height < n; ++i) positive.emplace_back(i, i + height);

  std::vector<CMatrix> mats;
  std::vector<std::string> labels;
  std::vector<std::vector<int>> roots;
  const bool small = (n == 2);
  for (auto [i, j] : positive) {
    mats.push_back(unit(i, j));
    labels.push_back(small ? "e" : "e[" + std::to_string(i) + "," + std::to_string(j) + "]");
    std::vector<int> r(n - 1, 0);
    for (int k = i; k < j; ++k) r[k] = 1;
    roots.push_back(r);
  }
  for (int k = 0; k + 1 < n; ++k) {
    mats.push_back(unit(k, k) - unit(k + 1, k + 1));
    labels.push_back(small ? "h" : "h[" + std::to_string(k) + "]");
    roots.emplace_back(n - 1, 0);
  }
  for (auto [i, j] : positive) {
    mats.push_back(unit(j, i));
    labels.push_back(small ? "f" : "f[" + std::to_string(i) + "," + std::to_string(j) + "]");
    std::vector<int> r(n - 1, 0);
    for (int k = i; k < j; ++k) r[k] = -1;
    roots.push_back(r);
  }

  CMatrix g = gram_from_defining(mats);
  CMatrix ginv = g.inverse();
  std::vector<cplx> sc = structure_from_defining(mats, ginv);
  LieAlgebraData alg = make_algebra("sl(" + std::to_string(n) + ")", labels, sc, g, Rational(n));
  alg.defining = std::move(mats);
  alg.root_coords = std::move(roots);
  return alg;
}

CMatrix dual_basis(const LieAlgebraData& alg) {
  double cond = condition_number(alg.form);
  if (!(cond < kMaxCondition)) {
    std::ostringstream os;
    os << "invariant form is singular: condition number " << cond;
    throw NumericError(os.str());
  }
  // (a^{i'}, a^j) = (D^T G)_{ij} = δ_ij with G symmetric gives D = G^{-1}.
  return alg.form.inverse();
}

CMatrix pairing(const LieAlgebraData& alg, const CMatrix& u, const CMatrix& v) {
  return u.transpose() * alg.form * v;
}

LieAlgebraData change_basis(const LieAlgebraData& alg, const CMatrix& p) {
  const int d = alg.dim;
  if (p.rows() != d || p.cols() != d) throw ConfigError("change_basis: shape mismatch");
  CMatrix pinv = p.inverse();
  std::vector<cplx> sc(static_cast<std::size_t>(d) * d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      CVector br = pinv * alg.bracket(p.col(i), p.col(j));
      for (int k = 0; k < d; ++k) sc[(static_cast<std::size_t>(i) * d + j) * d + k] = br(k);
    }
  LieAlgebraData out = alg;
  out.structure = std::move(sc);
  out.form = p.transpose() * alg.form * p;
  out.defining.clear();
  out.root_coords.clear();
  for (int i = 0; i < d; ++i) out.basis_labels[i] = "b" + std::to_string(i);
  return out;
}

bool ModuleRep::fully_defined() const {
  for (bool b : defined)
    if (!b) return false;
  return true;
}

CMatrix ModuleRep::act(const CVector& v, double tol) const {
  CMatrix out = CMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) <= tol) continue;
    if (!defined[i])
      throw ConfigError("representation is not defined on basis index " + std::to_string(i));
    out += v(i) * action[i];
  }
  return out;
}

ModuleRep make_rep(std::vector<CMatrix> action) {
  if (action.empty()) throw ConfigError("representation needs at least one action matrix");
  ModuleRep rep;
  rep.dim = static_cast<int>(action.front().rows());
  for (const auto& m : action)
    if (m.rows() != rep.dim || m.cols() != rep.dim) throw ConfigError("representation matrices have inconsistent shapes");
  rep.defined.assign(action.size(), true);
  rep.action = std::move(action);
  return rep;
}

ModuleRep trivial_rep(int alg_dim) {
  return make_rep(std::vector<CMatrix>(alg_dim, CMatrix::Zero(1, 1)));
}

ModuleRep build_irrep_sl2(const Rational& spin) {
  Rational twice = spin * Rational(2);
  if (spin < Rational(0) || !twice.is_integer())
    throw ConfigError("sl(2) spin must be a nonnegative half-integer, got " + spin.str());
  const int tj = static_cast<int>(twice.num());
  const int d = tj + 1;
  CMatrix e = CMatrix::Zero(d, d), h = CMatrix::Zero(d, d), f = CMatrix::Zero(d, d);
  for (int m = 0; m < d; ++m) {
    h(m, m) = static_cast<double>(tj - 2 * m);
    if (m + 1 < d) f(m + 1, m) = 1.0;
    if (m > 0) e(m - 1, m) = static_cast<double>(m * (tj - m + 1));
  }
  ModuleRep rep = make_rep({e, h, f});
  rep.spin = spin;
  return rep;
}

ModuleRep change_basis(const ModuleRep& rep, const CMatrix& p) {
  std::vector<CMatrix> act;
  for (Eigen::Index i = 0; i < p.cols(); ++i) act.push_back(rep.act(p.col(i), 0.0));
  ModuleRep out = make_rep(std::move(act));
  out.spin = rep.spin;
  out.conformal_weight = rep.conformal_weight;
  return out;
}

double homomorphism_defect(const LieAlgebraData& alg, const ModuleRep& rep) {
  if (static_cast<int>(rep.action.size()) != alg.dim) throw ConfigError("representation/algebra dimension mismatch");
  double worst = 0.0;
  for (int i = 0; i < alg.dim; ++i) {
    if (!rep.defined[i]) continue;
    for (int j = 0; j < alg.dim; ++j) {
      if (!rep.defined[j]) continue;
      CMatrix lhs = CMatrix::Zero(rep.dim, rep.dim);
      bool ok = true;
      for (int k = 0; k < alg.dim; ++k) {
        cplx ck = alg.c(i, j, k);
        if (std::abs(ck) <= 1e-14) continue;
        if (!rep.defined[k]) {
          ok = false;
          break;
        }
        lhs += ck * rep.action[k];
      }
      if (!ok) continue;
      worst = std::max(worst, max_abs(lhs - commutator(rep.action[i], rep.action[j])));
    }
  }
  return worst;
}

CMatrix casimir_matrix(const LieAlgebraData& alg, const ModuleRep& rep) {
  if (static_cast<int>(rep.action.size()) != alg.dim)
    throw ConfigError("casimir_matrix: representation has " + std::to_string(rep.action.size()) +
                      " action matrices, algebra has dimension " + std::to_string(alg.dim));
  if (!rep.fully_defined()) throw ConfigError("casimir_matrix needs a representation of the whole algebra");
  CMatrix dual = dual_basis(alg);
  CMatrix out = CMatrix::Zero(rep.dim, rep.dim);
  for (int i = 0; i < alg.dim; ++i) out += rep.action[i] * rep.act(dual.col(i), 0.0);
  return out;
}

void require_noncritical(const LieAlgebraData& alg, cplx level) {
  if (std::abs(level + alg.dual_coxeter.to_double()) < 1e-12) {
    std::ostringstream os;
    os << "critical level: k = -h^v = " << (-alg.dual_coxeter).str() << " is not allowed";
    throw ConfigError(os.str());
  }
}

cplx conformal_weight(const LieAlgebraData& alg, const ModuleRep& rep, cplx level) {
  require_noncritical(alg, level);
  CMatrix cas = casimir_matrix(alg, rep);
  cplx scalar = cas(0, 0);
  CMatrix residual = cas - scalar * CMatrix::Identity(rep.dim, rep.dim);
  if (max_abs(residual) > 1e-10)
    throw ConfigError("Casimir is not scalar on this representation (reducible input)");
  return scalar / (2.0 * (level + alg.dual_coxeter.to_double()));
}

}  // namespace tkz::liealg
