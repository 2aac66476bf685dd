#include "tkz/autmod.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "tkz/errors.hpp"

namespace tkz::autmod {

namespace {

cplx root_of_unity(const Rational& a) {
  double th = 2.0 * kPi * a.to_double();
  return {std::cos(th), std::sin(th)};
}

/// Completes the first half of the eigenbasis with dual vectors and their α.
void attach_duals(const liealg::LieAlgebraData& alg, AutomorphismData& aut) {
  const int d = alg.dim;
  CMatrix e = aut.eigenbasis.leftCols(d);
  CMatrix k = liealg::pairing(alg, e, e);
  if (!(condition_number(k) < 1e12)) throw NumericError("eigenbasis Gram matrix is singular");
  CMatrix duals = e * k.inverse();
  aut.eigenbasis.conservativeResize(d, 2 * d);
  aut.eigenbasis.rightCols(d) = duals;
  aut.alpha.resize(2 * d);
  for (int i = 0; i < d; ++i) aut.alpha[d + i] = alpha_prime(aut.alpha[i]);
}

}  // namespace

CVector AutomorphismData::eigen_coords(const CVector& v) const {
  return eigenbasis.leftCols(dim).partialPivLu().solve(v);
}

Rational alpha_prime(const Rational& alpha) {
  if (alpha < Rational(0) || alpha >= Rational(1))
    throw ConfigError("alpha_prime: α = " + alpha.str() + " outside [0, 1)");
  if (alpha.is_zero()) return Rational(0);
  return Rational(1) - alpha;
}

AutomorphismData inner_automorphism(const liealg::LieAlgebraData& alg, const std::vector<Rational>& fractions) {
  if (alg.root_coords.empty()) throw ConfigError("inner_automorphism needs an algebra with root data");
  const std::size_t rank = alg.root_coords.front().size();
  if (fractions.size() != rank)
    throw ConfigError("inner_automorphism: expected " + std::to_string(rank) + " fractions, got " +
                      std::to_string(fractions.size()));
  AutomorphismData aut;
  aut.dim = alg.dim;
  aut.eigenbasis = CMatrix::Identity(alg.dim, alg.dim);
  aut.alpha.resize(alg.dim);
  aut.matrix_g = CMatrix::Zero(alg.dim, alg.dim);
  std::int64_t t = 1;
  for (int i = 0; i < alg.dim; ++i) {
    Rational value(0);
    for (std::size_t k = 0; k < rank; ++k) value += Rational(alg.root_coords[i][k]) * fractions[k];
    aut.alpha[i] = value.frac();
    t = lcm64(t, aut.alpha[i].den());
    aut.matrix_g(i, i) = aut.alpha[i].is_zero() ? cplx{1.0, 0.0} : root_of_unity(aut.alpha[i]);
  }
  if (t > 1000000) throw ConfigError("automorphism order too large");
  aut.order = static_cast<int>(t);
  attach_duals(alg, aut);
  return aut;
}

AutomorphismData automorphism_from_matrix(const liealg::LieAlgebraData& alg, const CMatrix& g, int max_order) {
  const int d = alg.dim;
  if (g.rows() != d || g.cols() != d) throw ConfigError("automorphism matrix has the wrong shape");
  CMatrix power = g;
  int t = 0;
  for (int s = 1; s <= max_order; ++s) {
    if (max_abs(power - CMatrix::Identity(d, d)) < 1e-9) {
      t = s;
      break;
    }
    power = power * g;
  }
  if (t == 0) throw ConfigError("automorphism matrix does not have finite order <= " + std::to_string(max_order));

  AutomorphismData aut;
  aut.dim = d;
  aut.order = t;
  aut.matrix_g = g;
  aut.eigenbasis = CMatrix::Zero(d, 0);
  for (int k = 0; k < t; ++k) {
    Rational a(k, t);
    CMatrix ns = null_space(g - root_of_unity(a) * CMatrix::Identity(d, d), 1e-9);
    for (Eigen::Index c = 0; c < ns.cols(); ++c) {
      aut.eigenbasis.conservativeResize(d, aut.eigenbasis.cols() + 1);
      aut.eigenbasis.rightCols(1) = ns.col(c);
      aut.alpha.push_back(a);
    }
  }
  if (aut.eigenbasis.cols() != d) throw ConfigError("automorphism matrix is not diagonalizable with root-of-unity spectrum");
  attach_duals(alg, aut);
  AutomorphismChecks chk = check_automorphism(alg, aut);
  if (chk.homomorphism > 1e-10) throw ConfigError("matrix is not a Lie algebra automorphism");
  return aut;
}

AutomorphismChecks check_automorphism(const liealg::LieAlgebraData& alg, const AutomorphismData& aut) {
  AutomorphismChecks out;
  const int d = alg.dim;
  const CMatrix& g = aut.matrix_g;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      CVector ei = CVector::Unit(d, i), ej = CVector::Unit(d, j);
      CVector lhs = g * alg.bracket(ei, ej);
      CVector rhs = alg.bracket(g * ei, g * ej);
      out.homomorphism = std::max(out.homomorphism, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  CMatrix power = CMatrix::Identity(d, d);
  for (int s = 1; s <= aut.order; ++s) {
    power = power * g;
    double dev = max_abs(power - CMatrix::Identity(d, d));
    if (s < aut.order && dev < 1e-9) out.minimal_order = false;
    if (s == aut.order) out.power_identity = dev;
  }
  for (int i = 0; i < aut.size(); ++i) {
    CVector v = aut.vec(i);
    out.eigen = std::max(out.eigen, (g * v - root_of_unity(aut.alpha[i]) * v).cwiseAbs().maxCoeff());
  }
  CMatrix pair = liealg::pairing(alg, aut.eigenbasis.rightCols(d), aut.eigenbasis.leftCols(d));
  out.duality = max_abs(pair - CMatrix::Identity(d, d));
  for (int i = 0; i < aut.size(); ++i) {
    if (aut.prime(aut.prime(i)) != i) out.involution = false;
    if (aut.alpha[aut.prime(i)] != alpha_prime(aut.alpha[i])) out.pairing = false;
  }
  return out;
}

std::vector<int> fixed_subalgebra(const liealg::LieAlgebraData& alg, const AutomorphismData& aut) {
  std::vector<int> fixed;
  for (int i = 0; i < aut.dim; ++i)
    if (aut.alpha[i].is_zero()) fixed.push_back(i);
  std::vector<bool> is_fixed(aut.dim, false);
  for (int i : fixed) is_fixed[i] = true;
  for (int i : fixed)
    for (int j : fixed) {
      CVector c = aut.eigen_coords(alg.bracket(aut.vec(i), aut.vec(j)));
      for (int k = 0; k < aut.dim; ++k)
        if (!is_fixed[k] && std::abs(c(k)) > 1e-10)
          throw NumericError("fixed subalgebra is not closed under the bracket");
    }
  return fixed;
}

liealg::ModuleRep twisted_slot_rep(const liealg::LieAlgebraData& alg, const AutomorphismData& aut,
                                   const TwistedSlotSpec& spec) {
  const int d = aut.dim;
  std::vector<int> fixed = fixed_subalgebra(alg, aut);
  std::vector<bool> is_fixed(d, false);
  for (int i : fixed) is_fixed[i] = true;

  liealg::ModuleRep rep;
  switch (spec.kind) {
    case TwistedSlotSpec::Kind::Trivial:
      rep.dim = 1;
      rep.action.assign(d, CMatrix::Zero(1, 1));
      break;
    case TwistedSlotSpec::Kind::Matrices: {
      if (spec.matrices.empty()) throw ConfigError("twisted slot: no matrices given");
      rep.dim = static_cast<int>(spec.matrices.front().second.rows());
      rep.action.assign(d, CMatrix::Zero(rep.dim, rep.dim));
      std::vector<bool> given(d, false);
      for (const auto& [idx, m] : spec.matrices) {
        if (idx < 0 || idx >= d) throw ConfigError("twisted slot: index " + std::to_string(idx) + " out of range");
        if (!is_fixed[idx])
          throw ConfigError("twisted slot: index " + std::to_string(idx) +
                            " is not in the fixed subalgebra (α = " + aut.alpha[idx].str() + ")");
        if (m.rows() != rep.dim || m.cols() != rep.dim) throw ConfigError("twisted slot: inconsistent matrix shapes");
        rep.action[idx] = m;
        given[idx] = true;
      }
      for (int i : fixed)
        if (!given[i]) throw ConfigError("twisted slot: missing matrix for fixed index " + std::to_string(i));
      break;
    }
    case TwistedSlotSpec::Kind::Spin: {
      if (alg.dim != 3 || alg.name != "sl(2)") throw ConfigError("twisted slot spin spec requires sl(2)");
      liealg::ModuleRep full = liealg::build_irrep_sl2(spec.spin);
      rep.dim = full.dim;
      rep.spin = spec.spin;
      rep.action.assign(d, CMatrix::Zero(rep.dim, rep.dim));
      for (int i : fixed) rep.action[i] = full.act(aut.vec(i), 0.0);
      break;
    }
  }
  rep.defined = is_fixed;
  if (spec.kind == TwistedSlotSpec::Kind::Trivial) rep.defined.assign(d, true);

  // Homomorphism check on the fixed subalgebra, in eigenbasis coordinates.
  for (int i : fixed)
    for (int j : fixed) {
      CVector c = aut.eigen_coords(alg.bracket(aut.vec(i), aut.vec(j)));
      CMatrix lhs = CMatrix::Zero(rep.dim, rep.dim);
      for (int k : fixed) lhs += c(k) * rep.action[k];
      double defect = max_abs(lhs - commutator(rep.action[i], rep.action[j]));
      if (defect > 1e-10) {
        std::ostringstream os;
        os << "twisted slot matrices are not a representation of the fixed subalgebra (defect " << defect << ")";
        throw ConfigError(os.str());
      }
    }
  return rep;
}

CMatrix twisted_act(const AutomorphismData& aut, const liealg::ModuleRep& rep, int index) {
  CVector c = aut.eigen_coords(aut.vec(index));
  CMatrix out = CMatrix::Zero(rep.dim, rep.dim);
  for (int k = 0; k < aut.dim; ++k) {
    if (std::abs(c(k)) <= 1e-12) continue;
    if (!rep.defined[k])
      throw ConfigError("twisted slot acts only through the fixed subalgebra; index " + std::to_string(index) +
                        " has a component on non-fixed a^" + std::to_string(k));
    out += c(k) * rep.action[k];
  }
  return out;
}

}  // namespace tkz::autmod
