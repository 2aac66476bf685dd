#include "tkz/linalg.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "tkz/errors.hpp"

namespace tkz {

double arg0(cplx z) {
  double a = std::atan2(z.imag(), z.real());
  if (a < 0.0) a += 2.0 * kPi;
  if (a >= 2.0 * kPi) a -= 2.0 * kPi;
  return a;
}

cplx branch_log(cplx z, int p) { return {std::log(std::abs(z)), arg0(z) + 2.0 * kPi * p}; }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

double max_abs(const CMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

CMatrix solve_sylvester(const CMatrix& a, const CMatrix& b, const CMatrix& c, double singular_tol) {
  const Eigen::Index m = a.rows(), n = b.rows();
  if (a.cols() != m || b.cols() != n || c.rows() != m || c.cols() != n)
    throw NumericError("solve_sylvester: shape mismatch");
  if (c.isZero(0.0)) return CMatrix::Zero(m, n);

  Eigen::ComplexSchur<CMatrix> sa(a), sb(b);
  const CMatrix& ta = sa.matrixT();
  const CMatrix& ua = sa.matrixU();
  const CMatrix& tb = sb.matrixT();
  const CMatrix& ub = sb.matrixU();

  CMatrix f = ua.adjoint() * c * ub;
  CMatrix y = CMatrix::Zero(m, n);
  double scale = std::max({1.0, max_abs(ta), max_abs(tb)});
  for (Eigen::Index k = 0; k < n; ++k) {
    CVector rhs = f.col(k);
    for (Eigen::Index j = 0; j < k; ++j) rhs -= tb(j, k) * y.col(j);
    // Back substitution with (T_A + tb(k,k) I).
    for (Eigen::Index i = m - 1; i >= 0; --i) {
      cplx acc = rhs(i);
      for (Eigen::Index l = i + 1; l < m; ++l) acc -= ta(i, l) * y(l, k);
      cplx diag = ta(i, i) + tb(k, k);
      if (std::abs(diag) <= singular_tol * scale) {
        std::ostringstream os;
        os << "Sylvester operator singular: eig(A)+eig(B) = " << diag;
        throw NumericError(os.str());
      }
      y(i, k) = acc / diag;
    }
  }
  return ua * y * ub.adjoint();
}

double condition_number(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

CMatrix null_space(const CMatrix& a, double rel_tol) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double smax = s.size() > 0 ? s(0) : 0.0;
  double cut = rel_tol * std::max(1.0, smax);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++rank;
  const CMatrix& v = svd.matrixV();
  return v.rightCols(a.cols() - rank);
}

CMatrix matrix_exp(const CMatrix& a) { return a.exp(); }

std::vector<std::vector<int>> cluster_values(const std::vector<cplx>& values, double tol) {
  const int n = static_cast<int>(values.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(values[i] - values[j]) <= tol) parent[find(i)] = find(j);
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[slot[r]].push_back(i);
  }
  return groups;
}

}  // namespace tkz
