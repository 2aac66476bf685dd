#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace tkz {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// arg z in [0, 2π).
double arg0(cplx z);
/// l_p(z) = log|z| + i(arg z + 2πp), arg z in [0, 2π).
cplx branch_log(cplx z, int p);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix commutator(const CMatrix& a, const CMatrix& b);
double max_abs(const CMatrix& a);

/// Solves A X + X B = C by complex Schur forms of A and B.
/// Throws NumericError when some eig(A) + eig(B) is within `singular_tol` of zero.
CMatrix solve_sylvester(const CMatrix& a, const CMatrix& b, const CMatrix& c, double singular_tol = 1e-12);

/// 2-norm condition number via SVD.
double condition_number(const CMatrix& a);

/// Orthonormal basis of the null space, from the SVD with relative tolerance.
CMatrix null_space(const CMatrix& a, double rel_tol = 1e-9);

CMatrix matrix_exp(const CMatrix& a);

/// Groups values into clusters whose members are within tol of some other member.
std::vector<std::vector<int>> cluster_values(const std::vector<cplx>& values, double tol);

}  // namespace tkz
