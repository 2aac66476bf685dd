#include "tkz/frobenius.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "tkz/errors.hpp"
#include "tkz/rational.hpp"

namespace tkz::frobenius {

namespace {

struct EigenGroup {
  cplx value;
  std::optional<Rational> exact;
  int multiplicity = 0;
};

std::vector<EigenGroup> eigen_groups(const CMatrix& m) {
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  if (es.info() != Eigen::Success) throw NumericError("eigenvalue computation failed");
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  // Jordan blocks split eigenvalues by about sqrt(eps); group generously.
  std::vector<EigenGroup> groups;
  for (const auto& c : cluster_values(ev, 1e-6)) {
    EigenGroup g;
    cplx mean{0.0, 0.0};
    for (int k : c) mean += ev[k];
    mean /= static_cast<double>(c.size());
    g.value = mean;
    g.multiplicity = static_cast<int>(c.size());
    if (std::abs(mean.imag()) < 1e-9) {
      g.exact = snap_rational(mean.real(), 10000, 1e-7);
      if (g.exact) g.value = cplx(g.exact->to_double(), 0.0);
    }
    groups.push_back(g);
  }
  std::sort(groups.begin(), groups.end(), [](const EigenGroup& a, const EigenGroup& b) {
    return a.value.real() != b.value.real() ? a.value.real() < b.value.real() : a.value.imag() < b.value.imag();
  });
  return groups;
}

// Positive integer k with λ_a − λ_b = k, or 0.
int integer_gap(const EigenGroup& a, const EigenGroup& b, double tol) {
  if (a.exact && b.exact) {
    Rational d = *a.exact - *b.exact;
    return d.is_integer() && d.num() > 0 ? static_cast<int>(d.num()) : 0;
  }
  cplx d = a.value - b.value;
  double k = std::round(d.real());
  return (k >= 1 && std::abs(d - cplx(k, 0.0)) < tol) ? static_cast<int>(k) : 0;
}

int rank_of(const CMatrix& m, double scale) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-8 * std::max(1.0, scale)) ++r;
  return r;
}

int log_depth_of(const CMatrix& lambda) {
  const int n = static_cast<int>(lambda.rows());
  const double scale = max_abs(lambda);
  int depth = 0;
  for (const auto& g : eigen_groups(lambda)) {
    CMatrix shifted = lambda - g.value * CMatrix::Identity(n, n);
    CMatrix pw = shifted;
    int k = 1;
    while (rank_of(pw, scale) > n - g.multiplicity && k < n) {
      pw = pw * shifted;
      ++k;
    }
    depth = std::max(depth, k - 1);
  }
  return depth;
}

CMatrix coeff(const std::vector<CMatrix>& h, int q, int n) {
  return q < static_cast<int>(h.size()) ? h[q] : CMatrix::Zero(n, n);
}

}  // namespace

CMatrix FrobeniusSolution::shift_matrix() const {
  const int n = static_cast<int>(Lambda.rows());
  CMatrix d = CMatrix::Zero(n, n);
  bool any = false;
  for (int i = 0; i < n; ++i) {
    d(i, i) = static_cast<double>(shifts[i]);
    any = any || shifts[i] != 0;
  }
  if (!any) return d;
  return T * d * T.inverse();
}

FrobeniusSolution frobenius_fundamental(const std::vector<CMatrix>& H, const FrobeniusOptions& opt) {
  if (H.empty()) throw ConfigError("frobenius: at least H_0 is required");
  if (opt.order < 1) throw ConfigError("frobenius: order must be at least 1");
  const int n = static_cast<int>(H[0].rows());
  for (const auto& h : H)
    if (h.rows() != n || h.cols() != n) throw ConfigError("frobenius: coefficient matrices must be square and equal");
  for (const auto& h : H)
    if (!h.allFinite()) throw NumericError("frobenius: non-finite coefficient");
  const int M = opt.order;
  const CMatrix& h0 = H[0];
  const CMatrix id = CMatrix::Identity(n, n);

  FrobeniusSolution sol;
  sol.order = M;
  sol.coefficient_radius = opt.coefficient_radius;
  sol.shifts.assign(n, 0);

  auto groups = eigen_groups(h0);
  for (std::size_t a = 0; a < groups.size(); ++a)
    for (std::size_t b = 0; b < groups.size(); ++b)
      if (a != b && integer_gap(groups[a], groups[b], opt.cluster_tol) > 0) sol.resonant = true;

  if (!sol.resonant) {
    sol.T = id;
    sol.Lambda = h0;
    sol.S.push_back(id);
    for (int m = 1; m <= M; ++m) {
      CMatrix r = CMatrix::Zero(n, n);
      for (int q = 1; q <= m; ++q)
        if (q < static_cast<int>(H.size())) r += H[q] * sol.S[m - q];
      sol.S.push_back(solve_sylvester(static_cast<double>(m) * id - h0, h0, r, 1e-10));
    }
  } else {
    // Generalized eigenspaces give a block-diagonal H_0.
    std::vector<int> start, size;
    CMatrix t(n, 0);
    for (const auto& g : groups) {
      CMatrix shifted = h0 - g.value * id;
      CMatrix pw = id;
      for (int k = 0; k < g.multiplicity; ++k) pw = pw * shifted;
      CMatrix basis = null_space(pw, 1e-8);
      if (basis.cols() != g.multiplicity)
        throw NumericError("frobenius: generalized eigenspace has the wrong dimension");
      start.push_back(static_cast<int>(t.cols()));
      size.push_back(g.multiplicity);
      CMatrix grown(n, t.cols() + basis.cols());
      grown << t, basis;
      t = grown;
    }
    if (condition_number(t) > 1e10) throw NumericError("frobenius: generalized eigenspaces are nearly dependent");
    const CMatrix tinv = t.inverse();
    const int r = static_cast<int>(groups.size());

    // Integer shifts inside each class of exponents congruent mod 1.
    std::vector<int> shift(r, 0);
    std::vector<bool> same_class(static_cast<std::size_t>(r) * r, false);
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b)
        same_class[a * r + b] = a == b || integer_gap(groups[a], groups[b], opt.cluster_tol) > 0 ||
                                integer_gap(groups[b], groups[a], opt.cluster_tol) > 0;
    for (int a = 0; a < r; ++a) {
      int ref = a;
      for (int b = 0; b < r; ++b)
        if (same_class[a * r + b] && groups[b].value.real() < groups[ref].value.real()) ref = b;
      shift[a] = ref == a ? 0 : integer_gap(groups[a], groups[ref], opt.cluster_tol);
      if (shift[a] > M) throw ConfigError("frobenius: order is below the largest exponent gap " + std::to_string(shift[a]));
    }

    std::vector<CMatrix> ht;
    for (int q = 0; q <= M; ++q) ht.push_back(tinv * coeff(H, q, n) * t);
    CMatrix n0 = CMatrix::Zero(n, n);
    for (int a = 0; a < r; ++a) n0.block(start[a], start[a], size[a], size[a]) = ht[0].block(start[a], start[a], size[a], size[a]);

    std::vector<CMatrix> p{id};
    std::vector<CMatrix> nm{n0};
    for (int m = 1; m <= M; ++m) {
      CMatrix rhs = CMatrix::Zero(n, n);
      for (int q = 1; q <= m; ++q) rhs += ht[q] * p[m - q];
      for (int q = 1; q < m; ++q) rhs -= p[m - q] * nm[q];
      CMatrix pm = CMatrix::Zero(n, n);
      CMatrix nmm = CMatrix::Zero(n, n);
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) {
          CMatrix rab = rhs.block(start[a], start[b], size[a], size[b]);
          if (same_class[a * r + b] && shift[a] - shift[b] == m) {
            nmm.block(start[a], start[b], size[a], size[b]) = rab;
          } else {
            CMatrix ja = n0.block(start[a], start[a], size[a], size[a]);
            CMatrix jb = n0.block(start[b], start[b], size[b], size[b]);
            pm.block(start[a], start[b], size[a], size[b]) = solve_sylvester(
                static_cast<double>(m) * CMatrix::Identity(size[a], size[a]) - ja, jb, rab, 1e-10);
          }
        }
      p.push_back(pm);
      nm.push_back(nmm);
    }
    CMatrix c = CMatrix::Zero(n, n);
    for (const auto& x : nm) c += x;
    for (int a = 0; a < r; ++a)
      for (int k = 0; k < size[a]; ++k) {
        c(start[a] + k, start[a] + k) -= static_cast<double>(shift[a]);
        sol.shifts[start[a] + k] = shift[a];
      }
    sol.T = t;
    sol.Lambda = t * c * tinv;
    for (const auto& x : p) sol.S.push_back(t * x * tinv);
  }

  sol.s0_det = std::abs(sol.S[0].determinant());
  sol.log_depth = log_depth_of(sol.Lambda);
  sol.radius = M + 1 >= 8 ? radius_estimate(sol, opt.coefficient_radius) : opt.coefficient_radius;
  return sol;
}

double radius_estimate(const FrobeniusSolution& sol, double coefficient_radius) {
  const int count = static_cast<int>(sol.S.size());
  if (count < 8) throw ConfigError("radius estimate needs at least 8 series coefficients, got " + std::to_string(count));
  double growth = 0.0;
  for (int m = std::max(1, count - 5); m < count; ++m) {
    double nrm = sol.S[m].norm();
    if (nrm > 0.0) growth = std::max(growth, std::pow(nrm, 1.0 / m));
  }
  double est = growth > 0.0 ? 1.0 / growth : std::numeric_limits<double>::infinity();
  return std::min(coefficient_radius, est);
}

Evaluation eval_solution_log(const FrobeniusSolution& sol, cplx eta, cplx log_eta) {
  const int n = static_cast<int>(sol.Lambda.rows());
  Evaluation ev;
  ev.outside_disc = std::abs(eta) >= sol.radius;
  CMatrix s = CMatrix::Zero(n, n);
  for (int m = static_cast<int>(sol.S.size()) - 1; m >= 0; --m) s = s * eta + sol.S[m];
  bool shifted = std::any_of(sol.shifts.begin(), sol.shifts.end(), [](int d) { return d != 0; });
  if (shifted) {
    CMatrix d = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) d(i, i) = std::pow(eta, sol.shifts[i]);
    s = s * (sol.T * d * sol.T.inverse());
  }
  ev.value = s * matrix_exp(sol.Lambda * log_eta);
  return ev;
}

Evaluation eval_solution(const FrobeniusSolution& sol, cplx eta, int p) {
  if (eta == cplx{0.0, 0.0}) throw SingularPointError("Frobenius solution evaluated at eta = 0");
  return eval_solution_log(sol, eta, branch_log(eta, p));
}

double differential_residual(const FrobeniusSolution& sol, const std::vector<CMatrix>& H, cplx eta, int p) {
  const int n = static_cast<int>(sol.Lambda.rows());
  const cplx lg = branch_log(eta, p);
  CMatrix s = CMatrix::Zero(n, n);
  CMatrix ds = CMatrix::Zero(n, n);  // η S'
  for (int m = static_cast<int>(sol.S.size()) - 1; m >= 0; --m) {
    s = s * eta + sol.S[m];
    ds = ds * eta + static_cast<double>(m) * sol.S[m];
  }
  CMatrix e = CMatrix::Identity(n, n);
  CMatrix dprime = sol.shift_matrix();
  bool shifted = std::any_of(sol.shifts.begin(), sol.shifts.end(), [](int d) { return d != 0; });
  if (shifted) {
    CMatrix d = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) d(i, i) = std::pow(eta, sol.shifts[i]);
    e = sol.T * d * sol.T.inverse();
  }
  CMatrix f = matrix_exp(sol.Lambda * lg);
  CMatrix psi = s * e * f;
  CMatrix lhs = ds * e * f + s * dprime * e * f + s * e * sol.Lambda * f;
  CMatrix h = CMatrix::Zero(n, n);
  for (int q = static_cast<int>(H.size()) - 1; q >= 0; --q) h = h * eta + H[q];
  return (lhs - h * psi).norm() / psi.norm();
}

std::vector<CMatrix> hypergeometric_companion(cplx a, cplx b, cplx c, int count) {
  std::vector<CMatrix> h;
  for (int m = 0; m < count; ++m) {
    CMatrix x = CMatrix::Zero(2, 2);
    if (m == 0) {
      x(0, 1) = 1.0;
      x(1, 1) = 1.0 - c;
    } else {
      x(1, 0) = a * b;
      x(1, 1) = a + b + 1.0 - c;
    }
    h.push_back(x);
  }
  return h;
}

}  // namespace tkz::frobenius
