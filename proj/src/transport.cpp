#include "tkz/transport.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "tkz/errors.hpp"

namespace tkz::transport {
namespace {

// Dormand–Prince 5(4).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

std::string point_str(const std::vector<cplx>& z) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i) os << ", ";
    os << z[i].real() << (z[i].imag() < 0 ? "-" : "+") << std::abs(z[i].imag()) << "i";
  }
  os << ")";
  return os.str();
}

// Generator of dy/ds = G(s) y on the current segment. G receives the point, the continuous
// logarithms of its coordinates and the velocity.
using Generator = std::function<CMatrix(const std::vector<cplx>&, const std::vector<cplx>&, const std::vector<cplx>&)>;
using Distance = std::function<std::pair<double, std::string>(const std::vector<cplx>&)>;

struct Problem {
  std::vector<std::vector<cplx>> vertices;
  std::vector<cplx> logs0;  // logs of the coordinates at the first vertex
  Generator generator;
  Distance distance;
};

// Logs of the coordinates at every vertex. A straight segment that avoids 0 subtends less than
// π at the origin, so the principal log of the ratio continues the argument exactly.
std::vector<std::vector<cplx>> vertex_logs(const Problem& pb) {
  std::vector<std::vector<cplx>> out{pb.logs0};
  for (std::size_t k = 1; k < pb.vertices.size(); ++k) {
    std::vector<cplx> next = out.back();
    for (std::size_t i = 0; i < next.size(); ++i) next[i] += std::log(pb.vertices[k][i] / pb.vertices[k - 1][i]);
    out.push_back(std::move(next));
  }
  return out;
}

struct ColumnRun {
  CVector y;
  CVector refined;
  long steps = 0;
  long rejected = 0;
};

struct Segment {
  const std::vector<cplx>* v0;
  std::vector<cplx> vel;
  const std::vector<cplx>* logs0;
  double speed = 0.0;

  std::vector<cplx> point(double s) const {
    std::vector<cplx> z(*v0);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += s * vel[i];
    return z;
  }
  std::vector<cplx> logs(const std::vector<cplx>& z) const {
    std::vector<cplx> l(*logs0);
    for (std::size_t i = 0; i < l.size(); ++i) l[i] += std::log(z[i] / (*v0)[i]);
    return l;
  }
};

class ColumnIntegrator {
 public:
  ColumnIntegrator(const Problem& pb, const std::vector<std::vector<cplx>>& logs, const TransportOptions& opt)
      : pb_(pb), logs_(logs), opt_(opt) {}

  ColumnRun run(const CVector& y0) {
    ColumnRun out;
    out.y = y0;
    out.refined = y0;
    for (std::size_t k = 0; k + 1 < pb_.vertices.size(); ++k) {
      Segment seg{&pb_.vertices[k], {}, &logs_[k], 0.0};
      for (std::size_t i = 0; i < pb_.vertices[k].size(); ++i) seg.vel.push_back(pb_.vertices[k + 1][i] - pb_.vertices[k][i]);
      double sq = 0.0;
      for (auto v : seg.vel) sq += std::norm(v);
      seg.speed = std::sqrt(sq);
      if (seg.speed == 0.0) continue;
      run_segment(seg, out);
    }
    return out;
  }

 private:
  CMatrix gen(const Segment& seg, double s) const {
    auto z = seg.point(s);
    return pb_.generator(z, seg.logs(z), seg.vel);
  }

  double max_step(const Segment& seg, double s) const {
    auto [d, name] = pb_.distance(seg.point(s));
    return 0.5 * d / seg.speed;
  }

  // One Dormand–Prince step; returns the fifth-order value and the error vector. k1 is G(s) y.
  CVector step(const Segment& seg, double s, double h, const CVector& y, const CVector& k1, CVector* err,
               CVector* k7_out) const {
    CVector k2 = gen(seg, s + c2 * h) * (y + h * a21 * k1);
    CVector k3 = gen(seg, s + c3 * h) * (y + h * (a31 * k1 + a32 * k2));
    CVector k4 = gen(seg, s + c4 * h) * (y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    CVector k5 = gen(seg, s + c5 * h) * (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    CVector k6 = gen(seg, s + h) * (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    CVector ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    if (err) {
      CVector k7 = gen(seg, s + h) * ynew;
      *err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      if (k7_out) *k7_out = std::move(k7);
    }
    return ynew;
  }

  double error_norm(const CVector& err, const CVector& y, const CVector& ynew) const {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      const double sc = opt_.tol * (1.0 + std::max(std::abs(y(i)), std::abs(ynew(i))));
      sum += std::norm(err(i)) / (sc * sc);
    }
    return std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(1, err.size())));
  }

  void run_segment(const Segment& seg, ColumnRun& out) {
    double s = 0.0;
    double h = std::min(opt_.initial_step, max_step(seg, 0.0));
    CVector k1 = gen(seg, 0.0) * out.y;
    while (s < 1.0) {
      if (++out.steps > opt_.max_steps) throw NumericError("transport exceeded the step limit");
      h = std::min({h, 1.0 - s, max_step(seg, s)});
      if (h < opt_.min_step) {
        auto z = seg.point(s);
        auto [d, name] = pb_.distance(z);
        throw ProximityError("transport step collapsed at " + point_str(z) + ": distance " + std::to_string(d) +
                             " to " + name);
      }
      CVector err, k7;
      CVector ynew = step(seg, s, h, out.y, k1, &err, &k7);
      const double en = error_norm(err, out.y, ynew);
      if (!std::isfinite(en)) throw NumericError("transport produced non-finite values");
      if (en <= 1.0) {
        // The same step split in two halves, without error control, for est_error.
        const double hh = 0.5 * h;
        CVector r = out.refined;
        r = step(seg, s, hh, r, gen(seg, s) * r, nullptr, nullptr);
        r = step(seg, s + hh, hh, r, gen(seg, s + hh) * r, nullptr, nullptr);
        out.refined = std::move(r);
        out.y = std::move(ynew);
        k1 = std::move(k7);
        s = (1.0 - s - h < 1e-15) ? 1.0 : s + h;
        h *= std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2), 0.2, 5.0);
      } else {
        ++out.rejected;
        h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      }
    }
  }

  const Problem& pb_;
  const std::vector<std::vector<cplx>>& logs_;
  TransportOptions opt_;
};

struct Run {
  CMatrix value;
  CMatrix refined;
  std::vector<cplx> end_logs;
  long steps = 0;
  long rejected = 0;
};

Run run_problem(const Problem& pb, const CMatrix& psi0, const TransportOptions& opt) {
  if (pb.vertices.size() < 2) throw ConfigError("a path needs at least two vertices");
  if (!psi0.allFinite()) throw ConfigError("initial value is not finite");
  const auto logs = vertex_logs(pb);
  // Columns are independent problems with their own step sequences.
  std::vector<std::future<ColumnRun>> jobs;
  for (Eigen::Index c = 0; c < psi0.cols(); ++c) {
    CVector y0 = psi0.col(c);
    jobs.push_back(std::async(std::launch::async, [&pb, &logs, &opt, y0]() {
      ColumnIntegrator integ(pb, logs, opt);
      return integ.run(y0);
    }));
  }
  Run run;
  run.value = CMatrix(psi0.rows(), psi0.cols());
  run.refined = CMatrix(psi0.rows(), psi0.cols());
  for (Eigen::Index c = 0; c < psi0.cols(); ++c) {
    ColumnRun col = jobs[static_cast<std::size_t>(c)].get();
    run.value.col(c) = col.y;
    run.refined.col(c) = col.refined;
    run.steps += col.steps;
    run.rejected += col.rejected;
  }
  run.end_logs = logs.back();
  return run;
}

double relative_gap(const CMatrix& a, const CMatrix& b) { return max_abs(a - b) / std::max(1.0, max_abs(b)); }

void fill_branches(TransportResult& res, const std::vector<cplx>& end, const std::vector<cplx>& logs) {
  for (std::size_t i = 0; i < end.size(); ++i) {
    const double arg = logs[i].imag();
    res.arg_end.push_back(arg);
    res.branch_end.push_back(static_cast<int>(std::lround((arg - arg0(end[i])) / (2.0 * kPi))));
  }
}

std::pair<double, std::string> segment_distance(const std::vector<cplx>& v0, const std::vector<cplx>& v1) {
  // Closest approach of a segment to each hyperplane of the locus.
  auto closest = [](cplx a, cplx b) {
    const cplx d = b - a;
    double s = std::norm(d) == 0.0 ? 0.0 : -std::real(std::conj(d) * a) / std::norm(d);
    s = std::clamp(s, 0.0, 1.0);
    return std::abs(a + s * d);
  };
  double best = std::numeric_limits<double>::infinity();
  std::string name;
  const std::size_t n = v0.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = closest(v0[i], v1[i]);
    if (d < best) best = d, name = "z" + std::to_string(i + 1) + " = 0";
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = closest(v0[i] - v0[j], v1[i] - v1[j]) / std::sqrt(2.0);
      if (d < best) best = d, name = "z" + std::to_string(i + 1) + " = z" + std::to_string(j + 1);
    }
  return {best, name};
}

}  // namespace

std::pair<double, std::string> distance_to_locus(const std::vector<cplx>& z) { return segment_distance(z, z); }

void validate_path(const PathSpec& path) {
  if (path.vertices.size() < 2) throw ConfigError("a path needs at least two vertices");
  const std::size_t n = path.vertices.front().size();
  if (n == 0) throw ConfigError("path vertices are empty");
  for (const auto& v : path.vertices) {
    if (v.size() != n) throw ConfigError("path vertices have inconsistent dimensions");
    for (auto x : v)
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) throw ConfigError("path vertex is not finite");
  }
  if (!path.branch_start.empty() && path.branch_start.size() != n)
    throw ConfigError("branch_start must have one entry per coordinate");
  for (std::size_t k = 0; k + 1 < path.vertices.size(); ++k) {
    auto [d, name] = segment_distance(path.vertices[k], path.vertices[k + 1]);
    if (d == 0.0 || d < path.avoid_margin)
      throw ConfigError("path segment " + std::to_string(k + 1) + " comes within " + std::to_string(d) + " of " + name);
  }
}

TransportResult integrate_path(const connection::ConnectionSystem& conn, const PathSpec& path, const CMatrix& psi0,
                               const TransportOptions& opt) {
  validate_path(path);
  const int n = conn.n;
  if (static_cast<int>(path.vertices.front().size()) != n) throw ConfigError("path dimension does not match N");
  if (psi0.rows() != conn.state_dim) throw ConfigError("initial value has the wrong dimension");
  std::vector<rcalc::MatrixEvaluator> evals;
  for (const auto& a : conn.A) evals.emplace_back(a);

  Problem pb;
  pb.vertices = path.vertices;
  std::vector<int> p = path.branch_start.empty() ? std::vector<int>(n, 0) : path.branch_start;
  for (int i = 0; i < n; ++i) pb.logs0.push_back(branch_log(path.vertices.front()[i], p[i]));
  const int dim = conn.state_dim;
  pb.generator = [&evals, dim](const std::vector<cplx>& z, const std::vector<cplx>& logs, const std::vector<cplx>& v) {
    CMatrix g = CMatrix::Zero(dim, dim);
    for (std::size_t l = 0; l < evals.size(); ++l)
      if (v[l] != cplx{0.0, 0.0}) g += v[l] * evals[l].eval_with_logs(z, logs);
    return g;
  };
  pb.distance = distance_to_locus;

  Run run = run_problem(pb, psi0, opt);
  TransportResult res;
  res.value = run.value;
  res.refined = run.refined;
  res.est_error = relative_gap(run.value, run.refined);
  res.steps = run.steps;
  res.rejected = run.rejected;
  fill_branches(res, path.vertices.back(), run.end_logs);
  // Arguments of the differences, continued vertex to vertex like the coordinates.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double arg = arg0(path.vertices.front()[i] - path.vertices.front()[j]);
      for (std::size_t k = 1; k < path.vertices.size(); ++k)
        arg += std::arg((path.vertices[k][i] - path.vertices[k][j]) / (path.vertices[k - 1][i] - path.vertices[k - 1][j]));
      res.diff_arg_end.push_back(arg);
    }
  return res;
}

MonodromyResult monodromy_loop(const connection::ConnectionSystem& conn, const PathSpec& loop, const CMatrix& basis_seed,
                               const TransportOptions& opt) {
  if (loop.vertices.size() < 3) throw ConfigError("a loop needs at least three vertices");
  const auto& a = loop.vertices.front();
  const auto& b = loop.vertices.back();
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  if (a.size() != b.size() || gap > 1e-12) throw ConfigError("loop is not closed");
  if (basis_seed.rows() != basis_seed.cols() || basis_seed.rows() != conn.state_dim)
    throw ConfigError("basis seed must be a square state_dim matrix");
  Eigen::FullPivLU<CMatrix> lu(basis_seed);
  if (!lu.isInvertible()) throw ConfigError("basis seed is not invertible");
  TransportResult tr = integrate_path(conn, loop, basis_seed, opt);
  const CMatrix inv = lu.inverse();
  MonodromyResult m;
  m.matrix = tr.value * inv;
  m.est_error = max_abs(m.matrix - tr.refined * inv);
  m.branch_end = tr.branch_end;
  m.det = m.matrix.determinant();
  return m;
}

PathSpec circle_loop(const std::vector<cplx>& base, int var, cplx centre, int segments, int turns) {
  if (var < 0 || var >= static_cast<int>(base.size())) throw ConfigError("circle variable out of range");
  if (segments < 3 || turns == 0) throw ConfigError("circle needs at least three segments and a nonzero winding");
  PathSpec p;
  const cplx r = base[var] - centre;
  const int total = segments * std::abs(turns);
  const double dir = turns > 0 ? 1.0 : -1.0;
  for (int k = 0; k <= total; ++k) {
    std::vector<cplx> v = base;
    v[var] = k == total ? base[var] : centre + r * std::polar(1.0, dir * 2.0 * kPi * k / segments);
    p.vertices.push_back(std::move(v));
  }
  p.branch_start.assign(base.size(), 0);
  return p;
}

TransportResult integrate_local(const std::vector<CMatrix>& H, double coefficient_radius,
                                const std::vector<cplx>& eta_path, int branch_start, const CMatrix& psi0,
                                const TransportOptions& opt) {
  if (H.empty()) throw ConfigError("local system has no coefficients");
  if (eta_path.size() < 2) throw ConfigError("a path needs at least two vertices");
  for (auto e : eta_path) {
    if (e == cplx{0.0, 0.0}) throw ConfigError("local path passes through eta = 0");
    if (!(std::abs(e) < coefficient_radius)) throw ConfigError("local path leaves the coefficient disc");
  }
  for (std::size_t k = 0; k + 1 < eta_path.size(); ++k)
    if (segment_distance({eta_path[k]}, {eta_path[k + 1]}).first == 0.0)
      throw ConfigError("local path passes through eta = 0");
  const int dim = static_cast<int>(H.front().rows());
  if (psi0.rows() != dim) throw ConfigError("initial value has the wrong dimension");

  Problem pb;
  for (auto e : eta_path) pb.vertices.push_back({e});
  pb.logs0 = {branch_log(eta_path.front(), branch_start)};
  pb.generator = [&H](const std::vector<cplx>& z, const std::vector<cplx>&, const std::vector<cplx>& v) {
    CMatrix acc = H.back();
    for (std::size_t m = H.size() - 1; m-- > 0;) acc = acc * z[0] + H[m];
    return CMatrix((v[0] / z[0]) * acc);
  };
  pb.distance = [coefficient_radius](const std::vector<cplx>& z) {
    const double r = std::abs(z[0]);
    if (coefficient_radius - r < r) return std::pair<double, std::string>{coefficient_radius - r, "edge of the coefficient disc"};
    return std::pair<double, std::string>{r, "eta = 0"};
  };
  Run run = run_problem(pb, psi0, opt);
  TransportResult res;
  res.value = run.value;
  res.refined = run.refined;
  res.est_error = relative_gap(run.value, run.refined);
  res.steps = run.steps;
  res.rejected = run.rejected;
  fill_branches(res, {eta_path.back()}, run.end_logs);
  return res;
}

double match_local_system(const frobenius::FrobeniusSolution& sol, const std::vector<CMatrix>& H,
                          const std::vector<cplx>& eta_path, const TransportOptions& opt) {
  if (eta_path.size() < 2) throw ConfigError("a path needs at least two vertices");
  for (auto e : {eta_path.front(), eta_path.back()})
    if (!(std::abs(e) < sol.radius)) throw ConfigError("anchor or endpoint lies outside the Frobenius disc");
  auto start = frobenius::eval_solution(sol, eta_path.front(), 0);
  const double r = std::isfinite(sol.coefficient_radius) ? sol.coefficient_radius
                                                         : std::numeric_limits<double>::infinity();
  TransportResult tr = integrate_local(H, r, eta_path, 0, start.value, opt);
  const cplx log_end{std::log(std::abs(eta_path.back())), tr.arg_end[0]};
  auto end = frobenius::eval_solution_log(sol, eta_path.back(), log_end);
  return max_abs(tr.value - end.value) / max_abs(end.value);
}

double match_local_global(const frobenius::FrobeniusSolution& sol, const connection::ConnectionSystem& conn,
                          const ChangeOfVariables& cov, int component, const std::vector<cplx>& fixed_eta,
                          const std::vector<cplx>& eta_path, const rcalc::ComposeOptions& compose,
                          const TransportOptions& opt, int samples_per_segment) {
  const int n = conn.n;
  if (cov.size() != n || static_cast<int>(fixed_eta.size()) != n) throw ConfigError("dimension mismatch in matching");
  if (component < 0 || component >= n) throw ConfigError("component index out of range");
  if (eta_path.size() < 2 || samples_per_segment < 1) throw ConfigError("a path needs at least two vertices");
  for (auto e : {eta_path.front(), eta_path.back()})
    if (!(std::abs(e) < sol.radius)) throw ConfigError("anchor or endpoint lies outside the Frobenius disc");

  auto full = [&](cplx e) {
    std::vector<cplx> eta = fixed_eta;
    eta[component] = e;
    return eta;
  };
  PathSpec path;
  cplx log_eta = branch_log(eta_path.front(), 0);
  for (std::size_t k = 0; k + 1 < eta_path.size(); ++k) {
    for (int q = 0; q < samples_per_segment; ++q) {
      const cplx e = eta_path[k] + (eta_path[k + 1] - eta_path[k]) * (static_cast<double>(q) / samples_per_segment);
      path.vertices.push_back(cov.z_of_eta(full(e)));
    }
    log_eta += std::log(eta_path[k + 1] / eta_path[k]);
  }
  path.vertices.push_back(cov.z_of_eta(full(eta_path.back())));
  path.branch_start = rcalc::branch_at(cov, full(eta_path.front()), compose);

  auto start = frobenius::eval_solution(sol, eta_path.front(), 0);
  TransportResult tr = integrate_path(conn, path, start.value, opt);
  auto end = frobenius::eval_solution_log(sol, eta_path.back(), log_eta);
  return max_abs(tr.value - end.value) / max_abs(end.value);
}

}  // namespace tkz::transport
