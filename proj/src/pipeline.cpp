#include "tkz/pipeline.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <spdlog/spdlog.h>

#include "tkz/errors.hpp"

namespace tkz::pipeline {
namespace {

using io::json;

[[noreturn]] void rethrow_in_stage(const Error& e, const std::string& stage) {
  const std::string msg = "stage " + stage + ": " + e.what();
  switch (e.kind()) {
    case ErrorKind::Config: throw ConfigError(msg);
    case ErrorKind::Numeric: throw NumericError(msg);
    case ErrorKind::Degenerate: throw DegenerateError(msg);
    case ErrorKind::Inconclusive: throw InconclusiveError(msg);
  }
  throw NumericError(msg);
}

template <typename F>
auto stage(const std::string& name, F&& f) {
  spdlog::debug("stage {}", name);
  try {
    return f();
  } catch (const Error& e) {
    rethrow_in_stage(e, name);
  }
}

int int_field(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) throw ConfigError(std::string("\"") + key + "\" must be an integer");
  return j.at(key).get<int>();
}

double real_field(const json& j, const char* key, double fallback) {
  return j.contains(key) ? io::real_from(j.at(key)) : fallback;
}

std::string string_field(const json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError(std::string("\"") + key + "\" must be a string");
  return j.at(key).get<std::string>();
}

json eigenvalues_json(const CMatrix& m) {
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return io::to_json(ev);
}

TransportStage transport_stage_from(const json& j, const char* seed_key, const std::string& fallback_name,
                                    const std::string& stage) {
  TransportStage s;
  s.name = string_field(j, "name", fallback_name);
  try {
    if (j.contains("circle")) {
      // {"base": point, "var": 1-based index, "centre": c, "segments": k, "turns": w}
      const json& c = j.at("circle");
      s.path = transport::circle_loop(io::cvector_from(c.at("base")), int_field(c, "var", 1) - 1,
                                      c.contains("centre") ? io::complex_from(c.at("centre")) : cplx{0.0, 0.0},
                                      int_field(c, "segments", 64), int_field(c, "turns", 1));
      if (j.contains("branch_start")) s.path.branch_start = j.at("branch_start").get<std::vector<int>>();
      s.path.avoid_margin = real_field(j, "avoid_margin", 0.0);
      transport::validate_path(s.path);
    } else {
      s.path = io::path_from(j);
    }
    if (j.contains(seed_key)) s.initial = io::matrix_from(j.at(seed_key));
  } catch (const ConfigError& e) {
    throw ConfigError("stage " + stage + ":" + s.name + ": " + e.what());
  }
  return s;
}

}  // namespace

liealg::LieAlgebraData algebra_from(const json& j) {
  const std::string type = string_field(j, "type", "custom");
  if (type == "sl") return liealg::build_algebra("sl", int_field(j, "n", 2));
  if (type != "custom") throw ConfigError("unknown algebra type \"" + type + "\"");
  std::vector<std::string> labels;
  for (const auto& l : j.at("labels")) labels.push_back(l.get<std::string>());
  const int d = static_cast<int>(labels.size());
  std::vector<cplx> structure(static_cast<std::size_t>(d) * d * d, cplx{0.0, 0.0});
  for (const auto& e : j.at("structure")) {
    const int i = int_field(e, "i", -1), k = int_field(e, "j", -1), m = int_field(e, "k", -1);
    if (i < 0 || k < 0 || m < 0 || i >= d || k >= d || m >= d) throw ConfigError("structure constant index out of range");
    structure[(static_cast<std::size_t>(i) * d + k) * d + m] = io::complex_from(e.at("value"));
  }
  return liealg::make_algebra(string_field(j, "name", "custom"), labels, structure, io::matrix_from(j.at("form")),
                              io::rational_from(j.at("dual_coxeter")));
}

cplx level_from(const json& j) { return io::complex_from(j); }

autmod::AutomorphismData automorphism_from(const liealg::LieAlgebraData& alg, const json& j, bool* identity) {
  const std::string kind = string_field(j, "kind", "identity");
  autmod::AutomorphismData aut;
  if (kind == "identity") {
    if (alg.root_coords.empty()) aut = autmod::automorphism_from_matrix(alg, CMatrix::Identity(alg.dim, alg.dim));
    else aut = autmod::inner_automorphism(alg, std::vector<Rational>(alg.root_coords.front().size(), Rational(0)));
  } else if (kind == "inner") {
    std::vector<Rational> fr;
    for (const auto& f : j.at("fractions")) fr.push_back(io::rational_from(f));
    aut = autmod::inner_automorphism(alg, fr);
  } else if (kind == "matrix") {
    aut = autmod::automorphism_from_matrix(alg, io::matrix_from(j.at("matrix")));
  } else {
    throw ConfigError("unknown automorphism kind \"" + kind + "\"");
  }
  if (identity) *identity = aut.order == 1;
  return aut;
}

liealg::ModuleRep untwisted_from(const liealg::LieAlgebraData& alg, const json& j) {
  if (j.contains("spin")) {
    if (alg.name != "sl(2)") throw ConfigError("spin slots are only available for sl(2)");
    return liealg::build_irrep_sl2(io::rational_from(j.at("spin")));
  }
  if (j.contains("matrices")) {
    std::vector<CMatrix> mats;
    for (const auto& m : j.at("matrices")) mats.push_back(io::matrix_from(m));
    if (static_cast<int>(mats.size()) != alg.dim) throw ConfigError("slot needs one matrix per basis element");
    liealg::ModuleRep rep = liealg::make_rep(std::move(mats));
    const double defect = liealg::homomorphism_defect(alg, rep);
    if (defect > 1e-10) throw ConfigError("slot matrices are not a representation (defect " + std::to_string(defect) + ")");
    return rep;
  }
  if (string_field(j, "kind", "") == "trivial") return liealg::trivial_rep(alg.dim);
  throw ConfigError("slot needs \"spin\", \"matrices\" or \"kind\": \"trivial\"");
}

autmod::TwistedSlotSpec twisted_spec_from(const json& j) {
  autmod::TwistedSlotSpec s;
  const std::string kind = string_field(j, "kind", "trivial");
  if (kind == "trivial") {
    s.kind = autmod::TwistedSlotSpec::Kind::Trivial;
  } else if (kind == "spin") {
    s.kind = autmod::TwistedSlotSpec::Kind::Spin;
    s.spin = io::rational_from(j.at("spin"));
  } else if (kind == "matrices") {
    s.kind = autmod::TwistedSlotSpec::Kind::Matrices;
    for (const auto& e : j.at("matrices")) s.matrices.emplace_back(int_field(e, "index", 0) - 1, io::matrix_from(e.at("matrix")));
  } else {
    throw ConfigError("unknown twisted slot kind \"" + kind + "\"");
  }
  return s;
}

namespace {
RunConfig parse_config_impl(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  RunConfig c;
  c.name = string_field(j, "name", "run");
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (!j.contains("algebra")) throw ConfigError("configuration needs an \"algebra\"");
  c.algebra = algebra_from(j.at("algebra"));
  if (!j.contains("level")) throw ConfigError("configuration needs a \"level\"");
  c.level = level_from(j.at("level"));
  liealg::require_noncritical(c.algebra, c.level);
  c.automorphism = automorphism_from(c.algebra, j.value("automorphism", json::object()), &c.identity_automorphism);
  c.n = int_field(j, "N", 1);
  if (c.n < 1) throw ConfigError("N must be at least 1");

  const json& slots = j.at("slots");
  const json& untw = slots.at("untwisted");
  if (!untw.is_array() || static_cast<int>(untw.size()) != c.n)
    throw ConfigError("expected " + std::to_string(c.n) + " untwisted slots, got " + std::to_string(untw.size()));
  for (const auto& s : untw) c.untwisted.push_back(untwisted_from(c.algebra, s));
  const json tw = slots.value("twisted", json{{"kind", "trivial"}});
  c.twisted = twisted_spec_from(tw);
  if (c.identity_automorphism) {
    switch (c.twisted.kind) {
      case autmod::TwistedSlotSpec::Kind::Trivial: c.twisted_full = liealg::trivial_rep(c.algebra.dim); break;
      case autmod::TwistedSlotSpec::Kind::Spin:
        if (c.algebra.name != "sl(2)") throw ConfigError("spin slots are only available for sl(2)");
        c.twisted_full = liealg::build_irrep_sl2(c.twisted.spin);
        break;
      case autmod::TwistedSlotSpec::Kind::Matrices: {
        std::vector<CMatrix> mats(c.algebra.dim);
        for (const auto& [i, m] : c.twisted.matrices)
          if (i >= 0 && i < c.algebra.dim) mats[i] = m;
        bool complete = static_cast<int>(c.twisted.matrices.size()) == c.algebra.dim;
        for (const auto& m : mats) complete = complete && m.size() > 0;
        if (complete) c.twisted_full = liealg::make_rep(mats);
        break;
      }
    }
  }
  c.passive_dim = int_field(slots, "passive_dim", 1);
  if (c.passive_dim < 1) throw ConfigError("passive_dim must be positive");

  const std::string kind = string_field(j, "connection", "twisted");
  if (kind == "classical") {
    if (!c.identity_automorphism) throw ConfigError("the classical connection needs the identity automorphism");
    if (!c.twisted_full) throw ConfigError("the classical connection needs the last slot on the whole algebra");
    c.classical = true;
  } else if (kind != "twisted") {
    throw ConfigError("connection must be \"twisted\" or \"classical\"");
  }
  const std::string order = string_field(j, "omega_order", "displayed");
  if (order == "reversed") c.omega_order = connection::OmegaOrder::Reversed;
  else if (order != "displayed") throw ConfigError("omega_order must be \"displayed\" or \"reversed\"");

  if (j.contains("checks")) {
    c.euler_points = int_field(j.at("checks"), "euler_points", c.euler_points);
    c.flatness_points = int_field(j.at("checks"), "flatness_points", c.flatness_points);
  }
  if (j.contains("tolerances")) {
    c.transport_tol = real_field(j.at("tolerances"), "transport", c.transport_tol);
    c.cluster_tol = real_field(j.at("tolerances"), "cluster", c.cluster_tol);
  }

  for (const auto& cj : j.value("changes", json::array())) {
    ChangeStage s;
    s.name = string_field(cj, "name", "change" + std::to_string(c.changes.size() + 1));
    json cov = cj;
    if (!cov.contains("t")) cov["t"] = c.automorphism.order;
    s.cov = io::change_from(cov);
    if (s.cov.size() != c.n) throw ConfigError("change \"" + s.name + "\" has the wrong dimension");
    for (const auto& q : cj.at("cutoffs")) s.cutoffs.push_back(io::rational_from(q));
    if (static_cast<int>(s.cutoffs.size()) != c.n) throw ConfigError("change \"" + s.name + "\" needs N cutoffs");
    if (cj.contains("branches")) s.branches = cj.at("branches").get<std::vector<int>>();
    s.same_sign = cj.value("same_sign", false);
    for (const auto& lj : cj.value("local", json::array())) {
      LocalStage l;
      l.component = int_field(lj, "component", 1) - 1;
      if (l.component < 0 || l.component >= c.n) throw ConfigError("local component out of range");
      l.fixed_eta = lj.contains("fixed_eta") ? io::cvector_from(lj.at("fixed_eta")) : std::vector<cplx>(c.n, 0.0);
      if (static_cast<int>(l.fixed_eta.size()) != c.n) throw ConfigError("fixed_eta needs N entries");
      l.order = int_field(lj, "order", l.order);
      l.coefficient_radius = real_field(lj, "coefficient_radius", l.coefficient_radius);
      if (lj.contains("match_path")) l.match_path = io::cvector_from(lj.at("match_path"));
      s.local.push_back(std::move(l));
    }
    c.changes.push_back(std::move(s));
  }
  for (const auto& pj : j.value("paths", json::array()))
    c.paths.push_back(transport_stage_from(pj, "initial", "path" + std::to_string(c.paths.size() + 1), "transport"));
  for (const auto& lj : j.value("loops", json::array()))
    c.loops.push_back(transport_stage_from(lj, "basis_seed", "loop" + std::to_string(c.loops.size() + 1), "monodromy"));
  for (const auto* list : {&c.paths, &c.loops})
    for (const auto& s : *list)
      if (static_cast<int>(s.path.vertices.front().size()) != c.n)
        throw ConfigError("path \"" + s.name + "\" does not live in dimension N");

  if (j.contains("output")) {
    c.report_path = string_field(j.at("output"), "report", "");
    c.csv_prefix = string_field(j.at("output"), "csv_prefix", "");
  }
  return c;
}
}  // namespace

RunConfig parse_config(const json& j) {
  try {
    return parse_config_impl(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
}

BuiltConnection build_connection(const RunConfig& cfg) {
  BuiltConnection b;
  if (cfg.classical) {
    b.conn = connection::classical_connection(cfg.algebra, cfg.level, cfg.untwisted, *cfg.twisted_full, cfg.passive_dim);
    return b;
  }
  connection::SlotReps reps;
  reps.untwisted = cfg.untwisted;
  reps.twisted = autmod::twisted_slot_rep(cfg.algebra, cfg.automorphism, cfg.twisted);
  reps.passive_dim = cfg.passive_dim;
  b.omega = connection::build_omega_set(cfg.algebra, cfg.automorphism, cfg.level, reps, cfg.omega_order);
  b.conn = connection::assemble_connection(*b.omega, cfg.automorphism.order);
  return b;
}

std::vector<Sample> random_points(int n, int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> radius(0.5, 2.0), angle(0.0, 2.0 * kPi);
  std::uniform_int_distribution<int> branch(-1, 1);
  std::vector<Sample> out;
  while (static_cast<int>(out.size()) < count) {
    Sample s;
    for (int i = 0; i < n; ++i) s.z.push_back(std::polar(radius(rng), angle(rng)));
    bool ok = true;
    for (int i = 0; i < n; ++i)
      for (int k = i + 1; k < n; ++k) ok = ok && std::abs(s.z[i] - s.z[k]) >= 0.25;
    if (!ok) continue;
    for (int i = 0; i < n; ++i) s.p.push_back(branch(rng));
    out.push_back(std::move(s));
  }
  return out;
}

Report run_pipeline(const RunConfig& cfg) {
  Report rep;
  json& out = rep.data;
  out["format"] = "tkz-report-1";
  out["name"] = cfg.name;
  out["seed"] = cfg.seed;
  std::mt19937_64 rng(cfg.seed);

  stage("algebra", [&] {
    auto ch = liealg::check_algebra(cfg.algebra);
    out["algebra"] = json{{"name", cfg.algebra.name},
                          {"dim", cfg.algebra.dim},
                          {"dual_coxeter", io::to_json(cfg.algebra.dual_coxeter)},
                          {"level", io::to_json(cfg.level)},
                          {"checks", {{"antisymmetry", ch.antisymmetry}, {"jacobi", ch.jacobi},
                                      {"invariance", ch.invariance}, {"symmetry", ch.symmetry}}}};
    auto ac = autmod::check_automorphism(cfg.algebra, cfg.automorphism);
    json alpha = json::array();
    for (const auto& a : cfg.automorphism.alpha) alpha.push_back(io::to_json(a));
    out["automorphism"] = json{{"order", cfg.automorphism.order},
                               {"alpha", alpha},
                               {"checks", {{"homomorphism", ac.homomorphism}, {"power_identity", ac.power_identity},
                                           {"eigen", ac.eigen}, {"duality", ac.duality}}}};
    return 0;
  });

  BuiltConnection built = stage("connection", [&] { return build_connection(cfg); });
  const auto& conn = built.conn;
  stage("connection", [&] {
    auto shape = connection::check_shape(conn);
    std::size_t terms = 0;
    for (const auto& a : conn.A)
      for (const auto& e : a.entries) terms += e.terms().size();
    out["connection"] = json{{"n", conn.n},           {"t", conn.t},
                             {"state_dim", conn.state_dim}, {"dims", conn.dims},
                             {"description", conn.description}, {"terms", terms},
                             {"shape_ok", shape.ok},   {"homogeneous", shape.homogeneous}};
    if (built.omega) {
      auto oc = connection::check_omega(*built.omega);
      out["omega"] = json{{"symmetry", oc.symmetry}, {"equivariance", oc.equivariance}};
    }
    return 0;
  });

  stage("euler", [&] {
    auto pts = random_points(cfg.n, cfg.euler_points, rng);
    std::vector<std::vector<cplx>> z;
    std::vector<std::vector<int>> p;
    for (auto& s : pts) z.push_back(s.z), p.push_back(s.p);
    auto e = connection::euler_contraction(conn, z, p);
    out["euler"] = json{{"points", cfg.euler_points}, {"matrix", io::to_json(e.mean)}, {"deviation", e.deviation}};
    return 0;
  });

  std::ostringstream residuals;
  residuals << std::setprecision(17);
  residuals << "point,residual,est_error";
  for (int i = 0; i < cfg.n; ++i) residuals << ",z" << i + 1 << "_re,z" << i + 1 << "_im,p" << i + 1;
  residuals << "\n";
  stage("flatness", [&] {
    json pts = json::array();
    double worst = 0.0, worst_est = 0.0;
    int idx = 0;
    for (const auto& s : random_points(cfg.n, cfg.flatness_points, rng)) {
      auto f = connection::flatness_residual(conn, s.z, s.p);
      worst = std::max(worst, f.residual);
      worst_est = std::max(worst_est, f.est_error);
      pts.push_back(json{{"z", io::to_json(s.z)}, {"branches", s.p}, {"residual", f.residual}, {"est_error", f.est_error}});
      residuals << ++idx << "," << f.residual << "," << f.est_error;
      for (int i = 0; i < cfg.n; ++i) residuals << "," << s.z[i].real() << "," << s.z[i].imag() << "," << s.p[i];
      residuals << "\n";
    }
    out["flatness"] = json{{"points", pts}, {"max_residual", worst}, {"max_est_error", worst_est}};
    return 0;
  });
  rep.residuals_csv = residuals.str();

  std::ostringstream exps;
  exps << std::setprecision(17);
  exps << "change,component,index,re,im,exact\n";
  json singular = json::array();
  for (const auto& ch : cfg.changes) {
    stage("singular:" + ch.name, [&] {
      connection::ConnectionSystem target = ch.same_sign ? connection::same_sign_variant(conn) : conn;
      rcalc::ComposeOptions opt;
      opt.branches = ch.branches;
      auto res = singular::check_simple_singularity(target, ch.cov, ch.cutoffs, opt);
      json entry{{"name", ch.name},
                 {"same_sign", ch.same_sign},
                 {"hypothesis", res.system.hypothesis()},
                 {"change", io::to_json(ch.cov)},
                 {"verdict", io::to_json(res.verdict)}};
      json indicial = json::array();
      if (res.verdict.holomorphic) {
        for (int j = 0; j < cfg.n; ++j) {
          auto d = singular::indicial_data(res.system, j);
          json dj = io::to_json(d);
          dj["component"] = j + 1;
          indicial.push_back(dj);
          for (std::size_t k = 0; k < d.exponents.size(); ++k)
            exps << ch.name << "," << j + 1 << "," << k + 1 << "," << d.exponents[k].real() << ","
                 << d.exponents[k].imag() << "," << (d.exact[k] ? d.exact[k]->str() : "") << "\n";
        }
      }
      entry["indicial"] = indicial;

      json local = json::array();
      for (const auto& l : ch.local) {
        if (!res.verdict.holomorphic) throw NumericError("local solve requested on a system that is not holomorphic");
        auto sec = singular::section(res.system, l.component, l.fixed_eta);
        frobenius::FrobeniusOptions fo;
        fo.order = l.order;
        fo.cluster_tol = cfg.cluster_tol;
        fo.coefficient_radius = l.coefficient_radius;
        auto sol = frobenius::frobenius_fundamental(sec.H, fo);
        json lj{{"component", l.component + 1},
                {"fixed_eta", io::to_json(l.fixed_eta)},
                {"solution", io::to_json(sol)},
                {"lambda_eigenvalues", eigenvalues_json(sol.Lambda)},
                {"local_monodromy", io::to_json(frobenius::eval_solution(sol, 0.5 * std::min(1.0, sol.radius), 1).value *
                                          frobenius::eval_solution(sol, 0.5 * std::min(1.0, sol.radius), 0)
                                              .value.inverse())}};
        if (!l.match_path.empty()) {
          transport::TransportOptions to;
          to.tol = cfg.transport_tol;
          lj["match_path"] = io::to_json(l.match_path);
          lj["match_residual"] = transport::match_local_global(sol, target, ch.cov, l.component, l.fixed_eta,
                                                               l.match_path, opt, to);
        }
        local.push_back(std::move(lj));
      }
      entry["local"] = local;
      singular.push_back(std::move(entry));
      return 0;
    });
  }
  out["singular"] = singular;
  rep.exponents_csv = exps.str();

  transport::TransportOptions to;
  to.tol = cfg.transport_tol;
  json paths = json::array();
  for (const auto& p : cfg.paths) {
    stage("transport:" + p.name, [&] {
      CMatrix psi0 = p.initial.value_or(CMatrix::Identity(conn.state_dim, conn.state_dim));
      auto r = transport::integrate_path(conn, p.path, psi0, to);
      paths.push_back(json{{"name", p.name},
                           {"path", io::to_json(p.path)},
                           {"value", io::to_json(r.value)},
                           {"est_error", r.est_error},
                           {"branch_end", r.branch_end},
                           {"arg_end", r.arg_end},
                           {"steps", r.steps}});
      return 0;
    });
  }
  out["transport"] = paths;

  json loops = json::array();
  for (const auto& l : cfg.loops) {
    stage("monodromy:" + l.name, [&] {
      CMatrix seed = l.initial.value_or(CMatrix::Identity(conn.state_dim, conn.state_dim));
      auto m = transport::monodromy_loop(conn, l.path, seed, to);
      loops.push_back(json{{"name", l.name},
                           {"loop", io::to_json(l.path)},
                           {"matrix", io::to_json(m.matrix)},
                           {"eigenvalues", eigenvalues_json(m.matrix)},
                           {"det", io::to_json(m.det)},
                           {"est_error", m.est_error},
                           {"branch_end", m.branch_end}});
      return 0;
    });
  }
  out["monodromy"] = loops;
  return rep;
}

}  // namespace tkz::pipeline
