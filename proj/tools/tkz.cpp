// tkz: command-line front end. Every subcommand writes JSON to stdout or --out.
#include <cstdlib>
#include <iostream>
#include <random>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "tkz/errors.hpp"
#include "tkz/pipeline.hpp"

namespace {

using tkz::io::json;
using tkz::CMatrix;

void emit(const json& j, const std::string& out) {
  if (out.empty()) std::cout << j.dump(2) << "\n";
  else tkz::io::write_file(out, j);
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("tkz");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("TKZ_LOG")) {
    auto lvl = spdlog::level::from_str(env);
    // from_str maps unknown names to "off"; only accept that when asked for explicitly.
    if (lvl != spdlog::level::off || std::string(env) == "off") spdlog::set_level(lvl);
  }
}

// Points file: {"points": [{"z": [[re,im],...], "branches": [p,...]}, ...]}.
std::vector<tkz::pipeline::Sample> load_points(const std::string& file, int n, int count, std::uint64_t seed) {
  if (file.empty()) {
    std::mt19937_64 rng(seed);
    return tkz::pipeline::random_points(n, count, rng);
  }
  std::vector<tkz::pipeline::Sample> out;
  for (const auto& p : tkz::io::read_file(file).at("points")) {
    tkz::pipeline::Sample s;
    s.z = tkz::io::cvector_from(p.at("z"));
    s.p = p.contains("branches") ? p.at("branches").get<std::vector<int>>() : std::vector<int>(s.z.size(), 0);
    if (static_cast<int>(s.z.size()) != n || static_cast<int>(s.p.size()) != n)
      throw tkz::ConfigError("point has the wrong dimension");
    out.push_back(std::move(s));
  }
  return out;
}

tkz::connection::ConnectionSystem load_conn(const std::string& file) {
  return tkz::io::connection_from(tkz::io::read_file(file));
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Twisted KZ connection toolkit"};
  app.require_subcommand(1);
  std::string out;

  // algebra info
  auto* algebra = app.add_subcommand("algebra", "Lie algebra data");
  auto* algebra_info = algebra->add_subcommand("info", "Basis, form and invariant residuals");
  std::string alg_type = "sl", alg_config;
  int alg_n = 2;
  algebra_info->add_option("--type", alg_type, "Built-in family (sl)");
  algebra_info->add_option("--n", alg_n, "Rank parameter of the family");
  algebra_info->add_option("--config", alg_config, "Take the algebra from a run configuration");
  algebra_info->add_option("--out", out);
  algebra->require_subcommand(1);

  // connection build
  auto* conn_cmd = app.add_subcommand("connection", "Connection matrices");
  auto* conn_build = conn_cmd->add_subcommand("build", "Build the connection of a configuration");
  std::string config;
  conn_build->add_option("--config", config)->required();
  conn_build->add_option("--out", out);
  conn_cmd->require_subcommand(1);

  // check flatness / euler
  auto* check = app.add_subcommand("check", "Numerical checks of a connection");
  std::string conn_file, points_file;
  int count = 10;
  std::uint64_t seed = 1;
  auto* flat = check->add_subcommand("flatness", "Flatness residual at points");
  auto* euler = check->add_subcommand("euler", "Euler contraction at points");
  for (auto* c : {flat, euler}) {
    c->add_option("--conn", conn_file)->required();
    c->add_option("--points", points_file, "Points file; random points when absent");
    c->add_option("--count", count, "Number of random points");
    c->add_option("--seed", seed);
    c->add_option("--out", out);
  }
  check->require_subcommand(1);

  // singular analyze
  auto* sing = app.add_subcommand("singular", "Singularity analysis");
  auto* analyze = sing->add_subcommand("analyze", "Holomorphy verdict and indicial data after a change of variables");
  std::string change_file, cutoff = "8", ts_out, branches_json;
  bool same_sign = false;
  analyze->add_option("--conn", conn_file)->required();
  analyze->add_option("--change", change_file)->required();
  analyze->add_option("--cutoff", cutoff, "Exclusive exponent bound Q, e.g. 8 or 17/2");
  analyze->add_option("--branches", branches_json, "JSON array of branch indices");
  analyze->add_flag("--same-sign", same_sign, "Analyze the same-sign variant");
  analyze->add_option("--system-out", ts_out, "Write the transformed system here");
  analyze->add_option("--out", out);
  sing->require_subcommand(1);

  // solve local
  auto* solve = app.add_subcommand("solve", "Local solutions");
  auto* local = solve->add_subcommand("local", "Frobenius fundamental solution of a transformed system");
  std::string system_file, fixed_json;
  int component = 1, order = 40;
  double radius = std::numeric_limits<double>::infinity();
  local->add_option("--system", system_file)->required();
  local->add_option("--component", component, "1-based component j");
  local->add_option("--order", order, "Number of series coefficients M");
  local->add_option("--fixed-eta", fixed_json, "JSON array of the other eta values");
  local->add_option("--coefficient-radius", radius);
  local->add_option("--out", out);
  solve->require_subcommand(1);

  // transport / monodromy
  auto* trans = app.add_subcommand("transport", "Transport solutions along a path");
  std::string path_file, init_file;
  double tol = 1e-10;
  trans->add_option("--conn", conn_file)->required();
  trans->add_option("--path", path_file)->required();
  trans->add_option("--initial", init_file, "JSON matrix of initial columns; identity when absent");
  trans->add_option("--tol", tol);
  trans->add_option("--out", out);
  auto* mono = app.add_subcommand("monodromy", "Monodromy matrix of a closed loop");
  mono->add_option("--conn", conn_file)->required();
  mono->add_option("--loop", path_file)->required();
  mono->add_option("--seed-matrix", init_file, "JSON matrix of initial columns; identity when absent");
  mono->add_option("--tol", tol);
  mono->add_option("--out", out);

  // run
  auto* run = app.add_subcommand("run", "Run every stage of a configuration");
  std::string csv_prefix;
  run->add_option("--config", config)->required();
  run->add_option("--out", out, "Report path (overrides the configuration)");
  run->add_option("--csv-prefix", csv_prefix, "Prefix for the CSV exports (overrides the configuration)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (algebra_info->parsed()) {
      auto alg = alg_config.empty() ? tkz::liealg::build_algebra(alg_type, alg_n)
                                    : tkz::pipeline::algebra_from(tkz::io::read_file(alg_config).at("algebra"));
      auto ch = tkz::liealg::check_algebra(alg);
      json dual = tkz::io::to_json(tkz::CMatrix(tkz::liealg::dual_basis(alg)));
      emit(json{{"name", alg.name},
                {"dim", alg.dim},
                {"labels", alg.basis_labels},
                {"dual_coxeter", tkz::io::to_json(alg.dual_coxeter)},
                {"form", tkz::io::to_json(alg.form)},
                {"dual_basis", dual},
                {"checks", {{"antisymmetry", ch.antisymmetry}, {"jacobi", ch.jacobi}, {"invariance", ch.invariance},
                            {"symmetry", ch.symmetry}, {"condition", ch.condition}}}},
           out);
    } else if (conn_build->parsed()) {
      auto cfg = tkz::pipeline::parse_config(tkz::io::read_file(config));
      emit(tkz::io::to_json(tkz::pipeline::build_connection(cfg).conn), out);
    } else if (flat->parsed() || euler->parsed()) {
      auto conn = load_conn(conn_file);
      auto pts = load_points(points_file, conn.n, count, seed);
      if (flat->parsed()) {
        json arr = json::array();
        double worst = 0.0;
        for (const auto& s : pts) {
          auto f = tkz::connection::flatness_residual(conn, s.z, s.p);
          worst = std::max(worst, f.residual);
          arr.push_back(json{{"z", tkz::io::to_json(s.z)}, {"branches", s.p}, {"residual", f.residual},
                             {"est_error", f.est_error}, {"per_pair", f.per_pair}});
        }
        emit(json{{"points", arr}, {"max_residual", worst}}, out);
      } else {
        std::vector<std::vector<std::complex<double>>> z;
        std::vector<std::vector<int>> p;
        for (const auto& s : pts) z.push_back(s.z), p.push_back(s.p);
        auto e = tkz::connection::euler_contraction(conn, z, p);
        emit(json{{"matrix", tkz::io::to_json(e.mean)}, {"deviation", e.deviation}, {"points", pts.size()}}, out);
      }
    } else if (analyze->parsed()) {
      auto conn = load_conn(conn_file);
      if (same_sign) conn = tkz::connection::same_sign_variant(conn);
      json cj = tkz::io::read_file(change_file);
      if (!cj.contains("t")) cj["t"] = conn.t;
      auto cov = tkz::io::change_from(cj);
      tkz::rcalc::ComposeOptions opt;
      if (!branches_json.empty()) opt.branches = json::parse(branches_json).get<std::vector<int>>();
      std::vector<tkz::Rational> cut(conn.n, tkz::Rational::parse(cutoff));
      auto res = tkz::singular::check_simple_singularity(conn, cov, cut, opt);
      json result{{"hypothesis", res.system.hypothesis()}, {"verdict", tkz::io::to_json(res.verdict)}};
      json ind = json::array();
      if (res.verdict.holomorphic)
        for (int j = 0; j < conn.n; ++j) {
          json d = tkz::io::to_json(tkz::singular::indicial_data(res.system, j));
          d["component"] = j + 1;
          ind.push_back(d);
        }
      result["indicial"] = ind;
      if (!ts_out.empty()) tkz::io::write_file(ts_out, tkz::io::to_json(res.system));
      emit(result, out);
    } else if (local->parsed()) {
      auto ts = tkz::io::transformed_from(tkz::io::read_file(system_file));
      std::vector<std::complex<double>> fixed(ts.size(), 0.0);
      if (!fixed_json.empty()) fixed = tkz::io::cvector_from(json::parse(fixed_json));
      auto sec = tkz::singular::section(ts, component - 1, fixed);
      tkz::frobenius::FrobeniusOptions fo;
      fo.order = order;
      fo.coefficient_radius = radius;
      emit(tkz::io::to_json(tkz::frobenius::frobenius_fundamental(sec.H, fo)), out);
    } else if (trans->parsed() || mono->parsed()) {
      auto conn = load_conn(conn_file);
      auto path = tkz::io::path_from(tkz::io::read_file(path_file));
      CMatrix init = init_file.empty() ? CMatrix(CMatrix::Identity(conn.state_dim, conn.state_dim))
                                       : tkz::io::matrix_from(tkz::io::read_file(init_file));
      tkz::transport::TransportOptions to;
      to.tol = tol;
      if (trans->parsed()) {
        auto r = tkz::transport::integrate_path(conn, path, init, to);
        emit(json{{"value", tkz::io::to_json(r.value)}, {"est_error", r.est_error}, {"branch_end", r.branch_end},
                  {"arg_end", r.arg_end}, {"diff_arg_end", r.diff_arg_end}, {"steps", r.steps}},
             out);
      } else {
        auto m = tkz::transport::monodromy_loop(conn, path, init, to);
        emit(json{{"convention", "continued fundamental matrix = matrix * initial"},
                  {"matrix", tkz::io::to_json(m.matrix)},
                  {"det", tkz::io::to_json(m.det)},
                  {"est_error", m.est_error},
                  {"branch_end", m.branch_end}},
             out);
      }
    } else if (run->parsed()) {
      auto cfg = tkz::pipeline::parse_config(tkz::io::read_file(config));
      if (!out.empty()) cfg.report_path = out;
      if (!csv_prefix.empty()) cfg.csv_prefix = csv_prefix;
      auto rep = tkz::pipeline::run_pipeline(cfg);
      emit(rep.data, cfg.report_path);
      if (!cfg.csv_prefix.empty()) {
        tkz::io::write_text(cfg.csv_prefix + "_exponents.csv", rep.exponents_csv);
        tkz::io::write_text(cfg.csv_prefix + "_residuals.csv", rep.residuals_csv);
      }
    }
  } catch (const tkz::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
