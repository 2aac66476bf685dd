#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "tkz/errors.hpp"

using namespace tkz;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("tkz_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct Run {
  int code = -1;
  std::string err;
};

Run tkz_cli(const std::string& args) {
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd = std::string("\"") + TKZ_CLI + "\" " + args + " 2> \"" + err.string() + "\"";
  Run r;
  const int status = std::system(cmd.c_str());
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err);
  std::stringstream ss;
  ss << in.rdbuf();
  r.err = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_json(const std::string& name, const io::json& j) {
  const fs::path p = scratch() / name;
  io::write_file(p.string(), j);
  return p;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("twisted N = 1 configuration end to end") {
  const auto out = scratch() / "twisted_report.json";
  auto r = tkz_cli("run --config " + q(test::config_path("twisted_sl2_halforder_n1.json")) + " --out " + q(out));
  REQUIRE(r.code == 0);
  auto rep = io::read_file(out.string());
  CHECK(rep["format"] == "tkz-report-1");
  const auto& sing = rep["singular"][0];
  CHECK(sing["verdict"]["holomorphic"] == true);
  CHECK(sing["hypothesis"] == "linear");
  for (const auto& e : sing["indicial"][0]["exact"]) CHECK(io::rational_from(e) == Rational(-1, 3));
  CHECK(sing["local"][0]["match_residual"].get<double>() < 1e-9);
  const cplx v = io::complex_from(rep["transport"][0]["value"][0][0]);
  CHECK(std::abs(v - std::pow(4.0, -1.0 / 6.0)) < 1e-9);
  for (const auto& e : rep["monodromy"][0]["eigenvalues"])
    CHECK(std::abs(io::complex_from(e) - std::exp(cplx(0.0, -kPi / 3.0))) < 1e-8);
  CHECK(rep["monodromy"][0]["branch_end"] == io::json::array({1}));
}

TEST_CASE("classical N = 2 configuration end to end") {
  const auto out = scratch() / "classical_report.json";
  const auto prefix = scratch() / "classical";
  auto r = tkz_cli("run --config " + q(test::config_path("classical_sl2_n2.json")) + " --out " + q(out) +
                   " --csv-prefix " + q(prefix));
  REQUIRE(r.code == 0);
  auto rep = io::read_file(out.string());
  CHECK(rep["flatness"]["max_residual"].get<double>() < 1e-9);
  CHECK(rep["euler"]["deviation"].get<double>() < 1e-10);
  int with_local = 0;
  for (const auto& s : rep["singular"]) {
    if (s["same_sign"].get<bool>()) {
      CHECK(s["verdict"]["holomorphic"] == false);
      REQUIRE(s["verdict"]["offenders"].size() == 1);
      const auto& off = s["verdict"]["offenders"][0];
      CHECK(off["component"] == 1);
      CHECK(io::rational_from(off["exponents"][0]) == Rational(1));
      CHECK(io::rational_from(off["exponents"][1]) == Rational(-1));
    } else {
      CHECK(s["verdict"]["holomorphic"] == true);
    }
    for (const auto& l : s["local"]) {
      CHECK(l["match_residual"].get<double>() < 1e-7);
      ++with_local;
    }
  }
  CHECK(with_local == 2);
  CHECK(fs::exists(prefix.string() + "_exponents.csv"));
  CHECK(fs::exists(prefix.string() + "_residuals.csv"));
}

TEST_CASE("reports are deterministic") {
  const auto a = scratch() / "det_a.json";
  const auto b = scratch() / "det_b.json";
  const auto cfg = q(test::config_path("classical_sl2_n2.json"));
  REQUIRE(tkz_cli("run --config " + cfg + " --out " + q(a)).code == 0);
  REQUIRE(tkz_cli("run --config " + cfg + " --out " + q(b)).code == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("critical level exits with a configuration error") {
  auto cfg = io::read_file(test::config_path("classical_sl2_n2.json"));
  cfg["level"] = -2;
  auto r = tkz_cli("run --config " + q(write_json("critical.json", cfg)));
  CHECK(r.code == 2);
  CHECK(r.err.find("critical") != std::string::npos);
  CHECK_THROWS_AS(pipeline::parse_config(cfg), ConfigError);
}

TEST_CASE("slot count must match N") {
  auto cfg = io::read_file(test::config_path("classical_sl2_n2.json"));
  cfg["N"] = 3;
  CHECK_THROWS_AS(pipeline::parse_config(cfg), ConfigError);
  CHECK(tkz_cli("run --config " + q(write_json("slots.json", cfg))).code == 2);
}

TEST_CASE("errors name the failing stage") {
  auto cfg = io::read_file(test::config_path("classical_sl2_n2.json"));
  // z1 = z2 = 1 at the start of the path.
  cfg["paths"][0]["vertices"][0] = io::json::array({io::json::array({1, 0}), io::json::array({1, 0})});
  auto r = tkz_cli("run --config " + q(write_json("bad_path.json", cfg)));
  CHECK(r.code == 2);
  CHECK(r.err.find("transport:out_and_back") != std::string::npos);

  CHECK(tkz_cli("run --no-such-flag").code == 2);
  CHECK(tkz_cli("run --config " + q(scratch() / "missing.json")).code == 2);
}

TEST_CASE("degenerate change exits with code 3") {
  auto cfg = io::read_file(test::config_path("classical_sl2_n2.json"));
  cfg["changes"][0]["A"] = io::json::array({io::json::array({1, 0}), io::json::array({0, 1})});
  cfg["changes"][0]["delta"] = io::json::array({"0", "0"});
  auto r = tkz_cli("run --config " + q(write_json("degenerate.json", cfg)));
  CHECK(r.code == 3);
  CHECK(r.err.find("singular:difference_and_infinity") != std::string::npos);
}

TEST_CASE("connection files round-trip") {
  const auto conn_file = scratch() / "conn.json";
  const auto cfg_path = test::config_path("classical_sl2_n2.json");
  REQUIRE(tkz_cli("connection build --config " + q(cfg_path) + " --out " + q(conn_file)).code == 0);
  auto loaded = io::connection_from(io::read_file(conn_file.string()));
  auto built = pipeline::build_connection(pipeline::parse_config(io::read_file(cfg_path))).conn;
  CHECK(loaded.A == built.A);
  for (const auto& s : test::sample_points(2, 10, 4)) {
    auto a = loaded.eval(s.z, s.p);
    auto b = built.eval(s.z, s.p);
    for (int l = 0; l < 2; ++l) CHECK(max_abs(a[l] - b[l]) < 1e-14);
  }
}

TEST_CASE("subcommands chain through files") {
  const auto conn_file = scratch() / "tw_conn.json";
  auto cfg = test::config_path("twisted_sl2_halforder_n1.json");
  REQUIRE(tkz_cli("connection build --config " + q(cfg) + " --out " + q(conn_file)).code == 0);

  const auto flat = scratch() / "flat.json";
  REQUIRE(tkz_cli("check flatness --conn " + q(conn_file) + " --count 5 --seed 3 --out " + q(flat)).code == 0);
  const auto euler = scratch() / "euler.json";
  REQUIRE(tkz_cli("check euler --conn " + q(conn_file) + " --count 5 --out " + q(euler)).code == 0);
  CHECK(io::read_file(euler.string())["deviation"].get<double>() < 1e-10);

  io::json change = {{"A", {{1}}}, {"beta", {0}}, {"delta", {"0"}}, {"t", 2}};
  const auto sys = scratch() / "system.json";
  const auto verdict = scratch() / "verdict.json";
  REQUIRE(tkz_cli("singular analyze --conn " + q(conn_file) + " --change " + q(write_json("change.json", change)) +
                  " --cutoff 8 --system-out " + q(sys) + " --out " + q(verdict))
              .code == 0);
  CHECK(io::read_file(verdict.string())["verdict"]["holomorphic"] == true);

  const auto local = scratch() / "local.json";
  REQUIRE(tkz_cli("solve local --system " + q(sys) + " --component 1 --order 8 --out " + q(local)).code == 0);
  auto lam = io::matrix_from(io::read_file(local.string())["Lambda"]);
  CHECK(max_abs(lam + CMatrix::Identity(2, 2) / 3.0) < 1e-14);

  io::json path = {{"vertices", {{{1, 0}}, {{4, 0}}}}, {"branch_start", {0}}};
  const auto tr = scratch() / "transport.json";
  REQUIRE(tkz_cli("transport --conn " + q(conn_file) + " --path " + q(write_json("path.json", path)) +
                  " --tol 1e-11 --out " + q(tr))
              .code == 0);
  auto value = io::matrix_from(io::read_file(tr.string())["value"]);
  CHECK(std::abs(value(0, 0) - std::pow(4.0, -1.0 / 6.0)) < 1e-9);

  auto loop = io::to_json(transport::circle_loop({1.0}, 0, 0.0, 32));
  const auto mono = scratch() / "mono.json";
  REQUIRE(tkz_cli("monodromy --conn " + q(conn_file) + " --loop " + q(write_json("loop.json", loop)) + " --out " +
                  q(mono))
              .code == 0);
  auto m = io::matrix_from(io::read_file(mono.string())["matrix"]);
  CHECK(std::abs(m(0, 0) - std::exp(cplx(0.0, -kPi / 3.0))) < 1e-8);
}
