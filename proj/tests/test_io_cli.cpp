#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include <sstream>

#include "zeff/cli.hpp"
#include "zeff/io.hpp"

using namespace zeff;
using test_support::check_matrix_near;
using test_support::fixture;

TEST_CASE("network files") {
  const auto file = io::read_network(fixture("path3.json"));
  CHECK(file.node_names == std::vector<std::string>{"p1", "p2", "p3"});
  CHECK(file.graph.edge_count() == 2);
  CHECK(file.graph.tail(0) == 0);
  CHECK(file.graph.head(1) == 2);
  REQUIRE(file.boundary.has_value());
  CHECK(*file.boundary == std::vector<Index>{0, 2});
  CHECK(file.node_id("p2") == 1);
  CHECK_THROWS_AS(file.node_id("nope"), ParseError);

  SUBCASE("round trip through serialization") {
    const auto doc = io::serialize(file);
    const auto again = io::parse_network(doc);
    CHECK(again.node_names == file.node_names);
    CHECK(again.graph.edges() == file.graph.edges());
    check_matrix_near<double>(again.sigma, file.sigma, 0.0);
    CHECK(again.boundary == file.boundary);
    CHECK(io::serialize(again) == doc);
  }
}

TEST_CASE("network file errors carry field context") {
  using io::json;
  CHECK_THROWS_WITH_AS(io::parse_network(json{{"edges", json::array()}}),
                       doctest::Contains("nodes"), ParseError);
  CHECK_THROWS_WITH_AS(
      io::parse_network(json{{"nodes", {"a", "b"}},
                             {"edges", {{{"tail", "a"}, {"head", "zz"}}}},
                             {"sigma", {{"diag", {1.0}}}}}),
      doctest::Contains("edges[0].head"), ParseError);
  CHECK_THROWS_WITH_AS(
      io::parse_network(json{{"nodes", {"a", "b"}},
                             {"edges", {{{"tail", "a"}, {"head", "b"}}}},
                             {"sigma", {{"diag", {1.0, 2.0}}}}}),
      doctest::Contains("sigma.diag"), ParseError);
  CHECK_THROWS_AS(io::load_json(fixture("does_not_exist.json")), ParseError);
}

TEST_CASE("lattice and z-problem files") {
  const auto lat = io::read_lattice(fixture("lattice_2x2_identity.json"));
  CHECK(lat.lattice.dim() == 2);
  CHECK(lat.lattice.edge_count() == 8);
  const auto lat2 = io::parse_lattice(io::serialize(lat));
  check_matrix_near<double>(lat2.sigma, lat.sigma, 0.0);

  const auto zp = io::read_zproblem(fixture("zprob_ones.json"));
  CHECK(zp.u_dim == 1);
  CHECK(zp.e_dim == 2);
  CHECK(zp.j_dim == 0);
  const auto problem = zp.problem();
  CHECK(problem.decomp().ambient_dim() == 3);
  const auto zp2 = io::parse_zproblem(io::serialize(zp));
  CHECK(zp2.u_dim == zp.u_dim);
  check_matrix_near<double>(zp2.sigma, zp.sigma, 0.0);
}

TEST_CASE("vector literals") {
  const RealVec v = io::parse_vector_literal("1.5,-2,0.25");
  REQUIRE(v.size() == 3);
  CHECK(v(1) == -2.0);
  CHECK_THROWS_AS(io::parse_vector_literal("1.5,x"), ParseError);
  CHECK_THROWS_AS(io::parse_vector_literal(""), ParseError);
}

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(cli::RunConfig cfg) {
  std::ostringstream out, err;
  const int code = cli::run(cfg, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("cli dtn") {
  cli::RunConfig cfg;
  cfg.command = "dtn";
  cfg.input_path = fixture("path3.json");

  SUBCASE("both routes in text form") {
    const auto res = run_cli(cfg);
    CHECK(res.code == 0);
    CHECK(res.out.find("route agreement residual") != std::string::npos);
    CHECK(res.out.find("0.5") != std::string::npos);
  }

  SUBCASE("json form records the seed and matrices") {
    cfg.format = "json";
    cfg.seed = 99;
    const auto res = run_cli(cfg);
    CHECK(res.code == 0);
    const auto doc = io::json::parse(res.out);
    CHECK(doc["seed"] == 99);
    CHECK(doc["lambda_schur"][0][0].get<double>() == doctest::Approx(0.5));
    CHECK(doc["agreement_residual"].get<double>() <= 1e-8);
    CHECK(doc["psd"] == true);
  }

  SUBCASE("missing boundary is a usage error") {
    cfg.input_path = fixture("no_boundary.json");
    const auto res = run_cli(cfg);
    CHECK(res.code == 2);
    CHECK(res.err.find("boundary") != std::string::npos);
  }

  SUBCASE("disconnected input fails the z-problem route") {
    cfg.input_path = fixture("disconnected.json");
    cfg.method = "zproblem";
    const auto res = run_cli(cfg);
    CHECK(res.code == 1);
    CHECK(res.err.find("connected") != std::string::npos);
  }

  SUBCASE("schur route still covers disconnected input") {
    cfg.input_path = fixture("disconnected.json");
    cfg.method = "schur";
    CHECK(run_cli(cfg).code == 0);
  }
}

TEST_CASE("cli effcond") {
  cli::RunConfig cfg;
  cfg.command = "effcond";

  SUBCASE("series fixture") {
    cfg.input_path = fixture("path3.json");
    cfg.pair = "p1,p3";
    cfg.format = "json";
    const auto res = run_cli(cfg);
    CHECK(res.code == 0);
    const auto doc = io::json::parse(res.out);
    CHECK(doc["sigma_eff"].get<double>() == doctest::Approx(0.5));
    CHECK(doc["r_eff"].get<double>() == doctest::Approx(2.0));
  }

  SUBCASE("masked edge reports the infinity sentinel") {
    cfg.input_path = fixture("masked_edge.json");
    cfg.pair = "p1,p2";
    cfg.format = "json";
    const auto res = run_cli(cfg);
    CHECK(res.code == 0);
    const auto doc = io::json::parse(res.out);
    CHECK(doc["sigma_eff"].get<double>() == 0.0);
    CHECK(doc["r_eff"] == "inf");
    CHECK(doc["zero_by_structure"] == true);
  }

  SUBCASE("bad pair is a usage error") {
    cfg.input_path = fixture("path3.json");
    cfg.pair = "p1";
    CHECK(run_cli(cfg).code == 2);
  }
}

TEST_CASE("cli lattice") {
  cli::RunConfig cfg;
  cfg.command = "lattice";
  cfg.format = "json";

  SUBCASE("identity cell") {
    cfg.input_path = fixture("lattice_2x2_identity.json");
    const auto res = run_cli(cfg);
    CHECK(res.code == 0);
    const auto doc = io::json::parse(res.out);
    CHECK(doc["sigma_star"].get<double>() == doctest::Approx(1.0));
    CHECK(doc["effcond_exists"] == true);
    CHECK(doc["dims"]["U"] == 1);
    CHECK(doc["dims"]["E"] == 3);
    CHECK(doc["dims"]["J"] == 4);
  }

  SUBCASE("two-conductance chain") {
    cfg.input_path = fixture("lattice_d1_two_conductances.json");
    const auto res = run_cli(cfg);
    CHECK(res.code == 0);
    const auto doc = io::json::parse(res.out);
    CHECK(doc["sigma_star"].get<double>() == doctest::Approx(1.5));
  }
}

TEST_CASE("cli zsolve") {
  cli::RunConfig cfg;
  cfg.command = "zsolve";
  cfg.input_path = fixture("zprob_ones.json");
  cfg.e0_literal = "1.0";
  cfg.format = "json";
  const auto res = run_cli(cfg);
  CHECK(res.code == 0);
  const auto doc = io::json::parse(res.out);
  CHECK(doc["j0"][0].get<double>() == doctest::Approx(0.0));
  CHECK(doc["e"][1].get<double>() == doctest::Approx(-1.0));
  CHECK(doc["kernel_dim"] == 1);
  CHECK(doc["residual"].get<double>() <= 1e-9);

  SUBCASE("wrong arity is a usage error") {
    cfg.e0_literal = "1.0,2.0";
    CHECK(run_cli(cfg).code == 2);
  }
}

TEST_CASE("cli verify") {
  cli::RunConfig cfg;
  cfg.command = "verify";
  cfg.suite = "counterexamples";
  cfg.format = "json";
  cfg.seed = 5;

  SUBCASE("default tolerances pass") {
    const auto res = run_cli(cfg);
    CHECK(res.code == 0);
    const auto doc = io::json::parse(res.out);
    CHECK(doc["failed"] == 0);
    CHECK(doc["seed"] == 5);
    CHECK(doc["checks"].size() > 5);
  }

  SUBCASE("reports are deterministic for a fixed seed") {
    const auto a = run_cli(cfg);
    const auto b = run_cli(cfg);
    CHECK(a.out == b.out);
  }

  SUBCASE("broken tolerance reports failures and a nonzero exit") {
    cfg.suite = "zproblem";
    cfg.tol.eq_atol = 1e-30;
    const auto res = run_cli(cfg);
    CHECK(res.code == 1);
    const auto doc = io::json::parse(res.out);
    CHECK(doc["failed"].get<int>() > 0);
  }
}

TEST_CASE("cli rejects unknown commands") {
  cli::RunConfig cfg;
  cfg.command = "frobnicate";
  CHECK(run_cli(cfg).code == 2);
}
