#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "bregman/config.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace bregman;

TEST_CASE("builtin instance config") {
  auto cfg = parse_config(R"({"instance": "lp_simplex", "kernel": "shannon",
                              "surrogate": "linear", "t": 1.0})");
  REQUIRE(cfg.problem.has_value());
  CHECK(cfg.problem->kernel.tag() == "shannon");
  CHECK(cfg.problem->surrogate == SurrogateKind::Linear);
  CHECK(cfg.t == 1.0);
  CHECK(cfg.run.max_iters == 1000);
  CHECK(cfg.run.stop_r_ext.has_value());
}

TEST_CASE("kernel override and poly alpha") {
  auto cfg = parse_config(R"({"instance": "lp_simplex", "kernel": "poly:2"})");
  CHECK(cfg.problem->kernel.family() == KernelFamily::Polynomial);
  auto cfg2 = parse_config(R"({"instance": "poly_trap", "alpha": 3.0})");
  CHECK(cfg2.problem->kernel.param() == doctest::Approx(3.0));
}

TEST_CASE("run options round trip through serialization") {
  std::string text = R"({"instance": "lp_simplex", "t": 0.5,
    "max_iters": 77, "stop_r_ext": null, "record_every": 3,
    "mode": "log_domain", "x0": [0.4, 0.6]})";
  auto cfg = parse_config(text);
  CHECK(cfg.run.max_iters == 77);
  CHECK_FALSE(cfg.run.stop_r_ext.has_value());
  CHECK(cfg.run.record_every == 3);
  CHECK(cfg.run.mode == RunConfig::Mode::LogDomain);
  REQUIRE(cfg.x0.has_value());
  CHECK((*cfg.x0)[0] == 0.4);

  // parse(serialize(parse(text))) fixes the same fields
  auto again = parse_config(config_to_json(cfg));
  CHECK(again.run.max_iters == cfg.run.max_iters);
  CHECK(again.run.record_every == cfg.run.record_every);
  CHECK(again.run.mode == cfg.run.mode);
  CHECK(again.t == cfg.t);
  CHECK(again.run.stop_r_ext.has_value() == cfg.run.stop_r_ext.has_value());
  REQUIRE(again.x0.has_value());
  CHECK(*again.x0 == *cfg.x0);
}

TEST_CASE("custom polytope instance") {
  std::string text = R"({
    "instance": "custom", "kernel": "shannon", "t": 1.0,
    "constraint": {"type": "polytope", "A": [[1, 1, 1]], "b": [1]},
    "objective": {"type": "linear", "c": [-1, 0, 0]}
  })";
  auto cfg = parse_config(text);
  REQUIRE(cfg.problem.has_value());
  CHECK(cfg.problem->dim() == 3);
  CHECK(cfg.problem->f.affine);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  CHECK(cfg.problem->f.value(x) == doctest::Approx(-1.0 / 3.0));
}

TEST_CASE("custom quadratic objective with box constraint") {
  std::string text = R"({
    "instance": "custom", "kernel": "fermi", "t": 1.0,
    "constraint": {"type": "box", "lower": [0, 0], "upper": [1, 1]},
    "objective": {"type": "quadratic", "Q": [[1, 0], [0, 1]],
                  "q": [-0.5, -0.5], "convex": true}
  })";
  auto cfg = parse_config(text);
  CHECK(cfg.problem->f.convex);
  Eigen::VectorXd x(2);
  x << 0.5, 0.5;
  CHECK(cfg.problem->f.value(x) == doctest::Approx(0.25 - 0.5));
  CHECK(cfg.problem->f.grad(x).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("infinite box bounds spelled as strings") {
  std::string text = R"({
    "instance": "custom", "kernel": "poly:1", "t": 1.0,
    "constraint": {"type": "box", "lower": [0], "upper": ["inf"]},
    "objective": {"type": "quadratic", "Q": [[2]], "q": [-6], "convex": true}
  })";
  auto cfg = parse_config(text);
  CHECK(std::isinf(cfg.problem->set.upper()[0]));
  CHECK_FALSE(cfg.problem->set.compact());
}

TEST_CASE("trap payload") {
  auto cfg = parse_config(
      R"({"eps": 0.2, "K": 60, "alpha": 2.0, "instances": ["poly"]})");
  CHECK(cfg.trap_eps == 0.2);
  CHECK(cfg.trap_K == 60);
  CHECK(cfg.trap_alpha == 2.0);
  CHECK_FALSE(cfg.trap_entropy);
  CHECK(cfg.trap_poly);
}

TEST_CASE("malformed configs raise anchored errors") {
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  try {
    parse_config("{\n  \"instance\": \"lp_simplex\",\n  oops\n}");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(R"({"instance": "nope"})"),
                  UnknownInstanceError);
  CHECK_THROWS_AS(parse_config(R"({"instance": "lp_simplex", "t": -1})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"instance": "lp_simplex", "mode": "x"})"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config(R"({"instance": "custom", "constraint": {"type": "?"}})"),
      ConfigError);
}

TEST_CASE("random polytope generation is seed-deterministic") {
  auto a = random_polytope_instance(4, 2, 11, KernelSpec::shannon());
  auto b = random_polytope_instance(4, 2, 11, KernelSpec::shannon());
  CHECK(a.set.A() == b.set.A());
  CHECK(a.set.b() == b.set.b());
  auto c = random_polytope_instance(4, 2, 12, KernelSpec::shannon());
  CHECK(a.set.A() != c.set.A());

  // the seed override wins over the config seed
  auto cfg = parse_config(
      R"({"instance": "random_polytope", "n": 4, "m": 2, "seed": 11})", 12u);
  CHECK(cfg.problem->set.A() == c.set.A());
}
