#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <atomic>
#include <optional>
#include <cmath>
#include <thread>

#include "bregman/stationarity.hpp"
#include "bregman/update.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace bregman;

namespace {

ProblemInstance simplex_quadratic(int n, const Eigen::VectorXd& z,
                                  const KernelSpec& k,
                                  SurrogateKind s = SurrogateKind::Linear) {
  SmoothObjective f;
  f.label = "0.5||x-z||^2";
  f.value = [z](const Eigen::VectorXd& x) { return 0.5 * (x - z).squaredNorm(); };
  f.grad = [z](const Eigen::VectorXd& x) { return (x - z).eval(); };
  f.hessian_diag = [n](const Eigen::VectorXd&) {
    return Eigen::VectorXd::Ones(n).eval();
  };
  f.convex = true;
  return ProblemInstance(f, ConstraintSet::simplex(n), k, s, 1.0);
}

double subproblem_value(const ProblemInstance& p, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& x, double t) {
  // G(y; x) with a linear surrogate, for feasible y
  Eigen::VectorXd g = p.f.grad(x);
  return p.f.value(x) + g.dot(y - x) + bregman_vec(p.kernel, y, x) / t;
}

}  // namespace

TEST_CASE("entropy instance update matches the closed form value") {
  auto lp = builtin("entropy_trap");
  Eigen::VectorXd x(2);
  x << 0.5, 0.5;
  auto res = bregman_update(lp, x, 1.0);
  REQUIRE(res.status == UpdateStatus::Ok);
  CHECK(res.y[0] == doctest::Approx(0.7310585786300049).epsilon(1e-12));
  CHECK(res.y[1] == doctest::Approx(0.2689414213699951).epsilon(1e-12));
}

TEST_CASE("zero gradient fixes the point") {
  Eigen::VectorXd z = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  for (auto k : {KernelSpec::shannon(), KernelSpec::burg(),
                 KernelSpec::euclidean()}) {
    auto p = simplex_quadratic(3, z, k);
    auto res = bregman_update(p, z, 1.0);
    REQUIRE(res.status == UpdateStatus::Ok);
    CHECK((res.y - z).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("ill-posed instance reports an unbounded subproblem") {
  auto ill = builtin("illposed_inverse");
  for (double x0 : {0.5, 0.6, 0.75, 0.9, 1.0}) {
    Eigen::VectorXd x(1);
    x << x0;
    auto res = bregman_update(ill, x, 1.0);
    CHECK(res.status == UpdateStatus::Unbounded);
  }
  // far enough right the subproblem is attained again
  Eigen::VectorXd x(1);
  x << 3.0;
  CHECK(bregman_update(ill, x, 1.0).status == UpdateStatus::Ok);
}

TEST_CASE("closed form agrees with the generic dual path") {
  auto g = testutil::rng(31);
  std::uniform_real_distribution<double> tdist(0.05, 1.0);
  std::normal_distribution<double> gdist(0.0, 2.0);
  auto lp = builtin("lp_simplex");
  UpdateOptions generic;
  generic.force_generic = true;
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 2 + int(g() % 5);
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = gdist(g);
    SmoothObjective f;
    f.value = [z](const Eigen::VectorXd& x) { return z.dot(x); };
    f.grad = [z](const Eigen::VectorXd&) { return z; };
    f.affine = true;
    f.convex = true;
    ProblemInstance p(f, ConstraintSet::simplex(n), KernelSpec::shannon(),
                      SurrogateKind::Linear, 1.0);
    Eigen::VectorXd x = testutil::random_simplex_point(g, n, 1e-5);
    double t = tdist(g);
    auto a = bregman_update(p, x, t);
    auto b = bregman_update(p, x, t, generic);
    REQUIRE(a.status == UpdateStatus::Ok);
    REQUIRE(b.status == UpdateStatus::Ok);
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(a.y[i] - b.y[i]) <= 1e-10 * std::max(a.y[i], 1e-30));
  }
}

TEST_CASE("interior preservation across kernels and sets") {
  auto g = testutil::rng(32);
  std::uniform_real_distribution<double> tdist(0.05, 1.0);
  std::normal_distribution<double> zdist(0.3, 0.5);
  for (auto k : {KernelSpec::shannon(), KernelSpec::burg(),
                 KernelSpec::polynomial(1.0), KernelSpec::fractional_power(0.5),
                 KernelSpec::hellinger()}) {
    for (int trial = 0; trial < 300; ++trial) {
      Eigen::VectorXd z(3);
      for (int i = 0; i < 3; ++i) z[i] = zdist(g);
      auto p = simplex_quadratic(3, z, k);
      Eigen::VectorXd x = testutil::random_simplex_point(g, 3, 1e-8);
      auto res = bregman_update(p, x, tdist(g));
      REQUIRE(res.status == UpdateStatus::Ok);
      for (int i = 0; i < 3; ++i) {
        CHECK(res.y[i] > k.left());
        CHECK(res.y[i] < k.right());
      }
    }
  }
  // Fermi-Dirac on the unit box
  SmoothObjective f;
  f.value = [](const Eigen::VectorXd& x) { return (x.array() - 0.8).matrix().squaredNorm(); };
  f.grad = [](const Eigen::VectorXd& x) {
    return (2.0 * (x.array() - 0.8)).matrix().eval();
  };
  f.convex = true;
  ProblemInstance boxp(f, ConstraintSet::box(Eigen::VectorXd::Zero(2),
                                             Eigen::VectorXd::Ones(2)),
                       KernelSpec::fermi_dirac(), SurrogateKind::Linear, 1.0);
  auto g2 = testutil::rng(33);
  std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
  for (int trial = 0; trial < 300; ++trial) {
    Eigen::VectorXd x(2);
    x << u(g2), u(g2);
    auto res = bregman_update(boxp, x, 0.7);
    REQUIRE(res.status == UpdateStatus::Ok);
    CHECK(res.y.minCoeff() > 0.0);
    CHECK(res.y.maxCoeff() < 1.0);
  }
}

TEST_CASE("KKT certificate at the returned point") {
  auto g = testutil::rng(34);
  std::uniform_real_distribution<double> tdist(0.1, 1.0);
  for (auto k : {KernelSpec::shannon(), KernelSpec::burg(),
                 KernelSpec::polynomial(2.0)}) {
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd z(4);
      std::normal_distribution<double> zd(0.25, 0.3);
      for (int i = 0; i < 4; ++i) z[i] = zd(g);
      auto p = simplex_quadratic(4, z, k);
      Eigen::VectorXd x = testutil::random_simplex_point(g, 4, 1e-6);
      double t = tdist(g);
      UpdateOptions generic;
      generic.force_generic = true;
      auto res = bregman_update(p, x, t, generic);
      REQUIRE(res.status == UpdateStatus::Ok);
      Eigen::VectorXd grad = p.f.grad(x);
      double scale = 1.0 + grad.norm();
      for (int i = 0; i < 4; ++i) {
        double kkt = grad[i] + res.dual_mu[0] +
                     (k.phi_prime(res.y[i]) - k.phi_prime(x[i])) / t;
        // representation floor: near a blow-up endpoint |phi'| reaches 1e9+
        // and a correctly rounded inverse still leaves O(eps |phi'|) here
        double floor_term =
            16.0 * std::numeric_limits<double>::epsilon() *
            std::max(std::abs(k.phi_prime(res.y[i])),
                     std::abs(k.phi_prime(x[i]))) /
            t;
        CHECK(std::abs(kkt) <= 1e-9 * scale + floor_term);
      }
    }
  }
}

TEST_CASE("descent of the subproblem objective") {
  auto g = testutil::rng(35);
  auto lp = builtin("lp_simplex");
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x = testutil::random_simplex_point(g, 2, 1e-6);
    double t = 0.5;
    auto res = bregman_update(lp, x, t);
    REQUIRE(res.status == UpdateStatus::Ok);
    CHECK(subproblem_value(lp, res.y, x, t) <=
          subproblem_value(lp, x, x, t) + 1e-12);
  }
}

TEST_CASE("extended update freezes boundary coordinates") {
  auto lp = builtin("lp_simplex");
  Eigen::VectorXd v01(2), v10(2);
  v01 << 0.0, 1.0;
  v10 << 1.0, 0.0;
  auto a = extended_update(lp, v01, 1.0);
  REQUIRE(a.status == UpdateStatus::Ok);
  CHECK(a.y == v01);  // spurious fixed point
  auto b = extended_update(lp, v10, 1.0);
  REQUIRE(b.status == UpdateStatus::Ok);
  CHECK(b.y == v10);  // stationary fixed point
}

TEST_CASE("extended update equals the plain update on interior points") {
  auto g = testutil::rng(36);
  auto lp = builtin("lp_simplex");
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd x = testutil::random_simplex_point(g, 2, 1e-6);
    auto a = bregman_update(lp, x, 1.0);
    auto b = extended_update(lp, x, 1.0);
    CHECK(a.y == b.y);  // bitwise, same code path
  }
}

TEST_CASE("extended update on a partially frozen 3-simplex") {
  // one coordinate pinned at 0; the other two follow the reduced step
  Eigen::VectorXd z(3);
  z << 1.0, 0.0, -1.0;
  SmoothObjective f;
  f.value = [z](const Eigen::VectorXd& x) { return z.dot(x); };
  f.grad = [z](const Eigen::VectorXd&) { return z; };
  f.affine = true;
  ProblemInstance p(f, ConstraintSet::simplex(3), KernelSpec::shannon(),
                    SurrogateKind::Linear, 1.0);
  Eigen::VectorXd x(3);
  x << 0.4, 0.0, 0.6;
  auto res = extended_update(p, x, 1.0);
  REQUIRE(res.status == UpdateStatus::Ok);
  CHECK(res.y[1] == 0.0);
  CHECK(res.y[0] + res.y[2] == doctest::Approx(1.0).epsilon(1e-12));
  // reduced closed form: y ~ x exp(-t z) on coordinates {0, 2}
  double w0 = 0.4 * std::exp(-1.0), w2 = 0.6 * std::exp(1.0);
  CHECK(res.y[0] == doctest::Approx(w0 / (w0 + w2)).epsilon(1e-12));
  CHECK(res.y[2] == doctest::Approx(w2 / (w0 + w2)).epsilon(1e-12));
}

TEST_CASE("continuity of the extended update toward the spurious vertex") {
  auto lp = builtin("entropy_trap");
  Eigen::VectorXd v01(2);
  v01 << 0.0, 1.0;
  auto limit = extended_update(lp, v01, 1.0);
  double prev = 1e9;
  for (int j = 1; j <= 14; ++j) {
    Eigen::VectorXd xj(2);
    xj << std::pow(10.0, -j), 1.0 - std::pow(10.0, -j);
    auto res = extended_update(lp, xj, 1.0);
    double gap = (res.y - limit.y).norm();
    CHECK(gap <= prev + 1e-15);
    prev = gap;
    if (j == 14) CHECK(gap <= 1e-6);
  }
}

TEST_CASE("quadratic surrogate fixed point solves the diagonal model") {
  auto g = testutil::rng(37);
  Eigen::VectorXd z(3);
  z << 0.5, 0.2, 0.1;
  auto p = simplex_quadratic(3, z, KernelSpec::shannon(),
                             SurrogateKind::QuadraticDiag);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd x = testutil::random_simplex_point(g, 3, 1e-4);
    double t = 0.8;
    auto res = bregman_update(p, x, t);
    REQUIRE(res.status == UpdateStatus::Ok);
    // optimality of the full diagonal-quadratic subproblem at y
    Eigen::VectorXd gx = p.f.grad(x);
    Eigen::VectorXd D = p.f.hessian_diag(x);
    auto k = p.kernel;
    double mu = res.dual_mu[0];
    for (int i = 0; i < 3; ++i) {
      double kkt = gx[i] + D[i] * (res.y[i] - x[i]) + mu +
                   (k.phi_prime(res.y[i]) - k.phi_prime(x[i])) / t;
      CHECK(std::abs(kkt) < 1e-8);
    }
  }
}

TEST_CASE("unsupported combinations are rejected") {
  auto nc = builtin("nonconvex_simplex");
  auto full = nc.with_surrogate(SurrogateKind::FullObjective);
  Eigen::VectorXd x(2);
  x << 0.5, 0.5;
  CHECK_THROWS_AS(bregman_update(full, x, 1.0), UnsupportedCombinationError);

  // multi-row polytope with a non-degenerate interior block
  Eigen::MatrixXd A(2, 4);
  A << 1, 1, 0, 0,
       0, 0, 1, 1;
  Eigen::VectorXd b(2);
  b << 1.0, 1.0;
  SmoothObjective f;
  f.value = [](const Eigen::VectorXd& x_) { return x_[0]; };
  f.grad = [](const Eigen::VectorXd& x_) {
    Eigen::VectorXd g_ = Eigen::VectorXd::Zero(x_.size());
    g_[0] = 1.0;
    return g_;
  };
  ProblemInstance p(f, ConstraintSet::polytope(A, b), KernelSpec::shannon(),
                    SurrogateKind::Linear, 1.0);
  Eigen::VectorXd x4 = Eigen::VectorXd::Constant(4, 0.5);
  CHECK_THROWS_AS(bregman_update(p, x4, 1.0), UnsupportedCombinationError);

  // but the pinned reduction at a vertex works
  Eigen::VectorXd vert(4);
  vert << 1.0, 0.0, 1.0, 0.0;
  auto res = extended_update(p, vert, 1.0);
  CHECK(res.y == vert);
}

TEST_CASE("update preconditions") {
  auto lp = builtin("lp_simplex");
  Eigen::VectorXd boundary(2), outside(2), inside(2);
  boundary << 0.0, 1.0;
  outside << 0.7, 0.7;
  inside << 0.5, 0.5;
  CHECK_THROWS_AS(bregman_update(lp, boundary, 1.0), DomainError);
  CHECK_THROWS_AS(extended_update(lp, outside, 1.0), DomainError);
  CHECK_THROWS_AS(bregman_update(lp, inside, 0.0), DomainError);
  CHECK_THROWS_AS(bregman_update(lp, inside, 2.0), DomainError);  // above t_bar
}

TEST_CASE("kernels with negative domain clip at the polytope bound") {
  // euclidean kernel on the simplex: the update is a euclidean projection
  // step, and from (0.9, 0.1) with gradient (-1, 0) it lands exactly on the
  // vertex (1, 0) with the second coordinate clipped at zero
  auto lp = builtin("lp_simplex").with_kernel(KernelSpec::euclidean());
  Eigen::VectorXd x(2);
  x << 0.9, 0.1;
  auto res = bregman_update(lp, x, 1.0);
  REQUIRE(res.status == UpdateStatus::Ok);
  CHECK(res.y[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.y[1] == 0.0);
  CHECK(res.dual_mu[0] == doctest::Approx(0.9).epsilon(1e-9));

  // hellinger admits negatives too; same instance stays feasible
  auto hp = builtin("lp_simplex").with_kernel(KernelSpec::hellinger());
  auto res2 = bregman_update(hp, x, 1.0);
  REQUIRE(res2.status == UpdateStatus::Ok);
  CHECK(res2.y.minCoeff() >= 0.0);
  CHECK(res2.y.sum() == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("single-row polytope with mixed weights") {
  // 2 y1 + y2 = 2 over y >= 0 with the Burg kernel
  Eigen::MatrixXd A(1, 2);
  A << 2.0, 1.0;
  Eigen::VectorXd b(1);
  b << 2.0;
  SmoothObjective f;
  Eigen::VectorXd c(2);
  c << -1.0, 0.5;
  f.value = [c](const Eigen::VectorXd& x) { return c.dot(x); };
  f.grad = [c](const Eigen::VectorXd&) { return c; };
  f.affine = true;
  ProblemInstance p(f, ConstraintSet::polytope(A, b), KernelSpec::burg(),
                    SurrogateKind::Linear, 1.0);
  Eigen::VectorXd x(2);
  x << 0.5, 1.0;
  auto res = bregman_update(p, x, 0.5);
  REQUIRE(res.status == UpdateStatus::Ok);
  CHECK(2.0 * res.y[0] + res.y[1] == doctest::Approx(2.0).epsilon(1e-11));
  CHECK(res.y.minCoeff() > 0.0);
  // KKT per coordinate
  double t = 0.5, mu = res.dual_mu[0];
  auto k = p.kernel;
  for (int i = 0; i < 2; ++i) {
    double kkt = c[i] + A(0, i) * mu +
                 (k.phi_prime(res.y[i]) - k.phi_prime(x[i])) / t;
    CHECK(std::abs(kkt) < 1e-9);
  }
}

TEST_CASE("stress: random single-row polytopes across every kernel") {
  // feasibility, interiority and a perturbation-based optimality check that
  // is independent of the KKT machinery
  auto g = testutil::rng(39);
  std::uniform_real_distribution<double> wdist(-1.0, 1.0);
  std::uniform_real_distribution<double> tdist(0.1, 1.0);
  std::normal_distribution<double> cdist(0.0, 1.0);
  std::vector<KernelSpec> kernels = {
      KernelSpec::shannon(),         KernelSpec::burg(),
      KernelSpec::polynomial(1.5),   KernelSpec::fractional_power(0.3),
      KernelSpec::hellinger(),       KernelSpec::fermi_dirac(),
      KernelSpec::euclidean()};
  int solved = 0, unbounded = 0;
  for (int trial = 0; trial < 700; ++trial) {
    const auto& k = kernels[static_cast<std::size_t>(trial) % kernels.size()];
    const int n = 3;
    Eigen::VectorXd x(n), a(n), c(n);
    std::uniform_real_distribution<double> xdist(0.05, 0.45);
    for (int i = 0; i < n; ++i) {
      x[i] = xdist(g);
      a[i] = wdist(g);
      if (std::abs(a[i]) < 0.1) a[i] = 0.1;  // keep weights well-scaled
      c[i] = cdist(g);
    }
    double b = a.dot(x);
    SmoothObjective f;
    f.value = [c](const Eigen::VectorXd& v) { return c.dot(v); };
    f.grad = [c](const Eigen::VectorXd&) { return c; };
    f.affine = true;
    std::optional<ProblemInstance> p;
    try {
      p.emplace(f,
                ConstraintSet::polytope(a.transpose(),
                                        Eigen::VectorXd::Constant(1, b)),
                k, SurrogateKind::Linear, 1.0);
    } catch (const ConstructionError&) {
      continue;  // pairing heuristic refused (e.g. vertices outside dom(phi))
    }
    double t = tdist(g);
    auto res = bregman_update(*p, x, t);
    if (res.status == UpdateStatus::Unbounded) {
      // legitimate only for kernels whose slope range is bounded above
      CHECK(std::isfinite(k.slope_sup()));
      ++unbounded;
      continue;
    }
    REQUIRE(res.status == UpdateStatus::Ok);
    ++solved;
    const auto& y = res.y;
    CHECK(std::abs(a.dot(y) - b) <= 1e-9 * std::max(1.0, std::abs(b)));
    for (int i = 0; i < n; ++i) {
      CHECK(y[i] >= 0.0);
      CHECK(y[i] > k.left());
      CHECK(y[i] < k.right());
    }
    // independent optimality: feasible perturbations never improve the
    // subproblem objective
    auto value = [&](const Eigen::VectorXd& v) {
      return c.dot(v) + bregman_vec(k, v, x) / t;
    };
    double base = value(y);
    for (int probe = 0; probe < 20; ++probe) {
      Eigen::VectorXd d(n);
      for (int i = 0; i < n; ++i) d[i] = cdist(g);
      d -= a * (a.dot(d) / a.squaredNorm());
      if (d.norm() < 1e-12) continue;
      d.normalize();
      double eps = 1e-5;
      for (int i = 0; i < n; ++i) {
        double room_lo = y[i] - std::max(0.0, k.left());
        double room_hi = k.right() - y[i];
        double room = d[i] < 0.0 ? room_lo : room_hi;
        if (std::abs(d[i]) > 1e-12)
          eps = std::min(eps, 0.5 * room / std::abs(d[i]));
      }
      if (eps <= 0.0) continue;
      CHECK(value(y + eps * d) >= base - 1e-10 * std::max(1.0, std::abs(base)));
    }
  }
  CHECK(solved > 400);
  INFO("solved ", solved, " unbounded ", unbounded);
}

TEST_CASE("concurrent updates on one shared instance") {
  auto lp = builtin("lp_simplex");
  Eigen::VectorXd x(2);
  x << 0.5, 0.5;
  auto expect = bregman_update(lp, x, 1.0).y;
  std::vector<std::thread> workers;
  std::atomic<int> mismatches{0};
  for (int w = 0; w < 4; ++w) {
    workers.emplace_back([&] {
      for (int i = 0; i < 200; ++i) {
        auto res = bregman_update(lp, x, 1.0);
        if (res.y != expect) ++mismatches;
      }
    });
  }
  for (auto& t : workers) t.join();
  CHECK(mismatches == 0);
}

TEST_CASE("log-domain step matches the linear step") {
  auto g = testutil::rng(38);
  auto lp = builtin("lp_simplex");
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x = testutil::random_simplex_point(g, 2, 1e-7);
    double t = 0.9;
    Eigen::VectorXd ly = eg_step_log(x.array().log().matrix(),
                                     lp.f.grad(x), t);
    auto res = bregman_update(lp, x, t);
    for (int i = 0; i < 2; ++i)
      CHECK(std::exp(ly[i]) == doctest::Approx(res.y[i]).epsilon(1e-12));
  }
}
