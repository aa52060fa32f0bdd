#include <doctest.h>

#include <cmath>
#include <vector>

#include "popup/errors.hpp"
#include "popup/unit_kinematics.hpp"

using namespace popup;

namespace {

void check_vec(const Vec3& a, const Vec3& b, double tol = 1e-12) {
  CHECK(a.x() == doctest::Approx(b.x()).epsilon(tol));
  CHECK(a.y() == doctest::Approx(b.y()).epsilon(tol));
  CHECK(a.z() == doctest::Approx(b.z()).epsilon(tol));
  CHECK((a - b).norm() < tol);
}

}  // namespace

TEST_CASE("unit vertex at flat, deployed and fully folded angles") {
  const UnitCell c{1.0, 1.0, 1.0, 0.0};
  check_vec(unit_vertex(c, DeploymentAngle(0.0)).position, {2, 0, 0});
  check_vec(unit_vertex(c, DeploymentAngle(kPi / 2)).position, {1, 0, 1});
  check_vec(unit_vertex(c, DeploymentAngle(kPi)).position, {0, 0, 0});
}

TEST_CASE("deployment angle outside [0, pi] is rejected") {
  CHECK_THROWS_AS(DeploymentAngle(-0.1), Error);
  CHECK_THROWS_AS(DeploymentAngle(4.0), Error);
}

TEST_CASE("chain vertices") {
  SUBCASE("single unit ends at (L, 0, 0)") {
    const std::vector<UnitCell> cells{{1, 1, 1, 0}};
    const auto v = chain_vertices(cells, DeploymentAngle::deployed(), 1.0);
    REQUIRE(v.size() == 1);
    check_vec(v[0].position, {1, 0, 0});
  }
  SUBCASE("uniform cells trace the diagonal") {
    const std::vector<UnitCell> cells(4, UnitCell{0.25, 0.25, 1, 0});
    const auto v = chain_vertices(cells, DeploymentAngle::deployed(), 1.0);
    for (int i = 0; i < 4; ++i) {
      check_vec(v[i].position, {(i + 1) / 4.0, 0, 1 - (i + 1) / 4.0});
      CHECK(v[i].position.x() + v[i].position.z() == doctest::Approx(1.0));
    }
  }
  SUBCASE("direct substitution at psi = pi/3") {
    const std::vector<UnitCell> cells{{0.3, 0.5, 1, 0}, {0.7, 0.5, 1, 0}};
    const auto v = chain_vertices(cells, DeploymentAngle(kPi / 3), 1.0);
    check_vec(v[0].position, {0.3 + 0.5 * 0.5, 0, 0.5 * std::sqrt(3.0) / 2});
    check_vec(v[1].position, {1.0, 0, 0});
  }
  SUBCASE("isometry violation") {
    const std::vector<UnitCell> cells{{0.3, 0.5, 1, 0}, {0.6, 0.5, 1, 0}};
    try {
      chain_vertices(cells, DeploymentAngle::deployed(), 1.0);
      FAIL("expected IsometryViolation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::IsometryViolation);
    }
  }
}

TEST_CASE("splay orientation") {
  CHECK(splay_theta(0.0, 0.3) == 0.0);
  CHECK(splay_theta(0.0, 1.2) == 0.0);
  CHECK(splay_theta(1.0, 0.0) == kPi / 2);
  CHECK(splay_theta(std::tan(kPi / 8), 0.0) == doctest::Approx(kPi / 4).epsilon(1e-14));
}

TEST_CASE("splayed vertex") {
  const UnitCell w2{1, 1, 2.0, 0.0};
  for (double psi : {0.0, 0.7, kPi / 2, 2.5}) check_vec(splayed_vertex(w2, psi), {2.0, 0, 0});
  UnitCell top = w2;
  top.alpha = 1.0;
  check_vec(splayed_vertex(top, 0.0), {0.0, 2.0, 0.0});
  const UnitCell c{1, 1, 3.0, 1.0};
  check_vec(splayed_vertex(c, kPi / 2), {1.0, 2 * std::sqrt(2.0), 0.0});
}

TEST_CASE("strip offset") {
  CHECK(strip_offset(2.0, 1.0, 1.0, kPi) == doctest::Approx(0.0));
  CHECK(strip_offset(1.5, 1.5, 0.7, 0.4) == 0.0);
  CHECK(strip_offset(2.0, 1.0, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(strip_offset(2.0, 1.0, 0.0, 0.3) == 0.0);
}

TEST_CASE("connector solve satisfies both conditions") {
  const std::array<Vec3, 4> p{Vec3(0.1, 0.0, 0.2), Vec3(1.3, 0.2, 0.9), Vec3(0.3, 1.0, 0.1), Vec3(1.1, 1.2, 1.4)};
  const ConnectorSolve s = solve_connector(p, 0.8, 1.0);
  for (double r : s.residuals) CHECK(std::abs(r) < 1e-10);
}

TEST_CASE("connector solve on a degenerate configuration") {
  const std::array<Vec3, 4> p{Vec3(0, 0, 0), Vec3(0, 0, 0), Vec3(0, 1, 0), Vec3(0, 1, 0)};
  try {
    solve_connector(p, 0.5, 1.0);
    FAIL("expected SingularSystem");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularSystem);
  }
}
