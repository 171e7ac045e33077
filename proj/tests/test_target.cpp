#include "doctest.h"

#include <array>
#include <cmath>
#include <random>

#include "crlab/target.hpp"

using namespace crlab;
using target::Complex;
using target::TargetMetric;

namespace {

// Heisenberg metric (dt - y dx)^2 + dx^2 + dy^2 in coordinates (x, y, t).
Eigen::MatrixXd heisenberg_metric(std::span<const double> p) {
    const double y = p[1];
    Eigen::MatrixXd g(3, 3);
    g << 1 + y * y, 0, -y, 0, 1, 0, -y, 0, 1;
    return g;
}

using Vec = std::array<Complex, 3>;

Vec curv(const TargetMetric& m, const std::vector<double>& p, const Vec& x, const Vec& y, const Vec& z) {
    Vec out{};
    m.curvature(p, x, y, z, out);
    return out;
}

double sectional(const TargetMetric& m, const std::vector<double>& p, const Vec& x, const Vec& y) {
    return m.pair(p, curv(m, p, x, y, y), x).real();
}

} // namespace

TEST_CASE("Webster target: orthonormal frame and sectional curvatures") {
    const auto w = TargetMetric::webster_heisenberg();
    const std::vector<double> p{0.3, -0.7, 0.1};
    CHECK((w.metric(p) - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-15);
    const Vec ex{1, 0, 0}, ey{0, 1, 0}, et{0, 0, 1};
    CHECK(sectional(w, p, ex, ey) == doctest::Approx(-0.75));
    CHECK(sectional(w, p, ex, et) == doctest::Approx(0.25));
    CHECK(sectional(w, p, ey, et) == doctest::Approx(0.25));
}

TEST_CASE("Webster curvature agrees with a finite-difference chart of the same metric") {
    const auto w = TargetMetric::webster_heisenberg();
    const auto c = TargetMetric::chart(3, heisenberg_metric);
    const std::vector<double> p{0.2, 0.4, -0.3};
    // e_x = d_x + y d_t, e_y = d_y, e_t = d_t in chart coordinates.
    const Vec ex{1, 0, p[1]}, ey{0, 1, 0}, et{0, 0, 1};
    CHECK(sectional(c, p, ex, ey) == doctest::Approx(-0.75).epsilon(1e-6));
    CHECK(sectional(c, p, ex, et) == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(sectional(c, p, ey, et) == doctest::Approx(0.25).epsilon(1e-6));
    const Vec wx{1, 0, 0}, wy{0, 1, 0};
    CHECK(sectional(w, p, wx, wy) == doctest::Approx(sectional(c, p, ex, ey)).epsilon(1e-6));
}

TEST_CASE("curvature symmetries on the Webster target") {
    const auto w = TargetMetric::webster_heisenberg();
    const std::vector<double> p{0.0, 0.5, 0.0};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto rv = [&] { return Vec{u(rng), u(rng), u(rng)}; };
    for (int trial = 0; trial < 5; ++trial) {
        const Vec x = rv(), y = rv(), z = rv(), v = rv();
        const Vec a = curv(w, p, x, y, z), b = curv(w, p, y, z, x), c = curv(w, p, z, x, y);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(a[i] + b[i] + c[i]) < 1e-13);
        const Vec ayx = curv(w, p, y, x, z);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(a[i] + ayx[i]) < 1e-13);
        CHECK(std::abs(w.pair(p, a, v) + w.pair(p, curv(w, p, x, y, v), z)) < 1e-13);
    }
}

TEST_CASE("Webster connection is metric") {
    const auto w = TargetMetric::webster_heisenberg();
    const std::vector<double> p{0.0, 0.0, 0.0};
    const auto gamma = w.christoffel(p);
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(gamma[k * 9 + i * 3 + j] + gamma[j * 9 + i * 3 + k] == doctest::Approx(0.0));
}

TEST_CASE("sphere curvature is the constant-curvature tensor") {
    const auto s = TargetMetric::embedded_sphere_2();
    const std::vector<double> p{0.0, 0.0, 1.0};
    const Vec x{1.0, 0.5, 0}, y{-0.3, 2.0, 0}, z{0.7, 0.1, 0};
    const Vec r = curv(s, p, x, y, z);
    const Complex yz = s.pair(p, y, z), xz = s.pair(p, x, z);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(r[i] - (yz * x[i] - xz * y[i])) < 1e-13);
}

TEST_CASE("exponential maps") {
    const auto s = TargetMetric::embedded_sphere_2();
    const std::vector<double> north{0.0, 0.0, 1.0};
    const std::vector<double> v{std::numbers::pi / 2, 0.0, 0.0};
    const auto q = s.exp_map(north, v);
    CHECK(q[0] == doctest::Approx(1.0));
    CHECK(std::abs(q[2]) < 1e-15);
    CHECK_THROWS_AS(s.exp_map(north, std::vector<double>{4.0, 0.0, 0.0}), StepTooLarge);

    const auto flat_chart = TargetMetric::chart(2, [](std::span<const double>) { return Eigen::MatrixXd::Identity(2, 2).eval(); });
    const auto e = flat_chart.exp_map(std::vector<double>{0.1, 0.2}, std::vector<double>{0.3, -0.4});
    CHECK(e[0] == doctest::Approx(0.4));
    CHECK(e[1] == doctest::Approx(-0.2));

    // Webster geodesic along e_x through y = 0 stays a straight line.
    const auto w = TargetMetric::webster_heisenberg();
    const auto g = w.exp_map(std::vector<double>{0.0, 0.0, 0.0}, std::vector<double>{0.5, 0.0, 0.0});
    CHECK(g[0] == doctest::Approx(0.5));
    CHECK(std::abs(g[1]) < 1e-12);
    CHECK(std::abs(g[2]) < 1e-12);
}

TEST_CASE("maps, projection and sections along the sphere") {
    const auto g = grid::GridSpec::uniform(3, 8);
    const auto sph = std::make_shared<const TargetMetric>(TargetMetric::embedded_sphere_2());
    const auto phi = target::MapField::constant(sph, g, {0.0, 0.0, 1.0});
    CHECK(phi.sphere_defect() < 1e-15);
    auto s = target::PullbackSection::zero(g, 3);
    s.c[0] = grid::GridScalar(g, 0.2);
    s.c[2] = grid::GridScalar(g, 5.0);
    const auto t = target::project(phi, s);
    CHECK(t.c[2].max_abs() < 1e-15);
    CHECK(target::normal_defect(phi, t) < 1e-15);
    const auto moved = target::exp_map(phi, t);
    CHECK(moved.sphere_defect() < 1e-14);
    CHECK(moved.periodic[0].values()[0].real() == doctest::Approx(std::sin(0.2)));
}

TEST_CASE("projection map differential") {
    const auto g = grid::GridSpec::uniform(3, 8);
    const auto t2 = std::make_shared<const TargetMetric>(TargetMetric::flat_torus(2));
    const auto pi = target::MapField::projection(t2, g);
    const auto dphi = target::differential(grid::Frame::heisenberg(g, 1), pi);
    CHECK((dphi[0].c[0] - grid::GridScalar(g, 1.0)).max_abs() < 1e-14);
    CHECK(dphi[0].c[1].max_abs() < 1e-14);
    CHECK((dphi[1].c[1] - grid::GridScalar(g, 1.0)).max_abs() < 1e-14);
    CHECK(dphi[2].max_abs() < 1e-14);
}
