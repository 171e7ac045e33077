#include "doctest.h"

#include <cmath>
#include <numbers>

#include "crlab/grid.hpp"

using namespace crlab;
using grid::GridScalar;
using grid::GridSpec;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

GridScalar wave(const GridSpec& g) {
    return GridScalar::sample(g, [](std::span<const double> x) {
        return grid::Complex(std::sin(two_pi * x[0]) * std::cos(two_pi * 2.0 * x[1]) + std::cos(two_pi * x[2]), 0.0);
    });
}

GridScalar wave_dx(const GridSpec& g) {
    return GridScalar::sample(g, [](std::span<const double> x) {
        return grid::Complex(two_pi * std::cos(two_pi * x[0]) * std::cos(two_pi * 2.0 * x[1]), 0.0);
    });
}

} // namespace

TEST_CASE("spectral derivative is exact on band-limited data") {
    const GridSpec g = GridSpec::uniform(3, 16);
    CHECK((grid::derivative(wave(g), 0) - wave_dx(g)).max_abs() < 1e-12);
}

TEST_CASE("fd4 derivative converges at fourth order") {
    std::vector<double> err;
    for (int n : {16, 32, 64}) {
        const GridSpec g = GridSpec::uniform(3, n, grid::Scheme::fd4);
        err.push_back((grid::derivative(wave(g), 0) - wave_dx(g)).max_abs());
    }
    CHECK(std::log2(err[0] / err[1]) > 3.8);
    CHECK(std::log2(err[1] / err[2]) > 3.8);
}

TEST_CASE("derivatives are skew-adjoint under the grid quadrature") {
    for (auto scheme : {grid::Scheme::spectral, grid::Scheme::fd4}) {
        const GridSpec g = GridSpec::uniform(3, 12, scheme);
        const GridScalar f = wave(g);
        const GridScalar h = GridScalar::sample(g, [](std::span<const double> x) {
            return grid::Complex(std::exp(std::sin(two_pi * x[0]) + std::cos(two_pi * x[1])), 0.0);
        });
        for (int a = 0; a < 3; ++a) {
            const double lhs = grid::integrate(f * grid::derivative(h, a)).real();
            const double rhs = -grid::integrate(h * grid::derivative(f, a)).real();
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(GridSpec::uniform(3, 4).validate(), InvalidGrid);
    GridSpec bad = GridSpec::uniform(2, 8);
    bad.periods[1] = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidGrid);
    CHECK_NOTHROW(GridSpec::uniform(5, 8).validate());
    CHECK(grid::scheme_from_string("fd4") == grid::Scheme::fd4);
    CHECK_THROWS(grid::scheme_from_string("fd2"));
}

TEST_CASE("quadrature of a constant is the volume") {
    GridSpec g = GridSpec::uniform(3, 8);
    g.periods = {1.0, 2.0, 0.5};
    CHECK(grid::integrate(GridScalar(g, 3.0)).real() == doctest::Approx(3.0));
}

TEST_CASE("coordinate d of df vanishes") {
    const GridSpec g = GridSpec::uniform(3, 16);
    const GridScalar f = wave(g);
    grid::OneForm df;
    for (int a = 0; a < 3; ++a) df.c.push_back(grid::derivative(f, a));
    CHECK(grid::exterior_derivative(df).max_abs() < 1e-10);
}

TEST_CASE("Heisenberg frame structure constants and exterior derivative") {
    const GridSpec g = GridSpec::uniform(3, 16);
    const auto frame = grid::Frame::heisenberg(g, 1);
    // [E_x, E_y] = -E_t.
    CHECK(frame.structure_constant(2, 0, 1) == -1.0);
    CHECK(frame.structure_constant(2, 1, 0) == 1.0);
    CHECK(frame.structure_constant(0, 0, 1) == 0.0);
    // d(e^t) = dx ^ dy in frame components: e^t = (0, 0, 1).
    grid::OneForm et;
    for (int a = 0; a < 3; ++a) et.c.emplace_back(g, a == 2 ? 1.0 : 0.0);
    const grid::TwoForm d = frame.exterior_derivative(et);
    CHECK((d.component(0, 1) - GridScalar(g, 1.0)).max_abs() < 1e-14);
    CHECK(d.component(0, 2).max_abs() < 1e-14);
    CHECK(d.component(1, 0).values()[0].real() == doctest::Approx(-1.0));
    // d^2 f = 0 for t-independent f.
    const GridScalar f = GridScalar::sample(g, [](std::span<const double> x) {
        return grid::Complex(std::sin(two_pi * x[0]) * std::cos(two_pi * x[1]), 0.0);
    });
    CHECK(frame.exterior_derivative(frame.differential(f)).max_abs() < 1e-11);
}

TEST_CASE("y d_t is skew on the grid") {
    const GridSpec g = GridSpec::uniform(3, 12);
    const auto frame = grid::Frame::heisenberg(g, 1);
    const GridScalar f = GridScalar::sample(g, [](std::span<const double> x) {
        return grid::Complex(std::sin(two_pi * (x[0] + x[2])) + std::cos(two_pi * (x[1] - 2 * x[2])), 0.0);
    });
    const GridScalar h = GridScalar::sample(g, [](std::span<const double> x) {
        return grid::Complex(std::cos(two_pi * (x[0] - x[1] + x[2])), 0.0);
    });
    const double lhs = grid::integrate(f * frame.apply(0, h)).real();
    const double rhs = -grid::integrate(h * frame.apply(0, f)).real();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("fourier multiplier matches the second derivative") {
    const GridSpec g = GridSpec::uniform(3, 16);
    const GridScalar f = wave(g);
    const GridScalar m = grid::fourier_multiplier(f, [](std::span<const int> k) { return -two_pi * two_pi * k[0] * k[0]; });
    CHECK((m - grid::derivative(grid::derivative(f, 0), 0)).max_abs() < 1e-10);
}

TEST_CASE("pointwise inverse and singular detection") {
    const GridSpec g = GridSpec::uniform(1, 8);
    grid::MatrixField a{2, {GridScalar(g, 2.0), GridScalar(g, 1.0), GridScalar(g, 1.0), GridScalar(g, 3.0)}};
    const auto inv = grid::pointwise_inverse(a);
    CHECK(inv(0, 0).values()[3].real() == doctest::Approx(0.6));
    CHECK(inv(0, 1).values()[3].real() == doctest::Approx(-0.2));
    grid::MatrixField s{2, {GridScalar(g, 1.0), GridScalar(g, 2.0), GridScalar(g, 2.0), GridScalar(g, 4.0)}};
    CHECK_THROWS_AS(grid::pointwise_inverse(s), SingularFrame);
}
