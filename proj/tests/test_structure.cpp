#include "doctest.h"

#include <cmath>
#include <numbers>

#include "crlab/structure.hpp"

using namespace crlab;
using grid::GridScalar;
using grid::GridSpec;

namespace {

GridScalar sin_sin(const GridSpec& g, double amp) {
    return GridScalar::sample(g, [amp](std::span<const double> x) {
        return grid::Complex(amp * std::sin(2 * std::numbers::pi * x[0]) * std::sin(2 * std::numbers::pi * x[1]), 0.0);
    });
}

} // namespace

TEST_CASE("flat Heisenberg structure") {
    const GridSpec g = GridSpec::uniform(3, 16);
    const auto s = structure::solve_structure(structure::heisenberg(1, g));
    CHECK(s.levi_residual < 1e-14);
    CHECK(s.structure_residual < 1e-14);
    CHECK(s.torsion.max_abs() < 1e-14);
    CHECK(s.scal_w.max_abs() < 1e-14);
    CHECK(s.volume() == doctest::Approx(1.0));
    // R = E_t.
    CHECK((s.reeb.c[2] - GridScalar(g, 1.0)).max_abs() < 1e-14);
    CHECK(s.reeb.c[0].max_abs() < 1e-14);
}

TEST_CASE("heisenberg rejects grids of the wrong rank") {
    CHECK_THROWS_AS(structure::heisenberg(1, GridSpec::uniform(5, 8)), DimensionMismatch);
    CHECK_THROWS_AS(structure::heisenberg(2, GridSpec::uniform(3, 8)), DimensionMismatch);
}

TEST_CASE("constant rescaling scales volume and keeps torsion zero") {
    const GridSpec g = GridSpec::uniform(3, 12);
    const double u = 0.3;
    const auto s = structure::solve_structure(structure::conformal_rescale(structure::heisenberg(1, g), GridScalar(g, u)));
    CHECK(s.torsion.max_abs() < 1e-13);
    CHECK(s.volume() == doctest::Approx(std::exp(4 * u)));
    CHECK((s.reeb.c[2] - GridScalar(g, std::exp(-2 * u))).max_abs() < 1e-13);
}

TEST_CASE("non-constant rescaling: residuals, torsion and Reeb equations") {
    const GridSpec g = GridSpec::uniform(3, 32);
    const auto cf = structure::conformal_rescale(structure::heisenberg(1, g), sin_sin(g, 0.1));
    const auto s = structure::solve_structure(cf);
    CHECK(s.levi_residual < 1e-10);
    CHECK(s.structure_residual < 1e-10);
    CHECK(s.torsion.max_abs() > 1e-2);
    CHECK(s.scal_w.imag().max_abs() < 1e-10);
    // The Reeb field gains horizontal components and satisfies its
    // defining equations.
    const auto reeb = structure::reeb_field(cf);
    CHECK(reeb.c[0].max_abs() > 1e-3);
    CHECK((grid::contract(cf.theta, reeb) + grid::Complex(-1.0)).max_abs() < 1e-10);
    const grid::TwoForm dtheta = cf.frame->exterior_derivative(cf.theta);
    for (int b = 0; b < 3; ++b) {
        grid::VectorField e;
        for (int a = 0; a < 3; ++a) e.c.emplace_back(g, a == b ? 1.0 : 0.0);
        CHECK(grid::contract(dtheta, reeb, e).max_abs() < 1e-10);
    }
}

TEST_CASE("fd4 structure residual converges") {
    std::vector<double> r;
    for (int n : {16, 32, 64}) {
        const GridSpec g = GridSpec::uniform(3, n, grid::Scheme::fd4);
        const auto cf = structure::conformal_rescale(structure::heisenberg(1, g), sin_sin(g, 0.1));
        r.push_back(structure::levi_residual(cf));
        CHECK_NOTHROW(structure::solve_structure(cf));
    }
    CHECK(std::log2(r[0] / r[1]) > 3.5);
    CHECK(std::log2(r[1] / r[2]) > 3.5);
}

TEST_CASE("a coframe that is not Levi-normalized is rejected") {
    const GridSpec g = GridSpec::uniform(3, 12);
    auto cf = structure::heisenberg(1, g);
    for (auto& c : cf.theta.c) c *= 2.0;
    CHECK_THROWS_AS(structure::solve_structure(cf), NormalizationFailure);
}

TEST_CASE("flat Heisenberg for n = 2") {
    const auto s = structure::flat_heisenberg(2, GridSpec::uniform(5, 8));
    CHECK(s.n() == 2);
    CHECK(s.T.size() == 2);
    CHECK(s.flat);
    CHECK(s.volume() == doctest::Approx(2.0));
}
