#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "crlab/extension.hpp"
#include "crlab/fields.hpp"
#include "crlab/paneitz.hpp"

using namespace crlab;
using grid::GridScalar;
using grid::GridSpec;
using target::MapField;
using target::TargetMetric;

namespace {

std::shared_ptr<const TargetMetric> torus(int m) { return std::make_shared<const TargetMetric>(TargetMetric::flat_torus(m)); }

} // namespace

TEST_CASE("Einstein divergence coefficients") {
    const auto z = extension::einstein_divergence_coeffs(0.0, 0.2, 2);
    CHECK(z.a_dr == doctest::Approx(0.4));
    CHECK(z.a_rr == doctest::Approx(-0.04));
    CHECK(z.a_RR == doctest::Approx(-0.04));
    CHECK(z.a_b == doctest::Approx(0.2));
    const auto c = extension::einstein_divergence_coeffs(0.5, 0.1, 1);
    // (1.0025/0.9975 + 1.05/0.95 - 1) * 0.1
    CHECK(c.a_dr == doctest::Approx(0.1110275689).epsilon(1e-9));
    CHECK(c.a_RR == doctest::Approx(-0.01 / (0.9975 * 0.9975)));
    CHECK(c.a_b == doctest::Approx(0.1 / (0.95 * 0.95)));
    CHECK_THROWS_AS(extension::einstein_divergence_coeffs(2.0, 0.5, 1), PoleReached);
}

TEST_CASE("jet of the projection vanishes for n = 1, 2") {
    const GridSpec g3 = GridSpec::uniform(3, 12);
    const auto j1 = extension::solve_jet(MapField::projection(torus(2), g3), structure::flat_heisenberg(1, g3), 1);
    CHECK(j1.log_coeff.max_abs() == 0.0);
    const GridSpec g5 = GridSpec::uniform(5, 8);
    const auto j2 = extension::solve_jet(MapField::projection(torus(4), g5), structure::flat_heisenberg(2, g5), 2);
    CHECK(j2.coeffs.size() == 2);
    CHECK(j2.log_coeff.max_abs() == 0.0);
}

TEST_CASE("n = 1 log coefficient equals P1") {
    const GridSpec g = GridSpec::uniform(3, 16);
    const auto s = structure::flat_heisenberg(1, g);
    fields::Rng rng(8);
    const auto phi = fields::random_map(torus(2), g, rng, 0.5, true);
    const auto jet = extension::solve_jet(phi, s, 1);
    CHECK((jet.log_coeff - paneitz::p1(phi, s)).max_abs() < 1e-12 * (1 + jet.log_coeff.max_abs()));
    // phi_1 = -Delta_b phi.
    const target::PullbackSection values{phi.periodic};
    CHECK((jet.coeffs[0] + extension::sublaplacian(mapcalc::MapContext(phi, s), values)).max_abs() < 1e-9);
}

TEST_CASE("residual of the truncated extension scales like r^{n+2}") {
    const GridSpec g = GridSpec::uniform(3, 16);
    const auto s = structure::flat_heisenberg(1, g);
    fields::Rng rng(10);
    const auto phi = fields::random_map(torus(2), g, rng, 0.5, true);
    const auto jet = extension::solve_jet(phi, s, 1);
    const auto ratios = extension::residual_ratios(jet, phi, s, {1e-1, 1e-2, 1e-3});
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    CHECK(*hi / *lo < 10.0);
}

TEST_CASE("solve_jet rejects curved models") {
    const GridSpec g = GridSpec::uniform(3, 12);
    const GridScalar u = GridScalar::sample(g, [](std::span<const double> x) {
        return grid::Complex(0.1 * std::sin(2 * std::numbers::pi * x[0]), 0.0);
    });
    const auto s = structure::solve_structure(structure::conformal_rescale(structure::heisenberg(1, g), u));
    CHECK_THROWS_AS(extension::solve_jet(MapField::projection(torus(2), g), s, 1), NotFlatModel);
    const auto flat = structure::flat_heisenberg(1, g);
    const auto sph = std::make_shared<const TargetMetric>(TargetMetric::embedded_sphere_2());
    CHECK_THROWS_AS(extension::solve_jet(MapField::constant(sph, g, {0, 0, 1}), flat, 1), NotFlatModel);
    CHECK_THROWS_AS(extension::solve_jet(MapField::projection(torus(2), g), flat, 2), NotFlatModel);
}
