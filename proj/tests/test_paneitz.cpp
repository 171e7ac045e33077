#include "doctest.h"

#include <cmath>
#include <numbers>

#include "crlab/fields.hpp"
#include "crlab/paneitz.hpp"

using namespace crlab;
using grid::GridScalar;
using grid::GridSpec;
using target::MapField;
using target::TargetMetric;

namespace {

std::shared_ptr<const TargetMetric> torus(int m) { return std::make_shared<const TargetMetric>(TargetMetric::flat_torus(m)); }

GridScalar sin_sin(const GridSpec& g) {
    return GridScalar::sample(g, [](std::span<const double> x) {
        return grid::Complex(0.1 * std::sin(2 * std::numbers::pi * x[0]) * std::sin(2 * std::numbers::pi * x[1]), 0.0);
    });
}

} // namespace

TEST_CASE("constant maps have vanishing P1 and F1") {
    const GridSpec g = GridSpec::uniform(3, 12);
    const auto s = structure::solve_structure(structure::conformal_rescale(structure::heisenberg(1, g), sin_sin(g)));
    const auto phi = MapField::constant(torus(2), g, {0.3, 0.4});
    CHECK(paneitz::p1(phi, s).max_abs() == 0.0);
    CHECK(paneitz::f1(phi, s) == 0.0);
}

TEST_CASE("projection and identity") {
    const GridSpec g = GridSpec::uniform(3, 16);
    const auto s = structure::flat_heisenberg(1, g);
    const auto pi = MapField::projection(torus(2), g);
    CHECK(paneitz::p1(pi, s).max_abs() < 1e-10);
    CHECK(std::abs(paneitz::f1(pi, s)) < 1e-12);
    const auto w = std::make_shared<const TargetMetric>(TargetMetric::webster_heisenberg());
    CHECK(paneitz::f1(MapField::identity(w, g), s) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("holomorphic identity") {
    const GridSpec g = GridSpec::uniform(3, 12);
    const auto s = structure::flat_heisenberg(1, g);
    CHECK(paneitz::holomorphic_identity_check(MapField::projection(torus(2), g), s) < 1e-10);
    // (x + 0.1 sin(2 pi t), -y) is not CR-holomorphic: the identity fails.
    auto anti = MapField::projection(torus(2), g);
    anti.slope(1, 1) = -1.0;
    anti.periodic[0] += GridScalar::sample(g, [](std::span<const double> x) {
        return grid::Complex(0.1 * std::sin(2 * std::numbers::pi * x[2]), 0.0);
    });
    CHECK(paneitz::holomorphic_identity_check(anti, s) > 0.1);
    CHECK(paneitz::holomorphic_identity_check(MapField::constant(torus(2), g, {0.0, 0.0}), s) == 0.0);
    CHECK_THROWS_AS(paneitz::holomorphic_identity_check(MapField::constant(torus(3), g, {0, 0, 0}), s),
                    NoComplexStructure);
}

TEST_CASE("covariance with a vanishing P1") {
    const GridSpec g = GridSpec::uniform(3, 12);
    const auto pi = MapField::projection(torus(2), g);
    const auto cf = structure::heisenberg(1, g);
    CHECK_THROWS_AS(paneitz::covariance_check(pi, cf, GridScalar(g, 0.1), "0.1", false), ZeroDenominator);
    const auto r = paneitz::covariance_check(pi, cf, GridScalar(g, 0.1), "0.1");
    CHECK(r.absolute);
    CHECK(r.rel_error < 1e-10);
}

TEST_CASE("covariance for constant u is exact, and the exponent is -4u") {
    const GridSpec g = GridSpec::uniform(3, 16);
    fields::Rng rng(1);
    const auto phi = fields::random_map(torus(2), g, rng, 0.5);
    const auto cf = structure::heisenberg(1, g);
    const auto base = paneitz::p1(phi, structure::solve_structure(cf));
    std::vector<double> logs;
    for (double u : {0.1, 0.2, 0.3}) {
        CHECK(paneitz::covariance_check(phi, cf, GridScalar(g, u)).rel_error < 1e-12);
        const auto hat = paneitz::p1(phi, structure::solve_structure(structure::conformal_rescale(cf, GridScalar(g, u))));
        logs.push_back(std::log(hat.l2_norm() / base.l2_norm()));
    }
    CHECK((logs[2] - logs[0]) / 0.2 == doctest::Approx(-4.0).epsilon(1e-10));
}

TEST_CASE("invariance of F1") {
    const GridSpec g = GridSpec::uniform(3, 24);
    fields::Rng rng(2);
    const auto phi = fields::random_map(torus(2), g, rng, 0.5);
    CHECK(paneitz::invariance_check(phi, structure::heisenberg(1, g), sin_sin(g)) < 1e-10);
}

TEST_CASE("first variation of F1 is minus the P1 pairing") {
    const GridSpec g = GridSpec::uniform(3, 16);
    const auto s = structure::solve_structure(structure::conformal_rescale(structure::heisenberg(1, g), sin_sin(g)));
    fields::Rng rng(4);
    const auto phi = fields::random_map(torus(2), g, rng, 0.3);
    const auto v = fields::random_section(phi, rng) + target::PullbackSection{phi.periodic};
    const auto r = paneitz::gradient_report(phi, v, s);
    CHECK(std::abs(r.pairing) > 1.0);
    CHECK(r.mismatch(-1.0) < 1e-6 * (1 + std::abs(r.pairing)));
    // The stated constant 1/2 is not what the code computes.
    CHECK(paneitz::gradient_check(phi, v, s) > 1.0);
}

TEST_CASE("P1 is tangential for sphere maps") {
    const GridSpec g = GridSpec::uniform(3, 16);
    const auto s = structure::solve_structure(structure::conformal_rescale(structure::heisenberg(1, g), sin_sin(g)));
    fields::Rng rng(6);
    const auto phi = fields::random_map(std::make_shared<const TargetMetric>(TargetMetric::embedded_sphere_2()), g, rng, 0.3);
    CHECK(target::normal_defect(phi, paneitz::p1(phi, s)) < 1e-10);
}

TEST_CASE("energy density of the identity") {
    const GridSpec g = GridSpec::uniform(3, 8);
    const auto s = structure::flat_heisenberg(1, g);
    const auto w = std::make_shared<const TargetMetric>(TargetMetric::webster_heisenberg());
    const mapcalc::MapContext ctx(MapField::identity(w, g), s);
    const auto e = paneitz::energy_density(ctx);
    CHECK((e.reeb_sq - GridScalar(g, 1.0)).max_abs() < 1e-13);
    CHECK(e.tension_sq.max_abs() < 1e-13);
    CHECK(e.torsion_im.max_abs() < 1e-13);
}
