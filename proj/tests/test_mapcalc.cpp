#include "doctest.h"

#include <cmath>
#include <numbers>

#include "crlab/fields.hpp"
#include "crlab/mapcalc.hpp"

using namespace crlab;
using grid::GridScalar;
using grid::GridSpec;

namespace {

structure::PseudohermitianData torsionful(const GridSpec& g) {
    const GridScalar u = GridScalar::sample(g, [](std::span<const double> x) {
        return grid::Complex(0.1 * std::sin(2 * std::numbers::pi * x[0]) * std::sin(2 * std::numbers::pi * x[1]), 0.0);
    });
    return structure::solve_structure(structure::conformal_rescale(structure::heisenberg(1, g), u));
}

std::shared_ptr<const target::TargetMetric> torus(int m) {
    return std::make_shared<const target::TargetMetric>(target::TargetMetric::flat_torus(m));
}

} // namespace

TEST_CASE("delta_b is the adjoint of the horizontal connection") {
    const GridSpec g = GridSpec::uniform(3, 24);
    const auto s = torsionful(g);
    fields::Rng rng(11);
    for (auto tgt : {torus(2), std::make_shared<const target::TargetMetric>(target::TargetMetric::embedded_sphere_2())}) {
        const auto phi = fields::random_map(tgt, g, rng, 0.3);
        const mapcalc::MapContext ctx(phi, s);
        const auto sec = fields::random_section(phi, rng, 1.0);
        const auto w = ctx.tangent();
        const double lhs = grid::integrate(target::pair(phi, sec, mapcalc::divergence_b(w, ctx)), s.vol_density).real();
        const double rhs = grid::integrate(mapcalc::pair_forms(ctx.nabla(sec), w, phi), s.vol_density).real();
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
}

TEST_CASE("tension of the projection vanishes and tension is real") {
    const GridSpec g = GridSpec::uniform(3, 16);
    const auto s = torsionful(g);
    CHECK(mapcalc::tension_b(target::MapField::projection(torus(2), g), structure::flat_heisenberg(1, g)).max_abs() <
          1e-12);
    fields::Rng rng(3);
    const auto phi = fields::random_map(torus(2), g, rng, 0.5);
    const auto tension = mapcalc::tension_b(phi, s);
    CHECK(tension.max_abs() > 1e-3);
    CHECK(tension.im().max_abs() < 1e-10);
}

TEST_CASE("conjugation swaps the T and Tbar slots") {
    const GridSpec g = GridSpec::uniform(3, 16);
    const auto s = torsionful(g);
    fields::Rng rng(5);
    const auto phi = fields::random_map(torus(2), g, rng, 0.5);
    const mapcalc::MapContext ctx(phi, s);
    CHECK((ctx.tangent().on_T[0].conj() - ctx.tangent().on_Tbar[0]).max_abs() < 1e-13);
    CHECK(ctx.reeb().im().max_abs() < 1e-13);
}

TEST_CASE("divergence rejects forms of the wrong shape") {
    const GridSpec g = GridSpec::uniform(3, 8);
    const auto s = structure::flat_heisenberg(1, g);
    const auto phi = target::MapField::projection(torus(2), g);
    mapcalc::FrameForm w;
    w.on_T.push_back(target::PullbackSection::zero(g, 3));
    w.on_Tbar.push_back(target::PullbackSection::zero(g, 3));
    CHECK_THROWS_AS(mapcalc::divergence_b(w, phi, s), FrameMismatch);
}

TEST_CASE("S_b vanishes on flat targets and is tangential on the sphere") {
    const GridSpec g = GridSpec::uniform(3, 16);
    const auto s = torsionful(g);
    fields::Rng rng(9);
    const auto phi = fields::random_map(torus(2), g, rng, 0.5);
    const auto x = fields::random_section(phi, rng);
    CHECK(mapcalc::s_b(x, phi, s).max_abs() == 0.0);
    const auto sph = std::make_shared<const target::TargetMetric>(target::TargetMetric::embedded_sphere_2());
    const auto psi = fields::random_map(sph, g, rng, 0.3);
    const auto y = fields::random_section(psi, rng);
    CHECK(target::normal_defect(psi, mapcalc::s_b(y, psi, s)) < 1e-12);
}
