#include "doctest.h"

#include "crlab/fields.hpp"
#include "crlab/flow.hpp"

using namespace crlab;
using grid::GridSpec;
using target::MapField;
using target::TargetMetric;

namespace {

std::shared_ptr<const TargetMetric> torus(int m) { return std::make_shared<const TargetMetric>(TargetMetric::flat_torus(m)); }

MapField perturbed_projection(const GridSpec& g, std::uint64_t seed) {
    MapField phi = MapField::projection(torus(2), g);
    fields::Rng rng(seed);
    for (auto& c : phi.periodic) c += fields::random_trig(g, rng, 2, 3, 0.03);
    return phi;
}

bool non_increasing(const flow::FlowTrace& t, double flow::FlowRecord::*field) {
    for (std::size_t k = 1; k < t.records.size(); ++k)
        if (t.records[k].*field > t.records[k - 1].*field) return false;
    return true;
}

} // namespace

TEST_CASE("flow config validation") {
    flow::FlowConfig c;
    CHECK_NOTHROW(c.validate());
    c.step = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.max_steps = -1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.stop_tol = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("preconditioned F1 descent from a perturbed projection") {
    const GridSpec g = GridSpec::uniform(3, 16);
    const auto s = structure::flat_heisenberg(1, g);
    flow::FlowConfig c;
    c.preconditioner = true;
    c.max_steps = 50;
    const auto r = flow::gradient_flow(perturbed_projection(g, 1), s, c);
    CHECK(r.trace.converged);
    CHECK(non_increasing(r.trace, &flow::FlowRecord::f1));
    CHECK(r.trace.records.back().p1_norm < 1e-8);
    CHECK(r.trace.records.front().step == 0.0);
}

TEST_CASE("plain descent decreases F1") {
    const GridSpec g = GridSpec::uniform(3, 16);
    const auto s = structure::flat_heisenberg(1, g);
    flow::FlowConfig c;
    c.max_steps = 5;
    const auto r = flow::gradient_flow(perturbed_projection(g, 2), s, c);
    CHECK(r.trace.records.size() == 6);
    CHECK(non_increasing(r.trace, &flow::FlowRecord::f1));
    CHECK(r.trace.records.back().f1 < r.trace.records.front().f1);
}

TEST_CASE("subharmonic flow reduces the tension and keeps sphere maps on the sphere") {
    const GridSpec g = GridSpec::uniform(3, 16);
    const auto s = structure::flat_heisenberg(1, g);
    flow::FlowConfig c;
    c.preconditioner = true;
    c.max_steps = 20;
    c.stop_tol = 1e-6;
    const auto r = flow::subharmonic_flow(perturbed_projection(g, 3), s, c);
    CHECK(r.trace.records.back().tension_norm < 1e-6);

    const auto sph = std::make_shared<const TargetMetric>(TargetMetric::embedded_sphere_2());
    fields::Rng rng(4);
    const auto phi = fields::random_map(sph, g, rng, 0.2);
    c.max_steps = 5;
    const auto q = flow::subharmonic_flow(phi, s, c);
    CHECK(q.map.sphere_defect() < 1e-12);
    CHECK(q.trace.records.back().tension_norm < q.trace.records.front().tension_norm);
}
