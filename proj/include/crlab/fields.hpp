#pragma once

// Seeded trigonometric test fields.

#include <cstdint>
#include <random>

#include "crlab/target.hpp"

namespace crlab::fields {

using Rng = std::mt19937_64;

/// sum over `terms` random wave vectors k (|k_a| <= max_mode, k_t = 0 unless
/// t_dependent) of a cos(2 pi k.x) + b sin(2 pi k.x), a, b uniform in
/// [-amplitude, amplitude]. Real valued.
grid::GridScalar random_trig(const grid::GridSpec& spec, Rng& rng, int max_mode = 2, int terms = 4,
                             double amplitude = 1.0, bool t_dependent = false);

/// Unit vector field (cos b cos a, cos b sin a, sin b) from two angle fields.
std::vector<grid::GridScalar> sphere_from_angles(const grid::GridScalar& a, const grid::GridScalar& b);

/// Random smooth map into the target: trig components for flat tori and
/// charts, trig angles for the sphere.
target::MapField random_map(std::shared_ptr<const target::TargetMetric> target, const grid::GridSpec& spec, Rng& rng,
                            double amplitude = 0.5, bool t_dependent = false);

/// Random real section along phi, tangential for the sphere.
target::PullbackSection random_section(const target::MapField& phi, Rng& rng, double amplitude = 1.0,
                                       bool t_dependent = false);

} // namespace crlab::fields
