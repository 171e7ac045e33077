#pragma once

// Builds models, targets and maps from a configuration file.

#include <cstdint>
#include <optional>
#include <string>

#include "crlab/config.hpp"
#include "crlab/flow.hpp"

namespace crlab::experiment {

struct Overrides {
    std::optional<grid::Scheme> scheme;
    int refine = 1;  ///< multiplies every grid dimension
    std::optional<std::uint64_t> seed;
};

struct Experiment {
    config::Config cfg;
    grid::GridSpec grid;
    int n = 1;
    structure::ContactCoframe base;
    std::optional<grid::GridScalar> u;  ///< conformal factor, if any
    std::string u_text;
    std::shared_ptr<const target::TargetMetric> target;
    target::MapField map;
    std::uint64_t seed = 0;

    /// base rescaled by u when a conformal factor is configured.
    structure::ContactCoframe coframe() const;
    /// Structure of coframe(); flat_heisenberg for n >= 2.
    structure::PseudohermitianData structure() const;
    /// [check] velocity: expressions, or a seeded random section.
    target::PullbackSection velocity() const;
    flow::FlowConfig flow_config() const;
};

/// Throws ConfigError for inconsistent settings (grid rank vs n, map vs
/// target dimension, unknown names); expression errors are rethrown as
/// ConfigError with the offending key.
Experiment build(const config::Config& cfg, const Overrides& overrides = {});

/// The flat test map named by builtin: projection, identity or constant.
target::MapField builtin_map(const std::string& name, std::shared_ptr<const target::TargetMetric> target,
                             const grid::GridSpec& grid, const std::vector<double>& point = {});

} // namespace crlab::experiment
