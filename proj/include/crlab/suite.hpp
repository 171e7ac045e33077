#pragma once

// The acceptance checks, each reduced to one measured number against a
// tolerance.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace crlab::suite {

struct Criterion {
    int id = 0;
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
    /// Named sub-measurements, reported alongside the main value.
    std::vector<std::pair<std::string, double>> values;
};

struct Options {
    std::uint64_t seed = 20240601;
};

constexpr int criterion_count = 12;

Criterion run_criterion(int id, const Options& options = {});
std::vector<Criterion> run_all(const Options& options = {});

} // namespace crlab::suite
