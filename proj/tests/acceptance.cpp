// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance          all criteria
//   acceptance ID...    the listed criteria

#include <cstdio>
#include <cstdlib>
#include <exception>

#include "crlab/suite.hpp"

namespace {

bool report(int id) {
    using namespace crlab::suite;
    try {
        const Criterion c = run_criterion(id);
        std::printf("%s %2d %s: measured %.6e, tolerance %.1e\n", c.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    c.measured, c.tolerance);
        std::printf("     %s\n", c.detail.c_str());
        return c.pass;
    } catch (const std::exception& e) {
        std::printf("FAIL %2d error: %s\n", id, e.what());
        return false;
    }
}

} // namespace

int main(int argc, char** argv) {
    bool ok = true;
    if (argc == 1) {
        for (int id = 1; id <= crlab::suite::criterion_count; ++id) ok = report(id) && ok;
    } else {
        for (int k = 1; k < argc; ++k) ok = report(std::atoi(argv[k])) && ok;
    }
    std::fflush(stdout);
    return ok ? 0 : 1;
}
