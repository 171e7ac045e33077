#include "doctest.h"

#include <cmath>
#include <string>

#include "crlab/config.hpp"
#include "crlab/experiment.hpp"
#include "crlab/paneitz.hpp"

using namespace crlab;
using config::Config;

TEST_CASE("typed values") {
    const Config c = Config::parse(R"ini(
# comment
[a]
s = "hi \"there\""   # trailing comment
d = -1.5e-3
i = 42
b = true
l = [1, 2, 3]
names = ["x", "y"]
empty = []
)ini");
    CHECK(c.get_string("a", "s") == "hi \"there\"");
    CHECK(c.get_double("a", "d") == -1.5e-3);
    CHECK(c.get_int("a", "i") == 42);
    CHECK(c.get_double("a", "i") == 42.0);
    CHECK(c.get_bool("a", "b"));
    CHECK(c.get_ints("a", "l") == std::vector<long>{1, 2, 3});
    CHECK(c.get_strings("a", "names") == std::vector<std::string>{"x", "y"});
    CHECK(c.get_doubles("a", "empty").empty());
    CHECK(c.get_int("a", "missing", 7) == 7);
    CHECK(c.has_section("a"));
    CHECK(!c.has("b", "s"));
    CHECK_THROWS_AS(c.get_int("a", "d"), ConfigError);
    CHECK_THROWS_AS(c.get_string("a", "i"), ConfigError);
    CHECK_THROWS_AS(c.get_string("a", "missing"), ConfigError);
}

TEST_CASE("syntax errors carry the location") {
    auto message = [](const std::string& text) {
        try {
            Config::parse(text, "f.ini");
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message("x = 1\n").find("f.ini:1:") == 0);
    CHECK(message("[a]\nx = 1\nx = 2\n").find("f.ini:3:") == 0);
    CHECK(message("[a]\nx = \"open\n").find("unterminated") != std::string::npos);
    CHECK(message("[a]\nx = 1 2\n").find("f.ini:2:") == 0);
    CHECK(message("[a]\nx = [1, 2\n") != "no error");
    CHECK(message("[a\n") != "no error");
}

TEST_CASE("shipped configurations build") {
    for (const char* name : {"default.ini", "identity_webster.ini", "sphere.ini", "heisenberg5.ini"}) {
        CAPTURE(name);
        const auto ex = experiment::build(Config::load(std::string(CRLAB_CONFIG_DIR) + "/" + name));
        CHECK(ex.map.dim() == ex.target->dim());
        CHECK_NOTHROW(ex.flow_config());
    }
}

TEST_CASE("identity into the Webster target has F1 = -1/2") {
    const auto ex = experiment::build(Config::load(std::string(CRLAB_CONFIG_DIR) + "/identity_webster.ini"));
    CHECK(paneitz::f1(ex.map, ex.structure()) == doctest::Approx(-0.5).epsilon(1e-8));
}

TEST_CASE("inconsistent experiments are configuration errors") {
    const std::string model = "[model]\nn = 1\npoints = 8\n";
    auto build = [&](const std::string& rest) { return experiment::build(Config::parse(model + rest)); };
    CHECK_THROWS_AS(build("[target]\nvariant = \"flat_torus\"\ndim = 3\n[map]\ncomponents = [\"x\", \"y\"]\n"),
                    ConfigError);
    CHECK_THROWS_AS(build("[target]\nvariant = \"flat_torus\"\ndim = 3\n[map]\nbuiltin = \"projection\"\n"),
                    ConfigError);
    CHECK_THROWS_AS(build("[target]\nvariant = \"klein\"\n[map]\nbuiltin = \"constant\"\n"), ConfigError);
    CHECK_THROWS_AS(build("[target]\nvariant = \"flat_torus\"\ndim = 1\n[map]\ncomponents = [\"q\"]\n"), ConfigError);
    CHECK_THROWS_AS(build("[target]\nvariant = \"flat_torus\"\ndim = 1\n[map]\ncomponents = [\"sin(\"]\n"), ConfigError);
    CHECK_THROWS_AS(experiment::build(Config::parse("[model]\nn = 1\ndims = [8, 8]\n[target]\nvariant = \"sphere\"\n"
                                                    "[map]\nbuiltin = \"constant\"\n")),
                    ConfigError);
    CHECK_NOTHROW(build("[target]\nvariant = \"sphere\"\n[map]\nbuiltin = \"constant\"\n"));
}

TEST_CASE("overrides") {
    const Config c = Config::parse("[model]\npoints = 8\n[target]\nvariant = \"flat_torus\"\ndim = 2\n"
                                   "[map]\nrandom = true\n");
    experiment::Overrides o;
    o.scheme = grid::Scheme::fd4;
    o.refine = 2;
    o.seed = 5;
    const auto ex = experiment::build(c, o);
    CHECK(ex.grid.scheme == grid::Scheme::fd4);
    CHECK(ex.grid.dims == std::vector<int>{16, 16, 16});
    const auto again = experiment::build(c, o);
    CHECK((ex.map.periodic[0] - again.map.periodic[0]).max_abs() == 0.0);
    o.seed = 6;
    CHECK((ex.map.periodic[0] - experiment::build(c, o).map.periodic[0]).max_abs() > 0.0);
}

TEST_CASE("chart targets from metric expressions") {
    const Config c = Config::parse(R"ini(
[model]
points = 8
[target]
variant = "chart"
dim = 2
metric = ["1 + x^2", "0", "0", "1"]
[map]
components = ["0.1*sin(2*pi*x)", "0.1*cos(2*pi*y)"]
)ini");
    const auto ex = experiment::build(c);
    const std::vector<double> p{0.5, 0.0};
    CHECK(ex.target->metric(p)(0, 0) == doctest::Approx(1.25));
    // Gamma^0_00 = g_00,0 / (2 g_00) = x / (1 + x^2).
    CHECK(ex.target->christoffel(p)[0] == doctest::Approx(0.4).epsilon(1e-6));
}
