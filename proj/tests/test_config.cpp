#include <doctest.h>

#include "arw/config.hpp"

using namespace arw;

namespace {

const char* kMinimal = R"(# a drive run
[run]
kind = drive
seed = 42

[domain]
dim = 1
size = 256
boundary = absorbing

[model]
lambda = 1.0
kernel = nn

[drive]
u_grid = 0.05:1.2:0.05
replicas = 20
)";

}  // namespace

TEST_CASE("a minimal valid config parses") {
    const RunConfig config = parse_config(kMinimal);
    CHECK(config.kind == "drive");
    CHECK(config.seed == 42);
    CHECK(config.sides == std::vector<std::int32_t>{256});
    CHECK(config.boundary == Boundary::Absorbing);
    CHECK(config.lambda == 1.0);
    CHECK(config.u_grid.size() == 24);
    CHECK(config.drive_replicas == 20);
}

TEST_CASE("range violations name the key") {
    const char* bad = "[model]\nlambda = -1\n";
    try {
        parse_config(bad);
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("lambda") != std::string::npos);
        CHECK(e.line() == 2);
    }
}

TEST_CASE("unknown keys suggest the nearest known one") {
    const char* typo = "[model]\nlamda = 1.0\n";
    try {
        parse_config(typo);
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        const std::string message = e.what();
        CHECK(message.find("unknown key 'lamda'") != std::string::npos);
        CHECK(message.find("did you mean 'lambda'") != std::string::npos);
    }
}

TEST_CASE("unknown sections suggest the nearest known one") {
    try {
        parse_config("[domian]\ndim = 1\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("did you mean 'domain'") != std::string::npos);
    }
}

TEST_CASE("keys outside sections and malformed lines fail with positions") {
    CHECK_THROWS_AS(parse_config("kind = drive\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\nnot a pair\n"), ConfigError);
}

TEST_CASE("grids parse as ranges and lists") {
    const std::vector<double> range = parse_grid("0.1:0.3:0.1");
    REQUIRE(range.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(range[i] == doctest::Approx(0.1 * (1 + static_cast<double>(i))));
    CHECK(parse_grid("0.5, 1.0, 1.5") == std::vector<double>{0.5, 1.0, 1.5});
    CHECK_THROWS(parse_grid("0.1:0.3:-0.1"));
}

TEST_CASE("dim expands a single side to every axis") {
    const RunConfig config = parse_config("[domain]\ndim = 2\nsize = 8\n");
    CHECK(config.sides == std::vector<std::int32_t>{8, 8});
    CHECK_THROWS_AS(parse_config("[domain]\ndim = 3\nsize = 4,4\n"), ConfigError);
}

TEST_CASE("experiment kinds are validated with suggestions") {
    try {
        parse_config("[run]\nkind = drvie\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("did you mean 'drive'") != std::string::npos);
    }
}
