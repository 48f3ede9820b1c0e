#include <doctest.h>

#include "arw/configuration.hpp"
#include "arw/jump_kernel.hpp"
#include "arw/snapshot.hpp"

using namespace arw;

TEST_CASE("kernel validation") {
    using Entry = JumpKernel::Entry;

    SUBCASE("symmetric nearest neighbor generates Z") {
        CHECK(JumpKernel::validate(1, {{{+1}, 0.5}, {{-1}, 0.5}}) == std::nullopt);
    }
    SUBCASE("even steps generate the sublattice 2Z") {
        const auto issue = JumpKernel::validate(1, {{{+2}, 0.5}, {{-2}, 0.5}});
        REQUIRE(issue.has_value());
        CHECK(issue->find("sublattice") != std::string::npos);
    }
    SUBCASE("standard basis in d=2") {
        std::vector<Entry> entries = {
            {{+1, 0}, 0.25}, {{-1, 0}, 0.25}, {{0, +1}, 0.25}, {{0, -1}, 0.25}};
        CHECK(JumpKernel::validate(2, entries) == std::nullopt);
    }
    SUBCASE("diagonal moves in d=2 miss the odd sublattice") {
        std::vector<Entry> entries = {
            {{+1, +1}, 0.25}, {{-1, -1}, 0.25}, {{+1, -1}, 0.25}, {{-1, +1}, 0.25}};
        const auto issue = JumpKernel::validate(2, entries);
        REQUIRE(issue.has_value());
        CHECK(issue->find("index 2") != std::string::npos);
    }
    SUBCASE("rank-deficient support") {
        std::vector<Entry> entries = {{{+1, 0}, 0.5}, {{-1, 0}, 0.5}};
        const auto issue = JumpKernel::validate(2, entries);
        REQUIRE(issue.has_value());
        CHECK(issue->find("rank") != std::string::npos);
    }
    SUBCASE("bad probabilities are reported") {
        CHECK(JumpKernel::validate(1, {{{+1}, 0.5}, {{-1}, 0.6}}).has_value());
        CHECK(JumpKernel::validate(1, {{{+1}, 1.0}, {{-1}, 0.0}}).has_value());
        CHECK(JumpKernel::validate(1, {}).has_value());
        CHECK(JumpKernel::validate(1, {{{0}, 1.0}}).has_value());
    }
    SUBCASE("asymmetric supports that still generate") {
        // {+2, -1}: gcd 1, so the walk generates all of Z.
        CHECK(JumpKernel::validate(1, {{{+2}, 0.5}, {{-1}, 0.5}}) == std::nullopt);
        CHECK(JumpKernel::validate(1, {{{+3}, 0.5}, {{-6}, 0.5}}).has_value());
    }
    SUBCASE("rescaling invariance of acceptance") {
        // Scaling all probabilities by a common factor and renormalizing
        // does not change the verdict.
        std::vector<Entry> base = {{{+1}, 0.25}, {{-1}, 0.75}};
        std::vector<Entry> scaled = base;
        for (auto& e : scaled) e.prob = e.prob * 3.0 / 3.0;
        CHECK(JumpKernel::validate(1, base) == JumpKernel::validate(1, scaled));
    }
}

TEST_CASE("resolve_jump wraps or exits") {
    Domain torus({4}, Boundary::Torus);
    Domain box({4}, Boundary::Absorbing);
    const std::vector<std::int32_t> plus{+1};

    CHECK(torus.resolve_jump(3, plus) == 0);
    CHECK(box.resolve_jump(3, plus) == std::nullopt);
    CHECK(box.resolve_jump(1, plus) == 2);

    Domain torus2({4, 3}, Boundary::Torus);
    const std::vector<std::int32_t> step{-1, +2};
    // site (0, 2) -> (-1, 4) wraps to (3, 1)
    const std::int64_t start = torus2.index_of(std::vector<std::int32_t>{0, 2});
    const std::int64_t target = torus2.index_of(std::vector<std::int32_t>{3, 1});
    CHECK(torus2.resolve_jump(start, step) == target);
}

TEST_CASE("configuration caches stay consistent") {
    Configuration config(Domain({5}, Boundary::Torus));
    config.set_state(0, SiteState::active(5));
    CHECK(config.particle_total() == 5);
    CHECK(config.density() == doctest::Approx(1.0));
    config.set_state(0, SiteState::active(2));
    config.set_state(3, SiteState::sleeping());
    CHECK(config.particle_total() == 3);
    CHECK(config.active_total() == 2);
    CHECK(config.totals_consistent());
}

TEST_CASE("snapshot round trip") {
    Configuration config(Domain({4, 2}, Boundary::Absorbing));
    config.set_state(0, SiteState::active(2));
    config.set_state(5, SiteState::sleeping());
    config.set_state(7, SiteState::active(11));

    const std::string text = snapshot_dump(config);
    CHECK(text.rfind("arw d=2 L=4,2 boundary=absorbing\n", 0) == 0);
    const Configuration parsed = snapshot_parse(text);
    CHECK(parsed == config);

    CHECK_THROWS(snapshot_parse("arw d=1 L=4 boundary=torus\n0 s"));
    CHECK_THROWS(snapshot_parse("arw d=1 L=2 boundary=torus\n0 -3"));
    CHECK_THROWS(snapshot_parse("arw d=1 L=2 boundary=torus\n0 s 1"));
}
