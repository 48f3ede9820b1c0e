#include <doctest.h>

#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "arw/initial_states.hpp"
#include "arw/toppling.hpp"

using namespace arw;

namespace {

InstructionField nn_field(std::uint64_t seed, double lambda, const Domain& domain) {
    return InstructionField(seed, lambda, JumpKernel::nearest_neighbor(domain.dim()), domain);
}

// Smallest seed whose field satisfies `wanted` (used to pin hand-traced
// instruction prefixes without bypassing the real machinery).
template <typename Pred>
std::uint64_t find_seed(const Pred& wanted) {
    for (std::uint64_t seed = 1; seed < 20'000; ++seed)
        if (wanted(seed)) return seed;
    REQUIRE_MESSAGE(false, "no seed under 20000 matches the wanted stream prefix");
    return 0;
}

std::string state_key(const Configuration& config, const Odometer& odometer) {
    std::ostringstream out;
    for (std::int64_t s = 0; s < config.site_count(); ++s)
        out << config.state(s).token() << ':' << odometer.count(s) << ';';
    return out.str();
}

// Exhaustive oracle: explore every legal toppling order (memoized on the
// reached states) and collect the terminal states.
struct Exploration {
    std::set<std::string> terminals;
    std::optional<Configuration> terminal_config;
    std::optional<Odometer> terminal_odometer;
    std::size_t visited = 0;
    bool overflowed = false;
};

void explore(const Configuration& config, const Odometer& odometer,
             const InstructionField& field, std::set<std::string>& seen,
             Exploration& result, std::size_t state_cap) {
    if (result.overflowed) return;
    if (!seen.insert(state_key(config, odometer)).second) return;
    if (++result.visited > state_cap) {
        result.overflowed = true;
        return;
    }
    bool any_legal = false;
    for (std::int64_t site = 0; site < config.site_count(); ++site) {
        if (!is_legal(config, site)) continue;
        any_legal = true;
        Configuration next = config;
        Odometer next_odometer = odometer;
        topple(next, next_odometer, field, site);
        explore(next, next_odometer, field, seen, result, state_cap);
    }
    if (!any_legal) {
        result.terminals.insert(state_key(config, odometer));
        if (!result.terminal_config) {
            result.terminal_config = config;
            result.terminal_odometer = odometer;
        }
    }
}

}  // namespace

TEST_CASE("legal and acceptable predicates") {
    Configuration config(Domain({3}, Boundary::Torus));
    config.set_state(0, SiteState::active(2));
    config.set_state(1, SiteState::sleeping());
    CHECK(is_legal(config, 0));
    CHECK(is_acceptable(config, 0));
    CHECK(!is_legal(config, 1));
    CHECK(is_acceptable(config, 1));
    CHECK(!is_legal(config, 2));
    CHECK(!is_acceptable(config, 2));
}

TEST_CASE("topple applies the next instruction") {
    const Domain domain({4}, Boundary::Torus);

    SUBCASE("jump moves one particle to the right neighbor") {
        const std::uint64_t seed = find_seed([&](std::uint64_t s) {
            const InstructionField f = nn_field(s, 1.0, domain);
            const Instruction i = f.instruction_at(0, 1);
            return !i.is_sleep() && f.offset_of(i)[0] == +1;
        });
        const InstructionField field = nn_field(seed, 1.0, domain);
        Configuration config(domain);
        config.set_state(0, SiteState::active(2));
        Odometer odometer(domain);
        const auto effect = topple(config, odometer, field, 0);
        REQUIRE(effect.has_value());
        CHECK(effect->kind == ToppleEffect::Kind::Moved);
        CHECK(effect->target == 1);
        CHECK(config.state(0) == SiteState::active(1));
        CHECK(config.state(1) == SiteState::active(1));
        CHECK(odometer.count(0) == 1);
    }

    SUBCASE("acceptable toppling wakes and moves a sleeping particle") {
        const std::uint64_t seed = find_seed([&](std::uint64_t s) {
            const InstructionField f = nn_field(s, 1.0, domain);
            const Instruction i = f.instruction_at(2, 1);
            return !i.is_sleep() && f.offset_of(i)[0] == +1;
        });
        const InstructionField field = nn_field(seed, 1.0, domain);
        Configuration config(domain);
        config.set_state(2, SiteState::sleeping());
        Odometer odometer(domain);
        const auto effect = topple(config, odometer, field, 2);
        REQUIRE(effect.has_value());
        CHECK(!effect->was_legal);
        CHECK(config.state(2) == SiteState::empty());
        CHECK(config.state(3) == SiteState::active(1));
    }

    SUBCASE("sleep instruction puts a lone particle to sleep") {
        const std::uint64_t seed = find_seed([&](std::uint64_t s) {
            return nn_field(s, 1.0, domain).instruction_at(1, 1).is_sleep();
        });
        const InstructionField field = nn_field(seed, 1.0, domain);
        Configuration config(domain);
        config.set_state(1, SiteState::active(1));
        Odometer odometer(domain);
        const auto effect = topple(config, odometer, field, 1);
        REQUIRE(effect.has_value());
        CHECK(effect->kind == ToppleEffect::Kind::Slept);
        CHECK(config.state(1) == SiteState::sleeping());
    }

    SUBCASE("toppling an empty site is rejected without side effects") {
        const InstructionField field = nn_field(1, 1.0, domain);
        Configuration config(domain);
        Odometer odometer(domain);
        CHECK(!topple(config, odometer, field, 0).has_value());
        CHECK(odometer.count(0) == 0);
        CHECK(config.particle_total() == 0);
    }
}

TEST_CASE("stabilize in a sub-volume") {
    const Domain domain({4}, Boundary::Torus);

    SUBCASE("two scripted topplings: jump then sleep") {
        const std::uint64_t seed = find_seed([&](std::uint64_t s) {
            const InstructionField f = nn_field(s, 1.0, domain);
            const Instruction first = f.instruction_at(0, 1);
            return !first.is_sleep() && f.offset_of(first)[0] == +1 &&
                   f.instruction_at(0, 2).is_sleep();
        });
        const InstructionField field = nn_field(seed, 1.0, domain);
        Configuration config(domain);
        config.set_state(0, SiteState::active(2));
        Odometer odometer(domain);
        const std::vector<std::int64_t> volume{0};
        const StabilizeReport report = stabilize(config, odometer, field, &volume);
        CHECK(report.stable());
        CHECK(report.topplings == 2);
        CHECK(odometer.count(0) == 2);
        CHECK(config.state(0) == SiteState::sleeping());
        // The particle sent to site 1 sits outside the volume, untoppled.
        CHECK(config.state(1) == SiteState::active(1));
        CHECK(odometer.count(1) == 0);
    }

    SUBCASE("already-stable volumes need no topplings") {
        const InstructionField field = nn_field(3, 1.0, domain);
        Configuration config(domain);
        config.set_state(1, SiteState::sleeping());
        Odometer odometer(domain);
        const StabilizeReport report = stabilize(config, odometer, field, nullptr);
        CHECK(report.stable());
        CHECK(report.topplings == 0);
    }
}

TEST_CASE("every legal toppling order reaches the same terminal state") {
    // Exhaustive small-case oracle, then the four schedulers against it.
    const Scheduler schedulers[4] = {Scheduler::Fifo, Scheduler::RasterSweep,
                                     Scheduler::RandomUnstable, Scheduler::Wavefront};
    int instances_explored = 0;
    for (std::uint64_t seed = 1; seed <= 40 && instances_explored < 12; ++seed) {
        const Domain domain({4}, Boundary::Torus);
        const double lambda = seed % 3 == 0 ? 0.5 : (seed % 3 == 1 ? 1.0 : 10.0);
        InitialStateSpec spec;
        spec.zeta = 0.6;
        spec.seed = seed * 31;
        Configuration initial = generate(spec, domain);
        if (initial.particle_total() < 1 || initial.particle_total() > 3) continue;
        const InstructionField field = nn_field(seed * 1001 + 7, lambda, domain);

        Exploration result;
        std::set<std::string> seen;
        explore(initial, Odometer(domain), field, seen, result, 300'000);
        if (result.overflowed) continue;
        ++instances_explored;
        CAPTURE(seed);
        CHECK(result.terminals.size() == 1);

        for (const Scheduler s : schedulers) {
            Configuration config = initial;
            Odometer odometer(domain);
            StabilizeOptions options;
            options.scheduler = s;
            options.scheduler_seed = seed;
            REQUIRE(stabilize(config, odometer, field, nullptr, options).stable());
            CHECK(config == *result.terminal_config);
            CHECK(odometer == *result.terminal_odometer);
        }
    }
    CHECK(instances_explored >= 10);
}

TEST_CASE("apply_sequence flags and aborts") {
    const Domain domain({4}, Boundary::Torus);
    const InstructionField field = nn_field(11, 1.0, domain);

    SUBCASE("empty sequence leaves everything unchanged") {
        Configuration config(domain);
        config.set_state(0, SiteState::active(1));
        Odometer odometer(domain);
        const SequenceResult result =
            apply_sequence(config, odometer, field, std::vector<std::int64_t>{});
        CHECK(result.acceptable());
        CHECK(config.state(0) == SiteState::active(1));
    }

    SUBCASE("an empty-site toppling aborts with its index") {
        Configuration config(domain);
        config.set_state(0, SiteState::active(2));
        Odometer odometer(domain);
        const std::vector<std::int64_t> alpha{0, 3, 0};  // site 3 is empty
        const SequenceResult result = apply_sequence(config, odometer, field, alpha);
        REQUIRE(result.abort_index.has_value());
        CHECK(*result.abort_index == 1);
        CHECK(result.steps.size() == 2);
        CHECK(odometer.count(0) == 1);  // only the first step ran
    }

    SUBCASE("two legal stabilizing orders with equal counts agree") {
        InitialStateSpec spec;
        spec.zeta = 0.5;
        spec.seed = 5;
        const Configuration initial = generate(spec, domain);
        StabilizeOptions record;
        record.record_order = true;

        Configuration via_fifo = initial;
        Odometer odo_fifo(domain);
        const StabilizeReport fifo = stabilize(via_fifo, odo_fifo, field, nullptr, record);

        record.scheduler = Scheduler::RasterSweep;
        Configuration via_raster = initial;
        Odometer odo_raster(domain);
        const StabilizeReport raster =
            stabilize(via_raster, odo_raster, field, nullptr, record);

        // Same per-site multiset (global abelianness) applied as explicit
        // sequences: identical final states (local abelianness).
        std::map<std::int64_t, int> counts_a, counts_b;
        for (std::int64_t s : fifo.order) ++counts_a[s];
        for (std::int64_t s : raster.order) ++counts_b[s];
        REQUIRE(counts_a == counts_b);

        Configuration replay_a = initial;
        Odometer odometer_a(domain);
        REQUIRE(apply_sequence(replay_a, odometer_a, field, fifo.order).acceptable());
        Configuration replay_b = initial;
        Odometer odometer_b(domain);
        REQUIRE(apply_sequence(replay_b, odometer_b, field, raster.order).acceptable());
        CHECK(replay_a == replay_b);
        CHECK(odometer_a == odometer_b);
    }
}

TEST_CASE("least action verdicts") {
    const Domain domain({6}, Boundary::Torus);
    const InstructionField field = nn_field(21, 1.0, domain);
    InitialStateSpec spec;
    spec.zeta = 0.5;
    spec.seed = 77;
    const Configuration initial = generate(spec, domain);

    SUBCASE("the canonical legal order attains the bound with equality") {
        Configuration work = initial;
        Odometer odometer(domain);
        StabilizeOptions record;
        record.record_order = true;
        const StabilizeReport report = stabilize(work, odometer, field, nullptr, record);
        REQUIRE(report.stable());
        const LeastActionVerdict verdict =
            check_least_action(initial, field, nullptr, report.order);
        CHECK(verdict.result == LeastActionVerdict::Result::Pass);
    }

    SUBCASE("a non-stabilizing sequence fails") {
        Configuration one(domain);
        one.set_state(2, SiteState::active(1));
        const LeastActionVerdict verdict =
            check_least_action(one, field, nullptr, std::vector<std::int64_t>{});
        CHECK(verdict.result == LeastActionVerdict::Result::Fail);
    }

    SUBCASE("a non-acceptable sequence is invalid input") {
        const LeastActionVerdict verdict = check_least_action(
            initial, field, nullptr, std::vector<std::int64_t>{5, 5, 5, 5, 5, 5, 5, 5});
        CHECK(verdict.result == LeastActionVerdict::Result::InvalidInput);
    }
}

TEST_CASE("send/receive balance and per-site flow conservation on the torus") {
    const Domain domain({8}, Boundary::Torus);
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const InstructionField field = nn_field(seed * 13 + 1, 1.0, domain);
        InitialStateSpec spec;
        spec.zeta = 0.7;
        spec.seed = seed;
        const Configuration initial = generate(spec, domain);

        Configuration work = initial;
        Odometer odometer(domain);
        StabilizeOptions record;
        record.record_order = true;
        const StabilizeReport report = stabilize(work, odometer, field, nullptr, record);
        REQUIRE(report.stable());

        // Replay the recorded order, tallying jump flows.
        Configuration replay = initial;
        Odometer replay_odometer(domain);
        std::vector<std::int64_t> departures(8, 0), arrivals(8, 0);
        for (std::int64_t site : report.order) {
            const auto effect = topple(replay, replay_odometer, field, site);
            REQUIRE(effect.has_value());
            if (effect->kind == ToppleEffect::Kind::Moved) {
                ++departures[static_cast<std::size_t>(site)];
                ++arrivals[static_cast<std::size_t>(effect->target)];
            }
        }
        std::int64_t sent = 0, received = 0;
        for (std::int64_t s = 0; s < 8; ++s) {
            sent += departures[static_cast<std::size_t>(s)];
            received += arrivals[static_cast<std::size_t>(s)];
            CHECK(replay.state(s).particles() ==
                  initial.state(s).particles() + arrivals[static_cast<std::size_t>(s)] -
                      departures[static_cast<std::size_t>(s)]);
        }
        CHECK(sent == received);
        CHECK(replay.particle_total() == initial.particle_total());
        // after stabilization every site is empty or sleeping
        for (std::int64_t s = 0; s < 8; ++s) CHECK(!work.state(s).is_active());
    }
}

TEST_CASE("seeded odometer equals shifted field") {
    // Stabilizing from odometer h0 under the original field matches
    // stabilizing from zero under the h0-shifted field.
    const Domain domain({8}, Boundary::Torus);
    const InstructionField field = nn_field(303, 1.0, domain);
    InitialStateSpec spec;
    spec.zeta = 0.6;
    spec.seed = 42;
    const Configuration initial = generate(spec, domain);

    Odometer h0(domain);
    h0.set_count(1, 3);
    h0.set_count(4, 1);

    Configuration a = initial;
    Odometer odometer_a = h0;
    REQUIRE(stabilize(a, odometer_a, field, nullptr).stable());

    Configuration b = initial;
    Odometer odometer_b(domain);
    const InstructionField tail = shifted_field(field, h0);
    REQUIRE(stabilize(b, odometer_b, tail, nullptr).stable());

    CHECK(a == b);
    for (std::int64_t s = 0; s < 8; ++s)
        CHECK(odometer_a.count(s) - h0.count(s) == odometer_b.count(s));
}
