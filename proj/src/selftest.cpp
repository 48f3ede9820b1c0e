#include "arw/selftest.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>

#include "arw/coupling.hpp"
#include "arw/experiments.hpp"
#include "arw/initial_states.hpp"
#include "arw/instruction_field.hpp"
#include "arw/toppling.hpp"

namespace arw::selftest {

namespace {

struct Instance {
    Domain domain;
    Configuration config;
    InstructionField field;
    std::uint64_t seed;
    double lambda;
};

constexpr double kLambdas[3] = {0.1, 1.0, 10.0};

// Density ceiling per sleep rate: near-full tori with a rare sleep
// instruction take exponentially long to freeze, and these suites compare
// completed stabilizations.
double zeta_ceiling(double lambda) {
    if (lambda < 0.5) return 0.6;
    if (lambda < 5.0) return 0.9;
    return 1.0;
}

Instance draw_instance(std::uint64_t seed, std::uint64_t index, std::int32_t max_side_1d,
                       std::int32_t max_side_2d) {
    rng::CounterStream stream(seed, rng::combine(0x5e1f7e57ULL, index));
    const int d = stream.next_below(2) == 0 ? 1 : 2;
    const std::int32_t side =
        d == 1 ? static_cast<std::int32_t>(4 + stream.next_below(
                     static_cast<std::uint64_t>(max_side_1d - 3)))
               : static_cast<std::int32_t>(3 + stream.next_below(
                     static_cast<std::uint64_t>(max_side_2d - 2)));
    const double lambda = kLambdas[stream.next_below(3)];
    const double zeta = 0.05 + (zeta_ceiling(lambda) - 0.05) * stream.next_unit();

    Domain domain(std::vector<std::int32_t>(static_cast<std::size_t>(d), side),
                  Boundary::Torus);
    const double count_ceiling =
        lambda > 5.0 ? static_cast<double>(domain.site_count())
                     : 0.9 * static_cast<double>(domain.site_count());
    Configuration config(domain);
    std::uint64_t sub = stream.next_u64();
    for (int attempt = 0; attempt < 64; ++attempt) {
        InitialStateSpec spec;
        spec.family = Family::Poisson;
        spec.zeta = zeta;
        spec.seed = sub + static_cast<std::uint64_t>(attempt);
        config = generate(spec, domain);
        if (static_cast<double>(config.particle_total()) <= count_ceiling) break;
    }
    const std::uint64_t field_seed = stream.next_u64();
    return Instance{domain, std::move(config),
                    InstructionField(field_seed, lambda, JumpKernel::nearest_neighbor(d), domain),
                    field_seed, lambda};
}

// Shared driver: run `check` over the instance indices, count passes, keep
// the first failure message.
SuiteResult run_suite(const std::string& name, std::int64_t instances, int threads,
                      const std::function<std::string(std::int64_t)>& check) {
    SuiteResult result;
    result.name = name;
    result.instances = instances;
    std::atomic<std::int64_t> passed{0};
    std::mutex detail_mutex;
    parallel_for(instances, threads, [&](std::int64_t i) {
        const std::string failure = check(i);
        if (failure.empty()) {
            passed.fetch_add(1);
        } else {
            std::lock_guard<std::mutex> lock(detail_mutex);
            if (result.detail.empty())
                result.detail = "instance " + std::to_string(i) + ": " + failure;
        }
    });
    result.passed = passed.load();
    return result;
}

std::string check_totals(const Configuration& config) {
    return config.totals_consistent() ? "" : "cached totals drifted from a recount";
}

}  // namespace

SuiteResult abelian_suite(std::int64_t instances, std::uint64_t seed, int threads) {
    const Scheduler schedulers[4] = {Scheduler::Fifo, Scheduler::RasterSweep,
                                     Scheduler::RandomUnstable, Scheduler::Wavefront};
    return run_suite("abelianness", instances, threads, [&](std::int64_t i) -> std::string {
        const Instance inst = draw_instance(seed, static_cast<std::uint64_t>(i), 16, 6);
        std::optional<Configuration> reference_config;
        std::optional<Odometer> reference_odometer;
        for (const Scheduler s : schedulers) {
            Configuration config = inst.config;
            Odometer odometer(inst.domain);
            StabilizeOptions options;
            options.scheduler = s;
            options.scheduler_seed = inst.seed + 17;
            const StabilizeReport report = stabilize(config, odometer, inst.field,
                                                     nullptr, options);
            if (!report.stable()) return "stabilization hit the toppling cap";
            if (config.particle_total() != inst.config.particle_total())
                return "torus toppling changed the particle total";
            if (auto msg = check_totals(config); !msg.empty()) return msg;
            if (!reference_config) {
                reference_config = std::move(config);
                reference_odometer = std::move(odometer);
            } else if (!(config == *reference_config)) {
                return "final configuration differs under " + scheduler_name(s);
            } else if (!(odometer == *reference_odometer)) {
                return "final odometer differs under " + scheduler_name(s);
            }
        }
        return "";
    });
}

SuiteResult least_action_suite(std::int64_t instances, std::uint64_t seed, int threads) {
    return run_suite("least-action", instances, threads, [&](std::int64_t i) -> std::string {
        const Instance inst = draw_instance(seed, static_cast<std::uint64_t>(i), 8, 5);
        rng::CounterStream stream(inst.seed, rng::combine(0x1ea57ac7ULL, i));

        // Acceptable stabilizing sequence: legal stabilization, then rounds
        // of forced wake-ups of sleeping sites, each followed by a legal
        // restabilization, all recorded in order.
        Configuration work = inst.config;
        Odometer work_odometer(inst.domain);
        std::vector<std::int64_t> alpha;
        StabilizeOptions record;
        record.record_order = true;
        const StabilizeReport first = stabilize(work, work_odometer, inst.field,
                                                nullptr, record);
        if (!first.stable()) return "stabilization hit the toppling cap";
        alpha.insert(alpha.end(), first.order.begin(), first.order.end());

        const int rounds = 1 + static_cast<int>(stream.next_below(2));
        for (int round = 0; round < rounds; ++round) {
            std::vector<std::int64_t> sleepers;
            for (std::int64_t site = 0; site < work.site_count(); ++site)
                if (work.state(site).is_sleeping()) sleepers.push_back(site);
            if (sleepers.empty()) break;
            const std::size_t wakes =
                1 + stream.next_below(std::min<std::uint64_t>(sleepers.size(), 4));
            for (std::size_t w = 0; w < wakes; ++w) {
                const std::int64_t site =
                    sleepers[stream.next_below(sleepers.size())];
                if (!is_acceptable(work, site)) continue;  // woken and moved earlier
                topple(work, work_odometer, inst.field, site);
                alpha.push_back(site);
            }
            const StabilizeReport again = stabilize(work, work_odometer, inst.field,
                                                    nullptr, record);
            if (!again.stable()) return "restabilization hit the toppling cap";
            alpha.insert(alpha.end(), again.order.begin(), again.order.end());
        }

        const LeastActionVerdict verdict =
            check_least_action(inst.config, inst.field, nullptr, alpha);
        if (verdict.result != LeastActionVerdict::Result::Pass)
            return "verdict " + verdict.detail + " (" +
                   std::to_string(verdict.violations) + " violations)";
        return "";
    });
}

SuiteResult monotonicity_suite(std::int64_t instances, std::uint64_t seed, int threads) {
    return run_suite("monotonicity", instances, threads, [&](std::int64_t i) -> std::string {
        const Instance inst = draw_instance(seed, static_cast<std::uint64_t>(i), 12, 5);
        rng::CounterStream stream(inst.seed, rng::combine(0x6e57edULL, i));

        // eta' adds active particles on top of eta; V is a raster interval
        // inside the full volume V'.
        Configuration larger = inst.config;
        const std::uint64_t extras = 1 + stream.next_below(4);
        for (std::uint64_t e = 0; e < extras; ++e) {
            const std::int64_t site = static_cast<std::int64_t>(
                stream.next_below(static_cast<std::uint64_t>(larger.site_count())));
            larger.set_state(site, larger.state(site).incremented());
        }
        const std::int64_t n = inst.config.site_count();
        std::int64_t a = static_cast<std::int64_t>(stream.next_below(static_cast<std::uint64_t>(n)));
        std::int64_t b = static_cast<std::int64_t>(stream.next_below(static_cast<std::uint64_t>(n)));
        if (a > b) std::swap(a, b);
        std::vector<std::int64_t> volume;
        for (std::int64_t s = a; s <= b; ++s) volume.push_back(s);

        Configuration small_config = inst.config;
        Odometer small_odometer(inst.domain);
        if (!stabilize(small_config, small_odometer, inst.field, &volume).stable())
            return "sub-volume stabilization hit the toppling cap";

        Odometer large_odometer(inst.domain);
        if (!stabilize(larger, large_odometer, inst.field, nullptr).stable())
            return "full-volume stabilization hit the toppling cap";

        if (small_odometer.violations_above(large_odometer) > 0)
            return "odometer of the smaller instance exceeds the larger one";
        return "";
    });
}

SuiteResult conservation_suite(std::int64_t instances, std::uint64_t seed, int threads) {
    return run_suite("conservation", instances, threads, [&](std::int64_t i) -> std::string {
        const Instance inst = draw_instance(seed, static_cast<std::uint64_t>(i), 16, 6);
        // Torus leg: totals invariant toppling by toppling.
        Configuration torus_config = inst.config;
        Odometer torus_odometer(inst.domain);
        const std::int64_t before = torus_config.particle_total();
        StabilizeOptions record;
        record.record_order = true;
        const StabilizeReport report =
            stabilize(torus_config, torus_odometer, inst.field, nullptr, record);
        if (!report.stable()) return "stabilization hit the toppling cap";
        if (torus_config.particle_total() != before)
            return "torus stabilization changed the particle total";
        if (auto msg = check_totals(torus_config); !msg.empty()) return msg;
        {
            Configuration replay = inst.config;
            Odometer replay_odometer(inst.domain);
            for (std::int64_t site : report.order) {
                const std::int64_t step_before = replay.particle_total();
                topple(replay, replay_odometer, inst.field, site);
                if (replay.particle_total() != step_before)
                    return "a single torus toppling changed the particle total";
            }
        }

        // Absorbing leg: exact dissipation accounting on the same draw.
        Domain box(inst.domain.sides(), Boundary::Absorbing);
        InstructionField box_field(inst.seed, inst.lambda,
                                   JumpKernel::nearest_neighbor(inst.domain.dim()), box);
        Configuration box_config(box);
        for (std::int64_t site = 0; site < inst.config.site_count(); ++site) {
            const auto particles = inst.config.state(site).particles();
            if (particles > 0) box_config.set_state(site, SiteState::active(particles));
        }
        const std::int64_t added = box_config.particle_total();
        Odometer box_odometer(box);
        const StabilizeReport box_report =
            stabilize(box_config, box_odometer, box_field, nullptr);
        if (!box_report.stable()) return "absorbing stabilization hit the cap";
        if (box_config.particle_total() +
                static_cast<std::int64_t>(box_report.dissipated) != added)
            return "retained + dissipated != added on the absorbing box";
        if (auto msg = check_totals(box_config); !msg.empty()) return msg;
        return "";
    });
}

SuiteResult gillespie_suite(std::int64_t instances, std::uint64_t seed, int threads) {
    return run_suite("gillespie-discrete", instances, threads,
                     [&](std::int64_t i) -> std::string {
        const Instance inst = draw_instance(seed, static_cast<std::uint64_t>(i), 16, 6);
        Configuration continuous = inst.config;
        const GillespieTrace trace = gillespie_run(continuous, inst.field);
        if (!trace.reached_stability) return "continuous run did not reach stability";

        Configuration discrete = inst.config;
        Odometer odometer(inst.domain);
        if (!stabilize(discrete, odometer, inst.field, nullptr).stable())
            return "discrete stabilization hit the toppling cap";

        if (!(trace.transitions == odometer))
            return "transition counts differ from the stabilizer's odometer";
        if (!(continuous == discrete)) return "final configurations differ";
        return "";
    });
}

SuiteResult pigeonhole_suite(std::int64_t instances, std::uint64_t seed, int threads) {
    return run_suite("pigeonhole", instances, threads, [&](std::int64_t i) -> std::string {
        rng::CounterStream stream(seed, rng::combine(0x9192e0ULL, i));
        const int d = stream.next_below(2) == 0 ? 1 : 2;
        const std::int32_t side =
            d == 1 ? static_cast<std::int32_t>(8 + stream.next_below(9))
                   : static_cast<std::int32_t>(3 + stream.next_below(4));
        Domain domain(std::vector<std::int32_t>(static_cast<std::size_t>(d), side),
                      Boundary::Torus);
        const double lambda = kLambdas[stream.next_below(3)];

        InitialStateSpec spec;
        spec.zeta = 1.2 + 0.3 * stream.next_unit();
        spec.seed = stream.next_u64();
        Configuration config(domain);
        if (stream.next_below(2) == 0) {
            spec.family = Family::PeriodicPattern;
            spec.pattern = {2};  // period 1 divides every side; density 2 exactly
            spec.zeta = 2.0;
            config = generate(spec, domain);
        } else {
            spec.family = Family::Poisson;
            for (int attempt = 0; attempt < 256; ++attempt) {
                config = generate(spec, domain);
                if (config.particle_total() > domain.site_count()) break;
                spec.seed += 1;
            }
        }
        if (config.particle_total() <= domain.site_count())
            return "could not draw a configuration with more particles than sites";

        InstructionField field(stream.next_u64(), lambda,
                               JumpKernel::nearest_neighbor(d), domain);
        Odometer odometer(domain);
        StabilizeOptions options;
        options.cap = 200 * static_cast<std::uint64_t>(domain.site_count());
        const StabilizeReport report = stabilize(config, odometer, field, nullptr, options);
        if (report.stable())
            return "an overfull torus claims to have stabilized";
        return "";
    });
}

std::vector<SuiteResult> run_all(std::uint64_t seed, int threads, double scale) {
    auto scaled = [&](std::int64_t full) {
        return std::max<std::int64_t>(1, static_cast<std::int64_t>(full * scale));
    };
    std::vector<SuiteResult> results;
    results.push_back(abelian_suite(scaled(1000), seed, threads));
    results.push_back(least_action_suite(scaled(500), seed + 1, threads));
    results.push_back(monotonicity_suite(scaled(500), seed + 2, threads));
    results.push_back(conservation_suite(scaled(200), seed + 3, threads));
    results.push_back(gillespie_suite(scaled(200), seed + 4, threads));
    results.push_back(pigeonhole_suite(scaled(100), seed + 5, threads));
    return results;
}

}  // namespace arw::selftest
