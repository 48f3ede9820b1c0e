#include "arw/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace arw {

namespace {

std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t grid_index,
                           std::uint64_t replica) {
    return rng::combine(rng::combine(rng::combine(seed, rng::kPurposeReplica), grid_index),
                        replica);
}

void check_conservation(std::uint64_t before, std::uint64_t added, std::uint64_t retained,
                        std::uint64_t dissipated) {
    if (before + added != retained + dissipated)
        throw std::logic_error("particle conservation violated in an absorbing run");
}

// Default scan cap: generous for subcritical runs, cheap to exhaust above
// the transition where the proper odometer diverges with volume.
constexpr std::uint64_t kScanCapPerSite = 10'000;

struct Fenwick {
    explicit Fenwick(std::int64_t n) : tree(static_cast<std::size_t>(n) + 1, 0) {}

    void adjust(std::int64_t i, std::int64_t delta) {
        for (++i; i < static_cast<std::int64_t>(tree.size()); i += i & -i)
            tree[static_cast<std::size_t>(i)] += delta;
    }
    // First index with prefix sum > value.
    std::int64_t find(std::int64_t value) const {
        std::int64_t pos = 0;
        std::int64_t mask = 1;
        while (mask * 2 < static_cast<std::int64_t>(tree.size())) mask *= 2;
        for (; mask > 0; mask /= 2) {
            const std::int64_t next = pos + mask;
            if (next < static_cast<std::int64_t>(tree.size()) &&
                tree[static_cast<std::size_t>(next)] <= value) {
                pos = next;
                value -= tree[static_cast<std::size_t>(next)];
            }
        }
        return pos;  // 0-based site index
    }

    std::vector<std::int64_t> tree;
};

}  // namespace

void parallel_for(std::int64_t count, int threads,
                  const std::function<void(std::int64_t)>& job) {
    if (count <= 0) return;
    int workers = threads > 0 ? threads
                              : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if (workers == 1) {
        for (std::int64_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::int64_t i = next.fetch_add(1);
                if (i >= count) return;
                job(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

double mean_of(std::span<const double> values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
}

double stderr_of(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double m = mean_of(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / (static_cast<double>(n - 1) * static_cast<double>(n)));
}

std::int64_t placement_site(const Domain& box, std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t key = rng::combine(box.geometry_key(), rng::kPurposePlacement);
    const rng::Block block = rng::threefry2x64(index, 0, seed, key);
    return static_cast<std::int64_t>(
        rng::below(block.x0, static_cast<std::uint64_t>(box.site_count())));
}

// ---------------------------------------------------------------------------

namespace {

DriveCurve run_drive_grid(const Domain& box, double lambda, const JumpKernel& kernel,
                          std::span<const double> u_grid, int replicas, std::uint64_t seed,
                          const ExperimentOptions& options,
                          const std::function<Configuration(double, std::uint64_t)>& init) {
    DriveCurve curve;
    curve.u_grid.assign(u_grid.begin(), u_grid.end());
    curve.points.assign(u_grid.size(), std::vector<DrivePoint>(
                                           static_cast<std::size_t>(replicas)));
    const std::int64_t jobs =
        static_cast<std::int64_t>(u_grid.size()) * replicas;
    parallel_for(jobs, options.threads, [&](std::int64_t j) {
        const std::size_t g = static_cast<std::size_t>(j) / replicas;
        const int r = static_cast<int>(j % replicas);
        const double u = u_grid[g];
        const std::uint64_t sub_seed = replica_seed(seed, g, static_cast<std::uint64_t>(r));

        Configuration config = init(u, sub_seed);
        const auto added = static_cast<std::uint64_t>(config.particle_total());
        InstructionField field(sub_seed, lambda, kernel, box);
        Odometer odometer(box);
        StabilizeOptions stab;
        stab.scheduler = options.scheduler;
        stab.cap = options.cap;
        const StabilizeReport report = stabilize(config, odometer, field, nullptr, stab);

        DrivePoint& point = curve.points[g][static_cast<std::size_t>(r)];
        point.u = u;
        point.replica = r;
        point.seed = sub_seed;
        point.added = added;
        point.retained = static_cast<std::uint64_t>(config.particle_total());
        point.dissipated = report.dissipated;
        point.topplings = report.topplings;
        point.capped = !report.stable();
        point.retained_density =
            static_cast<double>(point.retained) / static_cast<double>(box.site_count());
        check_conservation(0, added, point.retained, point.dissipated);
    });
    curve.zeta_mean.resize(u_grid.size());
    curve.zeta_se.resize(u_grid.size());
    std::vector<double> densities(static_cast<std::size_t>(replicas));
    for (std::size_t g = 0; g < u_grid.size(); ++g) {
        for (std::size_t r = 0; r < densities.size(); ++r)
            densities[r] = curve.points[g][r].retained_density;
        curve.zeta_mean[g] = mean_of(densities);
        curve.zeta_se[g] = stderr_of(densities);
    }
    return curve;
}

}  // namespace

DriveCurve drive(const Domain& box, double lambda, const JumpKernel& kernel,
                 std::span<const double> u_grid, int replicas, std::uint64_t seed,
                 const ExperimentOptions& options) {
    if (box.boundary() != Boundary::Absorbing)
        throw std::invalid_argument("the driven-dissipative protocol needs an absorbing box");
    return run_drive_grid(
        box, lambda, kernel, u_grid, replicas, seed, options,
        [&](double u, std::uint64_t sub_seed) {
            Configuration config(box);
            const auto n = static_cast<std::uint64_t>(
                std::floor(u * static_cast<double>(box.site_count()) + 1e-9));
            for (std::uint64_t i = 1; i <= n; ++i) {
                const std::int64_t site = placement_site(box, sub_seed, i);
                config.set_state(site, config.state(site).incremented());
            }
            return config;
        });
}

DriveCurve family_drive(const Domain& box, double lambda, const JumpKernel& kernel,
                        const InitialStateSpec& family, std::span<const double> u_grid,
                        int replicas, std::uint64_t seed, const ExperimentOptions& options) {
    if (box.boundary() != Boundary::Absorbing)
        throw std::invalid_argument("the driven-dissipative protocol needs an absorbing box");
    return run_drive_grid(box, lambda, kernel, u_grid, replicas, seed, options,
                          [&](double u, std::uint64_t sub_seed) {
                              InitialStateSpec spec = family.with_seed(sub_seed);
                              spec.zeta = u;
                              return generate(spec, box);
                          });
}

OneByOnePath one_by_one_drive(const Domain& box, double lambda, const JumpKernel& kernel,
                              std::uint64_t n_particles, std::uint64_t seed,
                              const ExperimentOptions& options) {
    if (box.boundary() != Boundary::Absorbing)
        throw std::invalid_argument("the driven-dissipative protocol needs an absorbing box");
    Configuration config(box);
    Odometer odometer(box);
    InstructionField field(seed, lambda, kernel, box);
    StabilizeOptions stab;
    stab.scheduler = options.scheduler;
    stab.cap = options.cap;
    OneByOnePath path{{}, config, odometer, n_particles, 0, 0, false};
    path.retained_density.reserve(static_cast<std::size_t>(n_particles));
    for (std::uint64_t i = 1; i <= n_particles; ++i) {
        const std::int64_t site = placement_site(box, seed, i);
        config.set_state(site, config.state(site).incremented());
        const StabilizeReport report = stabilize(config, odometer, field, nullptr, stab);
        path.dissipated += report.dissipated;
        path.topplings += report.topplings;
        if (!report.stable()) path.capped = true;
        path.retained_density.push_back(config.density());
        check_conservation(0, i, static_cast<std::uint64_t>(config.particle_total()),
                           path.dissipated);
    }
    path.final_config = std::move(config);
    path.final_odometer = std::move(odometer);
    return path;
}

// ---------------------------------------------------------------------------

ScanResult density_scan(const Domain& torus, double lambda, const JumpKernel& kernel,
                        std::span<const double> zeta_grid, const InitialStateSpec& family,
                        int replicas, std::uint64_t seed, const ExperimentOptions& options) {
    if (torus.boundary() != Boundary::Torus)
        throw std::invalid_argument("density scans run on a torus");
    ScanResult result;
    result.zeta_grid.assign(zeta_grid.begin(), zeta_grid.end());
    result.points.assign(zeta_grid.size(),
                         std::vector<ScanPoint>(static_cast<std::size_t>(replicas)));
    const std::int64_t jobs = static_cast<std::int64_t>(zeta_grid.size()) * replicas;
    parallel_for(jobs, options.threads, [&](std::int64_t j) {
        const std::size_t g = static_cast<std::size_t>(j) / replicas;
        const int r = static_cast<int>(j % replicas);
        const std::uint64_t sub_seed = replica_seed(seed, g, static_cast<std::uint64_t>(r));

        InitialStateSpec spec = family.with_seed(sub_seed);
        spec.zeta = zeta_grid[g];
        Configuration config = generate(spec, torus);
        const std::int64_t before = config.particle_total();

        InstructionField field(sub_seed, lambda, kernel, torus);
        Odometer odometer(torus);
        StabilizeOptions stab;
        stab.scheduler = options.scheduler;
        stab.cap = options.cap ? options.cap
                               : kScanCapPerSite *
                                     static_cast<std::uint64_t>(torus.site_count());
        const StabilizeReport report = stabilize(config, odometer, field, nullptr, stab);
        if (config.particle_total() != before)
            throw std::logic_error("torus stabilization changed the particle total");

        ScanPoint& point = result.points[g][static_cast<std::size_t>(r)];
        point.zeta = zeta_grid[g];
        point.replica = r;
        point.seed = sub_seed;
        point.measured_zeta = static_cast<double>(before) /
                              static_cast<double>(torus.site_count());
        point.mean_odometer = static_cast<double>(odometer.total()) /
                              static_cast<double>(torus.site_count());
        point.topplings = report.topplings;
        point.slept = report.slept;
        point.capped = !report.stable();
    });
    result.stats.resize(zeta_grid.size());
    std::vector<double> odo(static_cast<std::size_t>(replicas));
    for (std::size_t g = 0; g < zeta_grid.size(); ++g) {
        double capped = 0.0;
        for (std::size_t r = 0; r < odo.size(); ++r) {
            odo[r] = result.points[g][r].mean_odometer;
            capped += result.points[g][r].capped ? 1.0 : 0.0;
        }
        result.stats[g] = {zeta_grid[g], mean_of(odo), stderr_of(odo),
                           capped / static_cast<double>(replicas)};
    }
    return result;
}

// ---------------------------------------------------------------------------

double fit_breakpoint(std::span<const double> u, std::span<const double> zeta) {
    if (u.size() != zeta.size() || u.empty())
        throw std::invalid_argument("breakpoint fit needs matching nonempty vectors");
    // Sort by u; minimize sum (zeta_i - min(u_i, c))^2 exactly: on each
    // interval between consecutive u's the objective is quadratic with
    // vertex at the mean of the zeta's lying beyond the interval.
    std::vector<std::size_t> idx(u.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });

    const std::size_t n = u.size();
    // suffix_count[k], suffix_sum[k]: over points with sorted position >= k.
    std::vector<double> suffix_sum(n + 1, 0.0), suffix_sq(n + 1, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        suffix_sum[k] = suffix_sum[k + 1] + zeta[idx[k]];
        suffix_sq[k] = suffix_sq[k + 1] + zeta[idx[k]] * zeta[idx[k]];
    }
    // Residual of the points already passed (u_i <= c): accumulated on the fly.
    double passed_sse = 0.0;
    double best_c = u[idx[n - 1]];
    double best_sse = std::numeric_limits<double>::infinity();
    double lo = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double hi = k < n ? u[idx[k]] : u[idx[n - 1]];
        const double count = static_cast<double>(n - k);
        double c;
        if (count > 0) {
            c = std::clamp(suffix_sum[k] / count, lo, hi);
        } else {
            c = hi;  // all points passed: flat tail, report the edge
        }
        const double sse =
            passed_sse + suffix_sq[k] - 2.0 * c * suffix_sum[k] + count * c * c;
        if (sse < best_sse - 1e-15) {
            best_sse = sse;
            best_c = c;
        }
        if (k < n) {
            const double resid = zeta[idx[k]] - u[idx[k]];
            passed_sse += resid * resid;
            lo = u[idx[k]];
        }
    }
    return best_c;
}

BreakpointEstimate estimate_zeta_c(const DriveCurve& curve, int bootstrap,
                                   std::uint64_t boot_seed) {
    const std::size_t n = curve.u_grid.size();
    if (n < 8)
        throw std::invalid_argument("breakpoint estimation needs at least 8 grid points");
    BreakpointEstimate est;
    est.c = fit_breakpoint(curve.u_grid, curve.zeta_mean);
    double sse = 0.0;
    for (std::size_t g = 0; g < n; ++g) {
        const double r = curve.zeta_mean[g] - std::min(curve.u_grid[g], est.c);
        sse += r * r;
    }
    est.sse = sse;

    const double u_max = *std::max_element(curve.u_grid.begin(), curve.u_grid.end());
    std::vector<double> sorted(curve.u_grid.begin(), curve.u_grid.end());
    std::sort(sorted.begin(), sorted.end());
    const double last_gap = n >= 2 ? sorted[n - 1] - sorted[n - 2] : 0.0;
    est.plateau_found = est.c < u_max - 0.5 * last_gap - 1e-12;

    const bool have_replicas =
        !curve.points.empty() &&
        std::all_of(curve.points.begin(), curve.points.end(),
                    [](const auto& v) { return v.size() >= 2; });
    if (bootstrap > 0 && have_replicas) {
        rng::CounterStream stream(boot_seed, rng::kPurposeBootstrap);
        std::vector<double> estimates(static_cast<std::size_t>(bootstrap));
        std::vector<double> resampled(n);
        for (int b = 0; b < bootstrap; ++b) {
            for (std::size_t g = 0; g < n; ++g) {
                const auto& reps = curve.points[g];
                double acc = 0.0;
                for (std::size_t r = 0; r < reps.size(); ++r)
                    acc += reps[stream.next_below(reps.size())].retained_density;
                resampled[g] = acc / static_cast<double>(reps.size());
            }
            estimates[static_cast<std::size_t>(b)] =
                fit_breakpoint(curve.u_grid, resampled);
        }
        const double m = mean_of(estimates);
        double ss = 0.0;
        for (double e : estimates) ss += (e - m) * (e - m);
        est.stderr_boot = std::sqrt(ss / static_cast<double>(bootstrap - 1));
    }
    return est;
}

// ---------------------------------------------------------------------------

GillespieTrace gillespie_run(Configuration& config, const InstructionField& field,
                             const GillespieOptions& options) {
    const Domain& domain = config.domain();
    const double lambda = field.lambda();
    GillespieTrace trace{{}, Odometer(domain), 0.0, 0, false};

    Fenwick weights(domain.site_count());
    std::int64_t total_active = 0;
    for (std::int64_t site = 0; site < domain.site_count(); ++site) {
        const std::int32_t w = config.state(site).active_particles();
        if (w > 0) weights.adjust(site, w);
        total_active += w;
    }
    rng::CounterStream stream(field.seed(),
                              rng::combine(domain.geometry_key(), rng::kPurposeGillespie));

    // Weight bookkeeping below mirrors set_state exactly; only active
    // particles carry clock rate.
    auto adjust = [&](std::int64_t site, SiteState before, SiteState after) {
        const std::int32_t delta = after.active_particles() - before.active_particles();
        if (delta != 0) {
            weights.adjust(site, delta);
            total_active += delta;
        }
    };

    double t = 0.0;
    while (total_active > 0) {
        if (options.max_events && trace.event_count >= options.max_events) return trace;
        // Strictly positive uniform keeps event times strictly increasing.
        const double u1 =
            (static_cast<double>(stream.next_u64() >> 11) + 0.5) * 0x1.0p-53;
        const double rate = (1.0 + lambda) * static_cast<double>(total_active);
        const double dt = -std::log(u1) / rate;
        if (t + dt > options.time_horizon) {
            trace.final_time = options.time_horizon;
            return trace;
        }
        t += dt;
        const std::int64_t pick = static_cast<std::int64_t>(
            rng::below(stream.next_u64(), static_cast<std::uint64_t>(total_active)));
        const std::int64_t site = weights.find(pick);

        const Instruction ins =
            field.instruction_at(site, trace.transitions.count(site) + 1);
        trace.transitions.increment(site);
        ++trace.event_count;
        if (options.record_events) trace.events.push_back({t, site, ins});

        const SiteState before = config.state(site);
        if (ins.is_sleep()) {
            const SiteState after = before.slept();
            config.set_state(site, after);
            adjust(site, before, after);
        } else {
            const SiteState after = before.decremented();
            config.set_state(site, after);
            adjust(site, before, after);
            const auto target = domain.resolve_jump(site, field.offset_of(ins));
            if (target) {
                const SiteState tb = config.state(*target);
                const SiteState ta = tb.incremented();
                config.set_state(*target, ta);
                adjust(*target, tb, ta);
            }
        }
        trace.final_time = t;
    }
    trace.reached_stability = true;
    return trace;
}

// ---------------------------------------------------------------------------

UniversalityReport universality_compare(std::span<const InitialStateSpec> families,
                                        std::span<const double> zeta_grid, double lambda,
                                        const JumpKernel& kernel, const Domain& base_torus,
                                        int replicas, std::uint64_t seed,
                                        const ExperimentOptions& options) {
    if (families.size() < 2)
        throw std::invalid_argument("universality comparison needs at least two families");
    if (base_torus.boundary() != Boundary::Torus)
        throw std::invalid_argument("universality comparison scans run on a torus");

    std::vector<std::int32_t> doubled_sides;
    for (std::int32_t s : base_torus.sides()) doubled_sides.push_back(2 * s);
    const Domain doubled(doubled_sides, Boundary::Torus);
    const Domain box(base_torus.sides(), Boundary::Absorbing);

    UniversalityReport report;
    report.zeta_grid.assign(zeta_grid.begin(), zeta_grid.end());
    for (std::size_t f = 0; f < families.size(); ++f) {
        FamilyScan fs;
        fs.family = family_name(families[f].family);
        fs.scan_small = density_scan(base_torus, lambda, kernel, zeta_grid, families[f],
                                     replicas, rng::combine(seed, 2 * f), options);
        fs.scan_large = density_scan(doubled, lambda, kernel, zeta_grid, families[f],
                                     replicas, rng::combine(seed, 2 * f + 1), options);
        fs.retention = family_drive(box, lambda, kernel, families[f], zeta_grid, replicas,
                                    rng::combine(seed, 100 + f), options);
        if (zeta_grid.size() >= 8) fs.breakpoint = estimate_zeta_c(fs.retention);
        report.families.push_back(std::move(fs));
    }

    auto growth_ratio = [](const ScanStat& small, const ScanStat& large, double& se) {
        if (small.mean_odometer <= 0.0 || large.mean_odometer <= 0.0) {
            se = 0.0;
            return 1.0;  // no topplings anywhere: trivially size independent
        }
        const double r = large.mean_odometer / small.mean_odometer;
        se = r * std::sqrt(std::pow(small.se_odometer / small.mean_odometer, 2) +
                           std::pow(large.se_odometer / large.mean_odometer, 2));
        return r;
    };

    for (std::size_t a = 0; a < report.families.size(); ++a) {
        for (std::size_t b = a + 1; b < report.families.size(); ++b) {
            const FamilyScan& fa = report.families[a];
            const FamilyScan& fb = report.families[b];
            UniversalityPair pair;
            pair.family_a = fa.family;
            pair.family_b = fb.family;
            pair.breakpoint_difference = std::abs(fa.breakpoint.c - fb.breakpoint.c);
            pair.breakpoint_combined_se =
                std::sqrt(std::pow(fa.breakpoint.stderr_boot, 2) +
                          std::pow(fb.breakpoint.stderr_boot, 2));
            for (std::size_t g = 0; g < zeta_grid.size(); ++g) {
                double se_a = 0.0, se_b = 0.0;
                const double ra = growth_ratio(fa.scan_small.stats[g],
                                               fa.scan_large.stats[g], se_a);
                const double rb = growth_ratio(fb.scan_small.stats[g],
                                               fb.scan_large.stats[g], se_b);
                const double se = std::sqrt(se_a * se_a + se_b * se_b);
                pair.growth_z.push_back(se > 0.0 ? std::abs(ra - rb) / se : 0.0);
                pair.capped_difference.push_back(
                    std::abs(fa.scan_small.stats[g].capped_fraction -
                             fb.scan_small.stats[g].capped_fraction));
                const double ose =
                    std::sqrt(std::pow(fa.scan_small.stats[g].se_odometer, 2) +
                              std::pow(fb.scan_small.stats[g].se_odometer, 2));
                pair.odometer_z.push_back(
                    ose > 0.0 ? std::abs(fa.scan_small.stats[g].mean_odometer -
                                         fb.scan_small.stats[g].mean_odometer) /
                                    ose
                              : 0.0);
            }
            report.pairs.push_back(std::move(pair));
        }
    }
    return report;
}

}  // namespace arw
