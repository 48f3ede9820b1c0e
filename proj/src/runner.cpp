#include "arw/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "arw/coupling.hpp"
#include "arw/experiments.hpp"
#include "arw/selftest.hpp"
#include "arw/snapshot.hpp"

namespace arw {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string timestamp_utc() {
    const std::time_t now =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buffer[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buffer;
}

ordered_json domain_json(const Domain& domain) {
    return ordered_json{{"dim", domain.dim()},
                        {"sides", domain.sides()},
                        {"boundary", boundary_name(domain.boundary())}};
}

ordered_json config_json(const RunConfig& config) {
    ordered_json j;
    j["kind"] = config.kind;
    j["seed"] = config.seed;
    j["out"] = config.out_dir;
    j["sides"] = config.sides;
    if (config.boundary) j["boundary"] = boundary_name(*config.boundary);
    j["lambda"] = config.lambda;
    j["kernel"] = config.kernel_spec;
    j["family"] = family_name(config.init.family);
    if (!config.init.pattern.empty()) j["pattern"] = config.init.pattern;
    j["block_half"] = config.init.block_half;
    if (config.kind == "drive") {
        j["u_grid"] = config.u_grid;
        j["replicas"] = config.drive_replicas;
    } else if (config.kind == "scan") {
        j["zeta_grid"] = config.zeta_grid;
        j["replicas"] = config.scan_replicas;
    } else if (config.kind == "couple") {
        j["zeta1"] = config.couple_zeta1;
        j["zeta2"] = config.couple_zeta2;
        j["couple_seeds"] = config.couple_seeds;
        j["round_cap"] = config.couple_round_cap;
    } else if (config.kind == "gillespie") {
        j["zeta"] = config.gillespie_zeta;
        j["horizon"] = config.gillespie_horizon == std::numeric_limits<double>::infinity()
                           ? ordered_json("inf")
                           : ordered_json(config.gillespie_horizon);
        j["record_events"] = config.gillespie_record_events;
    } else if (config.kind == "estimate") {
        j["input"] = config.estimate_input;
    }
    j["scheduler"] = scheduler_name(config.scheduler);
    j["cap"] = config.cap;
    j["threads"] = config.threads;
    return j;
}

void write_manifest(const std::filesystem::path& dir, const RunConfig& config) {
    std::ofstream out(dir / "manifest.json");
    if (!out) throw std::runtime_error("cannot write manifest");
    // The timestamp stays on its own comment line so reruns differ only there.
    out << "# written " << timestamp_utc() << '\n';
    ordered_json manifest;
    manifest["build"] = kBuildId;
    manifest["instruction_table_order"] =
        "uniform variate against cumulative [sleep = lambda/(1+lambda), then kernel "
        "entries in file order scaled by 1/(1+lambda)]";
    manifest["config"] = config_json(config);
    out << manifest.dump(2) << '\n';
}

class NdjsonWriter {
public:
    explicit NdjsonWriter(const std::filesystem::path& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path.string());
    }
    void write(const ordered_json& record) { out_ << record.dump() << '\n'; }

private:
    std::ofstream out_;
};

Domain make_domain(const RunConfig& config, Boundary fallback) {
    return Domain(config.sides, config.boundary.value_or(fallback));
}

ExperimentOptions engine_options(const RunConfig& config) {
    ExperimentOptions options;
    options.scheduler = config.scheduler;
    options.cap = config.cap;
    options.threads = config.threads;
    return options;
}

int run_drive(const RunConfig& config, const std::filesystem::path& dir) {
    const Domain box = make_domain(config, Boundary::Absorbing);
    const JumpKernel kernel = JumpKernel::from_spec(config.kernel_spec, box.dim());
    std::vector<double> grid = config.u_grid;
    if (grid.empty()) grid = parse_grid("0.05:1.2:0.05");
    const DriveCurve curve = drive(box, config.lambda, kernel, grid,
                                   config.drive_replicas, config.seed,
                                   engine_options(config));

    NdjsonWriter records(dir / "records.ndjson");
    for (std::size_t g = 0; g < curve.u_grid.size(); ++g) {
        for (const DrivePoint& p : curve.points[g]) {
            records.write(ordered_json{{"experiment", "drive"},
                                       {"u", p.u},
                                       {"replica", p.replica},
                                       {"seed", p.seed},
                                       {"domain", domain_json(box)},
                                       {"lambda", config.lambda},
                                       {"kernel", kernel.id()},
                                       {"added", p.added},
                                       {"retained", p.retained},
                                       {"dissipated", p.dissipated},
                                       {"topplings", p.topplings},
                                       {"capped", p.capped},
                                       {"zeta", p.retained_density}});
        }
    }
    std::ofstream csv(dir / "curve.csv");
    csv << "u,zeta_mean,zeta_se,replicas\n";
    char line[128];
    for (std::size_t g = 0; g < curve.u_grid.size(); ++g) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%d\n", curve.u_grid[g],
                      curve.zeta_mean[g], curve.zeta_se[g], config.drive_replicas);
        csv << line;
    }
    std::cout << "drive: " << curve.u_grid.size() << " grid points x "
              << config.drive_replicas << " replicas -> " << dir << '\n';
    return 0;
}

int run_scan(const RunConfig& config, const std::filesystem::path& dir) {
    const Domain torus = make_domain(config, Boundary::Torus);
    const JumpKernel kernel = JumpKernel::from_spec(config.kernel_spec, torus.dim());
    std::vector<double> grid = config.zeta_grid;
    if (grid.empty()) grid = parse_grid("0.05:1.0:0.05");
    const ScanResult result = density_scan(torus, config.lambda, kernel, grid,
                                           config.init, config.scan_replicas,
                                           config.seed, engine_options(config));

    NdjsonWriter records(dir / "records.ndjson");
    for (std::size_t g = 0; g < result.zeta_grid.size(); ++g) {
        for (const ScanPoint& p : result.points[g]) {
            records.write(ordered_json{{"experiment", "scan"},
                                       {"zeta", p.zeta},
                                       {"replica", p.replica},
                                       {"seed", p.seed},
                                       {"domain", domain_json(torus)},
                                       {"lambda", config.lambda},
                                       {"kernel", kernel.id()},
                                       {"family", family_name(config.init.family)},
                                       {"measured_zeta", p.measured_zeta},
                                       {"mean_odometer", p.mean_odometer},
                                       {"topplings", p.topplings},
                                       {"slept", p.slept},
                                       {"capped", p.capped}});
        }
    }
    std::ofstream csv(dir / "curve.csv");
    csv << "zeta,mean_odometer,se,capped_fraction\n";
    char line[128];
    for (const ScanStat& s : result.stats) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", s.zeta,
                      s.mean_odometer, s.se_odometer, s.capped_fraction);
        csv << line;
    }
    std::cout << "scan: " << result.zeta_grid.size() << " densities x "
              << config.scan_replicas << " replicas -> " << dir << '\n';
    return 0;
}

int run_couple(const RunConfig& config, const std::filesystem::path& dir) {
    const Domain torus = make_domain(config, Boundary::Torus);
    const JumpKernel kernel = JumpKernel::from_spec(config.kernel_spec, torus.dim());
    if (config.couple_zeta1 >= config.couple_zeta2)
        std::cerr << "warning: zeta1 >= zeta2; the embedding bound is stated for "
                     "zeta1 < zeta2\n";
    NdjsonWriter records(dir / "records.ndjson");
    int embedded = 0;
    int bounds_ok = 0;
    for (int s = 0; s < config.couple_seeds; ++s) {
        const std::uint64_t base =
            rng::combine(config.seed, static_cast<std::uint64_t>(s));
        InitialStateSpec eta_spec;
        eta_spec.zeta = config.couple_zeta1;
        eta_spec.seed = rng::combine(base, 1);
        InitialStateSpec xi_spec;
        xi_spec.zeta = config.couple_zeta2;
        xi_spec.seed = rng::combine(base, 2);
        const Configuration eta0 = generate(eta_spec, torus);
        const Configuration xi0 = generate(xi_spec, torus);
        InstructionField field(rng::combine(base, 3), config.lambda, kernel, torus);
        CouplingCaps caps;
        caps.round_cap = config.couple_round_cap;
        caps.topple_cap = config.cap;
        const CouplingReport report = coupled_stabilize(eta0, xi0, field, caps);
        if (report.stage1_embedded) ++embedded;
        if (report.complete && report.embedded_bound_holds && report.direct_bound_holds)
            ++bounds_ok;
        records.write(ordered_json{{"experiment", "couple"},
                                   {"replica", s},
                                   {"seed", base},
                                   {"domain", domain_json(torus)},
                                   {"lambda", config.lambda},
                                   {"kernel", kernel.id()},
                                   {"zeta1", report.density_eta},
                                   {"zeta2", report.density_xi},
                                   {"stage1_embedded", report.stage1_embedded},
                                   {"complete", report.complete},
                                   {"rounds", report.rounds},
                                   {"max_h0", report.max_h0},
                                   {"max_h1", report.max_h1},
                                   {"embedded_bound_holds", report.embedded_bound_holds},
                                   {"direct_bound_holds", report.direct_bound_holds},
                                   {"embedded_violations", report.embedded_violations},
                                   {"direct_violations", report.direct_violations}});
    }
    std::cout << "couple: " << embedded << "/" << config.couple_seeds
              << " embedded, bounds held in " << bounds_ok << "/" << embedded
              << " completed runs -> " << dir << '\n';
    return 0;
}

int run_gillespie(const RunConfig& config, const std::filesystem::path& dir) {
    const Domain domain = make_domain(config, Boundary::Torus);
    const JumpKernel kernel = JumpKernel::from_spec(config.kernel_spec, domain.dim());
    InitialStateSpec spec = config.init;
    spec.zeta = config.gillespie_zeta;
    spec.seed = rng::combine(config.seed, 1);
    Configuration config_state = generate(spec, domain);
    InstructionField field(config.seed, config.lambda, kernel, domain);

    GillespieOptions options;
    options.time_horizon = config.gillespie_horizon;
    options.record_events = config.gillespie_record_events;
    const GillespieTrace trace = gillespie_run(config_state, field, options);

    NdjsonWriter records(dir / "records.ndjson");
    records.write(ordered_json{{"experiment", "gillespie"},
                               {"seed", config.seed},
                               {"domain", domain_json(domain)},
                               {"lambda", config.lambda},
                               {"kernel", kernel.id()},
                               {"family", family_name(spec.family)},
                               {"zeta", config.gillespie_zeta},
                               {"events", trace.event_count},
                               {"final_time", trace.final_time},
                               {"stable", trace.reached_stability},
                               {"truncated", !trace.reached_stability}});
    if (config.gillespie_record_events) {
        NdjsonWriter events(dir / "events.ndjson");
        for (const GillespieEvent& e : trace.events) {
            events.write(ordered_json{
                {"t", e.time},
                {"site", e.site},
                {"kind", e.instruction.is_sleep() ? "sleep" : "jump"},
                {"entry", e.instruction.entry}});
        }
    }
    snapshot_save(config_state, (dir / "final.snapshot").string());
    std::cout << "gillespie: " << trace.event_count << " events, "
              << (trace.reached_stability ? "stable" : "truncated") << " -> " << dir
              << '\n';
    return 0;
}

int run_selftest(const RunConfig& config, const std::filesystem::path& dir) {
    const auto results = selftest::run_all(config.seed, config.threads);
    NdjsonWriter records(dir / "records.ndjson");
    bool all_ok = true;
    for (const auto& suite : results) {
        records.write(ordered_json{{"experiment", "selftest"},
                                   {"suite", suite.name},
                                   {"instances", suite.instances},
                                   {"passed", suite.passed},
                                   {"ok", suite.ok()},
                                   {"detail", suite.detail}});
        std::cout << (suite.ok() ? "PASS " : "FAIL ") << suite.name << ": "
                  << suite.passed << "/" << suite.instances;
        if (!suite.ok()) std::cout << " (" << suite.detail << ")";
        std::cout << '\n';
        all_ok = all_ok && suite.ok();
    }
    return all_ok ? 0 : 1;
}

int run_estimate(const RunConfig& config, const std::filesystem::path& dir) {
    if (config.estimate_input.empty())
        throw std::runtime_error("estimate needs an input records.ndjson path");
    std::ifstream in(config.estimate_input);
    if (!in)
        throw std::runtime_error("cannot open '" + config.estimate_input + "'");
    DriveCurve curve;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto record = ordered_json::parse(line);
        if (record.value("experiment", "") != "drive") continue;
        const double u = record.at("u").get<double>();
        DrivePoint point;
        point.u = u;
        point.retained_density = record.at("zeta").get<double>();
        point.replica = record.value("replica", 0);
        auto slot = std::find(curve.u_grid.begin(), curve.u_grid.end(), u);
        if (slot == curve.u_grid.end()) {
            curve.u_grid.push_back(u);
            curve.points.emplace_back();
            slot = curve.u_grid.end() - 1;
        }
        curve.points[static_cast<std::size_t>(slot - curve.u_grid.begin())].push_back(point);
    }
    if (curve.u_grid.empty())
        throw std::runtime_error("no drive records found in the input");
    curve.zeta_mean.resize(curve.u_grid.size());
    curve.zeta_se.resize(curve.u_grid.size());
    std::vector<double> densities;
    for (std::size_t g = 0; g < curve.u_grid.size(); ++g) {
        densities.clear();
        for (const DrivePoint& p : curve.points[g]) densities.push_back(p.retained_density);
        curve.zeta_mean[g] = mean_of(densities);
        curve.zeta_se[g] = stderr_of(densities);
    }
    const BreakpointEstimate estimate =
        estimate_zeta_c(curve, 200, rng::combine(config.seed, 0xb007));
    std::ofstream out(dir / "estimate.json");
    ordered_json j{{"breakpoint", estimate.c},
                   {"stderr", estimate.stderr_boot},
                   {"plateau_found", estimate.plateau_found},
                   {"sse", estimate.sse},
                   {"grid_points", curve.u_grid.size()}};
    out << j.dump(2) << '\n';
    std::cout << "estimate: breakpoint " << estimate.c << " +/- " << estimate.stderr_boot
              << (estimate.plateau_found ? "" : " [no plateau detected]") << '\n';
    return 0;
}

}  // namespace

std::string resolve_out_dir(const RunConfig& config) {
    if (const char* env = std::getenv("ARW_OUT_DIR"); env && *env) return env;
    return config.out_dir;
}

int run(const RunConfig& config) {
    const std::filesystem::path dir = resolve_out_dir(config);
    std::filesystem::create_directories(dir);
    write_manifest(dir, config);
    if (config.kind == "drive") return run_drive(config, dir);
    if (config.kind == "scan") return run_scan(config, dir);
    if (config.kind == "couple") return run_couple(config, dir);
    if (config.kind == "gillespie") return run_gillespie(config, dir);
    if (config.kind == "selftest") return run_selftest(config, dir);
    if (config.kind == "estimate") return run_estimate(config, dir);
    throw std::runtime_error("unknown experiment kind '" + config.kind + "'");
}

}  // namespace arw
