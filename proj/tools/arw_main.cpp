// Command-line front end: each subcommand builds a RunConfig (optionally
// seeded from a config file) and hands it to the runner.

#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "arw/config.hpp"
#include "arw/runner.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    int dim = 0;
    std::string size;
    double lambda = -1.0;
    std::string kernel;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int replicas = 0;
    std::string out;
    std::string scheduler;
    std::int64_t cap = -1;
    int threads = -1;
    std::string boundary;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "config file to start from");
    cmd->add_option("--dim", flags.dim, "lattice dimension");
    cmd->add_option("--size", flags.size, "side length, or comma list per axis");
    cmd->add_option("--lambda", flags.lambda, "sleep rate lambda > 0");
    cmd->add_option("--kernel", flags.kernel, "nn | biased:<p> | kernel file");
    cmd->add_option("--seed", flags.seed, "master seed")
        ->each([&](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--replicas", flags.replicas, "replicas per grid point");
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--scheduler", flags.scheduler, "fifo|raster|random|wavefront");
    cmd->add_option("--cap", flags.cap, "toppling cap per stabilization (0 = default)");
    cmd->add_option("--threads", flags.threads, "worker threads (0 = all cores)");
    cmd->add_option("--boundary", flags.boundary, "torus|absorbing");
}

arw::RunConfig build_config(const CommonFlags& flags, const std::string& kind) {
    arw::RunConfig config;
    if (!flags.config_path.empty()) config = arw::load_config(flags.config_path);
    config.kind = kind;
    if (flags.dim > 0 && flags.size.empty()) {
        config.sides.assign(static_cast<std::size_t>(flags.dim), config.sides.front());
    }
    if (!flags.size.empty()) {
        std::vector<std::int32_t> sides;
        std::string tok;
        std::istringstream in(flags.size);
        while (std::getline(in, tok, ',')) sides.push_back(std::stoi(tok));
        if (flags.dim > 0 && sides.size() == 1)
            sides.assign(static_cast<std::size_t>(flags.dim), sides.front());
        config.sides = sides;
    }
    if (flags.lambda > 0.0) config.lambda = flags.lambda;
    if (!flags.kernel.empty()) config.kernel_spec = flags.kernel;
    if (flags.seed_set) config.seed = flags.seed;
    if (!flags.out.empty()) config.out_dir = flags.out;
    if (!flags.scheduler.empty())
        config.scheduler = arw::scheduler_from_name(flags.scheduler);
    if (flags.cap >= 0) config.cap = static_cast<std::uint64_t>(flags.cap);
    if (flags.threads >= 0) config.threads = flags.threads;
    if (!flags.boundary.empty()) config.boundary = arw::boundary_from_name(flags.boundary);
    if (flags.replicas > 0) {
        config.drive_replicas = flags.replicas;
        config.scan_replicas = flags.replicas;
        config.couple_seeds = flags.replicas;
    }
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Activated-random-walk simulation laboratory"};
    app.require_subcommand(1);

    CommonFlags drive_flags, scan_flags, gillespie_flags, couple_flags, selftest_flags,
        estimate_flags;
    std::string u_grid, zeta_grid, family, pattern, estimate_input;
    double zeta1 = -1.0, zeta2 = -1.0, g_zeta = -1.0, horizon = -1.0;
    std::int64_t round_cap = 0;
    bool record_events = false;

    CLI::App* drive = app.add_subcommand("drive", "driven-dissipative retention curve");
    add_common(drive, drive_flags);
    drive->add_option("--u-grid", u_grid, "lo:hi:step or comma list of drive densities");

    CLI::App* scan = app.add_subcommand("scan", "fixed-energy density scan on a torus");
    add_common(scan, scan_flags);
    scan->add_option("--zeta-grid", zeta_grid, "lo:hi:step or comma list of densities");
    scan->add_option("--family", family, "poisson|bernoulli|periodic|blockrenewal");
    scan->add_option("--pattern", pattern, "comma occupancies for the periodic family");

    CLI::App* gillespie =
        app.add_subcommand("gillespie", "continuous-time event-driven evolution");
    add_common(gillespie, gillespie_flags);
    gillespie->add_option("--zeta", g_zeta, "initial density");
    gillespie->add_option("--family", family, "initial family");
    gillespie->add_option("--horizon", horizon, "time horizon (default: run to stability)");
    gillespie->add_flag("--record-events", record_events, "write the full event log");

    CLI::App* couple = app.add_subcommand("couple", "two-stage embedding and odometer bounds");
    add_common(couple, couple_flags);
    couple->add_option("--zeta1", zeta1, "lower density (embedded configuration)");
    couple->add_option("--zeta2", zeta2, "higher density (host configuration)");
    couple->add_option("--round-cap", round_cap, "stage-1 round cap");

    CLI::App* selftest = app.add_subcommand("selftest", "run the full property suite");
    add_common(selftest, selftest_flags);

    CLI::App* estimate = app.add_subcommand("estimate", "fit min(u, c) to drive records");
    add_common(estimate, estimate_flags);
    estimate->add_option("--in", estimate_input, "records.ndjson from a drive run")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        arw::RunConfig config;
        if (drive->parsed()) {
            config = build_config(drive_flags, "drive");
            if (!u_grid.empty()) config.u_grid = arw::parse_grid(u_grid);
        } else if (scan->parsed()) {
            config = build_config(scan_flags, "scan");
            if (!zeta_grid.empty()) config.zeta_grid = arw::parse_grid(zeta_grid);
            if (!family.empty()) config.init.family = arw::family_from_name(family);
            if (!pattern.empty()) {
                config.init.pattern.clear();
                std::istringstream in(pattern);
                std::string tok;
                while (std::getline(in, tok, ','))
                    config.init.pattern.push_back(std::stoi(tok));
            }
        } else if (gillespie->parsed()) {
            config = build_config(gillespie_flags, "gillespie");
            if (g_zeta >= 0.0) config.gillespie_zeta = g_zeta;
            if (!family.empty()) config.init.family = arw::family_from_name(family);
            if (horizon > 0.0) config.gillespie_horizon = horizon;
            if (record_events) config.gillespie_record_events = true;
        } else if (couple->parsed()) {
            config = build_config(couple_flags, "couple");
            if (zeta1 >= 0.0) config.couple_zeta1 = zeta1;
            if (zeta2 >= 0.0) config.couple_zeta2 = zeta2;
            if (round_cap > 0) config.couple_round_cap = round_cap;
        } else if (selftest->parsed()) {
            config = build_config(selftest_flags, "selftest");
        } else if (estimate->parsed()) {
            config = build_config(estimate_flags, "estimate");
            config.estimate_input = estimate_input;
        }
        return arw::run(config);
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 2;
    }
}
