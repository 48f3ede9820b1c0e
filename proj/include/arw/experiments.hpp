#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arw/configuration.hpp"
#include "arw/initial_states.hpp"
#include "arw/instruction_field.hpp"
#include "arw/jump_kernel.hpp"
#include "arw/odometer.hpp"
#include "arw/toppling.hpp"

namespace arw {

struct ExperimentOptions {
    Scheduler scheduler = Scheduler::Fifo;
    std::uint64_t cap = 0;  // per stabilization; 0 = engine default
    int threads = 0;        // 0 = hardware concurrency
};

// ---------------------------------------------------------------------------
// Driven-dissipative protocol.

struct DrivePoint {
    double u = 0.0;
    int replica = 0;
    std::uint64_t seed = 0;
    std::uint64_t added = 0;
    std::uint64_t retained = 0;
    std::uint64_t dissipated = 0;
    std::uint64_t topplings = 0;
    bool capped = false;
    double retained_density = 0.0;
};

struct DriveCurve {
    std::vector<double> u_grid;
    std::vector<double> zeta_mean;
    std::vector<double> zeta_se;
    std::vector<std::vector<DrivePoint>> points;  // [grid][replica]
};

/// For each u: place floor(u*|box|) particles at uniformly random sites of
/// an absorbing box (the slow-driving law, batched via Abelianness),
/// stabilize fully, and record the retained density.
DriveCurve drive(const Domain& box, double lambda, const JumpKernel& kernel,
                 std::span<const double> u_grid, int replicas, std::uint64_t seed,
                 const ExperimentOptions& options = {});

/// Same law with the family's own configurations: initialize at density u,
/// stabilize, record retention.  With Family::Poisson and matched placement
/// counts this reduces to `drive` in law.
DriveCurve family_drive(const Domain& box, double lambda, const JumpKernel& kernel,
                        const InitialStateSpec& family, std::span<const double> u_grid,
                        int replicas, std::uint64_t seed,
                        const ExperimentOptions& options = {});

struct OneByOnePath {
    std::vector<double> retained_density;  // after each addition
    Configuration final_config;
    Odometer final_odometer;
    std::uint64_t added = 0;
    std::uint64_t dissipated = 0;
    std::uint64_t topplings = 0;
    bool capped = false;
};

/// The literal protocol: add one particle at a uniformly random site, let
/// the box stabilize, repeat.  Placements come from a dedicated stream, so a
/// batch run with the same seed uses the identical placement multiset.
OneByOnePath one_by_one_drive(const Domain& box, double lambda, const JumpKernel& kernel,
                              std::uint64_t n_particles, std::uint64_t seed,
                              const ExperimentOptions& options = {});

/// The placement stream shared by drive and one_by_one_drive.
std::int64_t placement_site(const Domain& box, std::uint64_t seed, std::uint64_t index);

// ---------------------------------------------------------------------------
// Fixed-energy scans.

struct ScanPoint {
    double zeta = 0.0;
    int replica = 0;
    std::uint64_t seed = 0;
    double measured_zeta = 0.0;
    double mean_odometer = 0.0;
    std::uint64_t topplings = 0;
    std::uint64_t slept = 0;
    bool capped = false;
};

struct ScanStat {
    double zeta = 0.0;
    double mean_odometer = 0.0;  // replica mean of per-site means
    double se_odometer = 0.0;
    double capped_fraction = 0.0;
};

struct ScanResult {
    std::vector<double> zeta_grid;
    std::vector<ScanStat> stats;
    std::vector<std::vector<ScanPoint>> points;  // [grid][replica]
};

/// For each density and replica: generate the family on the torus, stabilize
/// the whole torus, and record odometer statistics.  Above the transition
/// replicas are expected to hit the toppling cap.
ScanResult density_scan(const Domain& torus, double lambda, const JumpKernel& kernel,
                        std::span<const double> zeta_grid, const InitialStateSpec& family,
                        int replicas, std::uint64_t seed,
                        const ExperimentOptions& options = {});

// ---------------------------------------------------------------------------
// Breakpoint fit of zeta(u) = min(u, c).

struct BreakpointEstimate {
    double c = std::numeric_limits<double>::quiet_NaN();
    double stderr_boot = 0.0;
    bool plateau_found = false;
    double sse = 0.0;
};

BreakpointEstimate estimate_zeta_c(const DriveCurve& curve, int bootstrap = 200,
                                   std::uint64_t boot_seed = 1);

/// Convex one-parameter least squares for the two-segment model; exposed for
/// the estimator tests.
double fit_breakpoint(std::span<const double> u, std::span<const double> zeta);

// ---------------------------------------------------------------------------
// Continuous-time (Gillespie) evolution.

struct GillespieEvent {
    double time;
    std::int64_t site;
    Instruction instruction;
};

struct GillespieOptions {
    double time_horizon = std::numeric_limits<double>::infinity();
    std::uint64_t max_events = 0;  // 0 = unlimited
    bool record_events = false;
};

struct GillespieTrace {
    std::vector<GillespieEvent> events;  // when recorded
    Odometer transitions;                // per-site count of applied instructions
    double final_time = 0.0;
    std::uint64_t event_count = 0;
    bool reached_stability = false;      // false = truncated at the horizon
};

/// Event-driven evolution: each site carries an exponential clock of rate
/// (1+lambda) times its active-particle count; the ringing site applies its
/// next unconsumed instruction from the same field the discrete engine uses,
/// so a run that reaches stability performs exactly the canonical
/// stabilization topplings.
GillespieTrace gillespie_run(Configuration& config, const InstructionField& field,
                             const GillespieOptions& options = {});

// ---------------------------------------------------------------------------
// Universality comparison.

struct FamilyScan {
    std::string family;
    ScanResult scan_small;          // at sizes[0]
    ScanResult scan_large;          // at 2x sizes[0] (divergence proxy)
    DriveCurve retention;           // family-initialized absorbing retention
    BreakpointEstimate breakpoint;
};

struct UniversalityPair {
    std::string family_a;
    std::string family_b;
    double breakpoint_difference = 0.0;
    double breakpoint_combined_se = 0.0;
    // Per grid density: |growth_a - growth_b| / combined SE, where growth is
    // the L -> 2L mean-odometer ratio (the divergence proxy).
    std::vector<double> growth_z;
    std::vector<double> capped_difference;  // capped-fraction difference per density
    std::vector<double> odometer_z;         // raw mean-odometer z-scores, for the record
};

/// Clock rate of the continuous-time evolution: (1+lambda) per active particle.
inline double gillespie_total_rate(const Configuration& config, double lambda) {
    return (1.0 + lambda) * static_cast<double>(config.active_total());
}

struct UniversalityReport {
    std::vector<double> zeta_grid;
    std::vector<FamilyScan> families;
    std::vector<UniversalityPair> pairs;
};

UniversalityReport universality_compare(std::span<const InitialStateSpec> families,
                                        std::span<const double> zeta_grid, double lambda,
                                        const JumpKernel& kernel, const Domain& base_torus,
                                        int replicas, std::uint64_t seed,
                                        const ExperimentOptions& options = {});

// ---------------------------------------------------------------------------

/// Spreads independent jobs over a small worker pool; results land in
/// pre-assigned slots so the outcome does not depend on scheduling.
void parallel_for(std::int64_t count, int threads, const std::function<void(std::int64_t)>& job);

double mean_of(std::span<const double> values);
double stderr_of(std::span<const double> values);

}  // namespace arw
