// Acceptance suite: each test case checks one criterion end to end and
// prints a PASS/FAIL line with its numbers and runtime.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "arw/coupling.hpp"
#include "arw/experiments.hpp"
#include "arw/initial_states.hpp"
#include "arw/selftest.hpp"

using namespace arw;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

void report(int criterion, const char* name, bool ok, const std::string& numbers,
            double seconds) {
    std::printf("[criterion %2d] %s %s: %s (%.1fs)\n", criterion, ok ? "PASS" : "FAIL",
                name, numbers.c_str(), seconds);
    std::fflush(stdout);
}

bool suite_criterion(int criterion, const char* name, const selftest::SuiteResult& result,
                     double seconds) {
    std::string numbers =
        std::to_string(result.passed) + "/" + std::to_string(result.instances);
    if (!result.ok()) numbers += " — " + result.detail;
    report(criterion, name, result.ok(), numbers, seconds);
    return result.ok();
}

std::vector<double> sixteenths(int from, int to) {
    std::vector<double> grid;
    for (int k = from; k <= to; ++k) grid.push_back(k / 16.0);
    return grid;
}

constexpr std::uint64_t kSeed = 20260809;

}  // namespace

TEST_CASE("criterion 1: abelianness across schedulers") {
    Timer timer;
    const auto result = selftest::abelian_suite(1000, kSeed, 2);
    CHECK(suite_criterion(1, "abelianness", result, timer.seconds()));
}

TEST_CASE("criterion 2: least action principle") {
    Timer timer;
    const auto result = selftest::least_action_suite(500, kSeed + 1, 2);
    CHECK(suite_criterion(2, "least-action", result, timer.seconds()));
}

TEST_CASE("criterion 3: odometer monotonicity") {
    Timer timer;
    const auto result = selftest::monotonicity_suite(500, kSeed + 2, 2);
    CHECK(suite_criterion(3, "monotonicity", result, timer.seconds()));
}

TEST_CASE("criterion 4: exact particle conservation") {
    Timer timer;
    const auto result = selftest::conservation_suite(500, kSeed + 3, 2);
    CHECK(suite_criterion(4, "conservation", result, timer.seconds()));
}

TEST_CASE("criterion 5: gillespie/discrete equivalence") {
    Timer timer;
    const auto result = selftest::gillespie_suite(200, kSeed + 4, 2);
    CHECK(suite_criterion(5, "gillespie-discrete", result, timer.seconds()));
}

TEST_CASE("criterion 6: two-stage coupling bound") {
    Timer timer;
    const Domain torus({64}, Boundary::Torus);
    const JumpKernel kernel = JumpKernel::nearest_neighbor(1);
    int terminated = 0;
    int bounds_held = 0;
    for (int s = 0; s < 100; ++s) {
        const std::uint64_t base = rng::combine(kSeed + 6, static_cast<std::uint64_t>(s));
        InitialStateSpec eta_spec;
        eta_spec.zeta = 0.2;
        eta_spec.seed = rng::combine(base, 1);
        InitialStateSpec xi_spec;
        xi_spec.zeta = 0.5;
        xi_spec.seed = rng::combine(base, 2);
        InstructionField field(rng::combine(base, 3), 1.0, kernel, torus);
        const CouplingReport r = coupled_stabilize(generate(eta_spec, torus),
                                                   generate(xi_spec, torus), field);
        if (!r.stage1_embedded) continue;
        ++terminated;
        REQUIRE(r.complete);
        if (r.embedded_bound_holds && r.direct_bound_holds) ++bounds_held;
    }
    const bool ok = terminated >= 90 && bounds_held == terminated;
    report(6, "coupling-bound", ok,
           std::to_string(bounds_held) + "/" + std::to_string(terminated) +
               " bounds held; RoundCapExceeded in " + std::to_string(100 - terminated) +
               "/100 runs",
           timer.seconds());
    CHECK(ok);
}

TEST_CASE("criterion 7: drive-curve shape at lambda = 1") {
    Timer timer;
    const Domain box({512}, Boundary::Absorbing);
    const JumpKernel kernel = JumpKernel::nearest_neighbor(1);
    std::vector<double> grid;
    for (int k = 1; k <= 24; ++k) grid.push_back(0.05 * k);
    ExperimentOptions options;
    options.threads = 2;
    const DriveCurve curve = drive(box, 1.0, kernel, grid, 20, kSeed + 7, options);

    bool slope_ok = true;
    for (std::size_t g = 0; g < grid.size(); ++g)
        if (grid[g] <= 0.2 + 1e-9 && curve.zeta_mean[g] / grid[g] < 0.95)
            slope_ok = false;

    double plateau_max = 0.0, plateau_min = 1.0;
    for (std::size_t g = grid.size() - 4; g < grid.size(); ++g) {
        plateau_max = std::max(plateau_max, curve.zeta_mean[g]);
        plateau_min = std::min(plateau_min, curve.zeta_mean[g]);
    }
    const bool plateau_ok = plateau_max - plateau_min < 0.02;

    const BreakpointEstimate est = estimate_zeta_c(curve, 200, kSeed + 70);
    const bool breakpoint_ok = est.plateau_found && est.c > 0.0 && est.c < 1.0;

    const bool ok = slope_ok && plateau_ok && breakpoint_ok;
    char numbers[160];
    std::snprintf(numbers, sizeof numbers,
                  "slope>=0.95 %s; plateau range %.4f; breakpoint %.4f +/- %.4f",
                  slope_ok ? "yes" : "no", plateau_max - plateau_min, est.c,
                  est.stderr_boot);
    report(7, "drive-curve-shape", ok, numbers, timer.seconds());
    CHECK(slope_ok);
    CHECK(plateau_ok);
    CHECK(breakpoint_ok);
}

TEST_CASE("criterion 8: breakpoint grows with lambda") {
    Timer timer;
    const Domain box({512}, Boundary::Absorbing);
    const JumpKernel kernel = JumpKernel::nearest_neighbor(1);
    ExperimentOptions options;
    options.threads = 2;

    std::vector<double> low_grid;
    for (int k = 1; k <= 24; ++k) low_grid.push_back(0.05 * k);
    std::vector<double> high_grid;
    for (int k = 1; k <= 26; ++k) high_grid.push_back(0.05 * k);

    const DriveCurve curve_low =
        drive(box, 0.1, kernel, low_grid, 20, kSeed + 8, options);
    const BreakpointEstimate est_low = estimate_zeta_c(curve_low, 200, kSeed + 80);

    const DriveCurve curve_high =
        drive(box, 10.0, kernel, high_grid, 20, kSeed + 9, options);
    const BreakpointEstimate est_high = estimate_zeta_c(curve_high, 200, kSeed + 90);

    const double difference = est_high.c - est_low.c;
    const double combined_se = std::sqrt(est_low.stderr_boot * est_low.stderr_boot +
                                         est_high.stderr_boot * est_high.stderr_boot);
    const bool ok = est_low.plateau_found && est_high.plateau_found &&
                    difference > 2.0 * combined_se && difference > 0.0;
    char numbers[160];
    std::snprintf(numbers, sizeof numbers,
                  "c(10)=%.4f, c(0.1)=%.4f, diff %.4f vs 2se %.4f", est_high.c,
                  est_low.c, difference, 2.0 * combined_se);
    report(8, "lambda-monotone-breakpoint", ok, numbers, timer.seconds());
    CHECK(ok);
}

TEST_CASE("criterion 9: universality proxy across initial families") {
    Timer timer;
    const Domain torus({512}, Boundary::Torus);
    const JumpKernel kernel = JumpKernel::nearest_neighbor(1);

    std::vector<InitialStateSpec> families(3);
    families[0].family = Family::Poisson;
    families[1].family = Family::PeriodicPattern;
    families[2].family = Family::BlockRenewal;

    // Sixteenths represent every density exactly for the pattern family on
    // L = 512; the last scan point (1.25) is explosive for every family.
    std::vector<double> grid = sixteenths(1, 10);
    grid.push_back(20.0 / 16.0);

    ExperimentOptions options;
    options.threads = 2;
    const UniversalityReport report_data =
        universality_compare(families, grid, 1.0, kernel, torus, 20, kSeed + 10, options);

    // Retention curves for the breakpoints need the full plateau span.
    const std::vector<double> u_grid = sixteenths(1, 20);
    const Domain box({512}, Boundary::Absorbing);
    std::vector<BreakpointEstimate> breakpoints;
    for (const auto& family : families) {
        const DriveCurve retention = family_drive(
            box, 1.0, kernel, family, u_grid, 20,
            rng::combine(kSeed + 11, breakpoints.size()), options);
        breakpoints.push_back(estimate_zeta_c(retention, 200, kSeed + 12));
    }

    bool breakpoints_ok = true;
    double worst_gap = 0.0;
    for (std::size_t a = 0; a < breakpoints.size(); ++a) {
        for (std::size_t b = a + 1; b < breakpoints.size(); ++b) {
            const double gap = std::abs(breakpoints[a].c - breakpoints[b].c);
            worst_gap = std::max(worst_gap, gap);
            if (gap > 0.05) breakpoints_ok = false;
        }
    }

    // Below the transition the divergence proxy (L -> 2L growth of the mean
    // odometer) must agree across families; the explosive point must cap for
    // every family alike.
    bool growth_ok = true;
    bool capped_ok = true;
    double worst_z = 0.0;
    const std::size_t compare_at[] = {0, 3, 7};  // densities 1/16, 4/16, 8/16
    for (const UniversalityPair& pair : report_data.pairs) {
        for (const std::size_t g : compare_at) {
            worst_z = std::max(worst_z, pair.growth_z[g]);
            if (pair.growth_z[g] > 3.0) growth_ok = false;
        }
        if (pair.capped_difference.back() != 0.0) capped_ok = false;
    }
    for (const FamilyScan& fs : report_data.families) {
        if (fs.scan_small.stats.back().capped_fraction != 1.0) capped_ok = false;
        if (fs.scan_large.stats.back().capped_fraction != 1.0) capped_ok = false;
    }

    const bool ok = breakpoints_ok && growth_ok && capped_ok;
    char numbers[200];
    std::snprintf(numbers, sizeof numbers,
                  "breakpoints %.4f/%.4f/%.4f (worst gap %.4f); worst growth z %.2f; "
                  "explosive point capped for all: %s",
                  breakpoints[0].c, breakpoints[1].c, breakpoints[2].c, worst_gap,
                  worst_z, capped_ok ? "yes" : "no");
    report(9, "universality-proxy", ok, numbers, timer.seconds());
    CHECK(breakpoints_ok);
    CHECK(growth_ok);
    CHECK(capped_ok);
}

TEST_CASE("criterion 10: pigeonhole explosivity") {
    Timer timer;
    const auto result = selftest::pigeonhole_suite(100, kSeed + 5, 2);
    CHECK(suite_criterion(10, "pigeonhole", result, timer.seconds()));
}
