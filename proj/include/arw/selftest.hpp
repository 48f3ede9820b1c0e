#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace arw::selftest {

struct SuiteResult {
    std::string name;
    std::int64_t instances = 0;
    std::int64_t passed = 0;
    std::string detail;  // first failure, when any

    bool ok() const { return instances > 0 && passed == instances; }
};

// Property suites over randomized instances.  Instance draws stay inside
// d in {1,2}, L <= 16, zeta <= 1, lambda in {0.1, 1, 10}, weighted toward
// parameter combinations whose finite-volume stabilization terminates, since
// every check below compares completed stabilizations.

/// Four schedulers, identical final configuration and odometer, exact.
SuiteResult abelian_suite(std::int64_t instances, std::uint64_t seed, int threads = 0);

/// Randomized forced-wake acceptable stabilizing sequences dominate the
/// canonical odometer pointwise.
SuiteResult least_action_suite(std::int64_t instances, std::uint64_t seed, int threads = 0);

/// Nested volumes and configurations give pointwise-ordered odometers.
SuiteResult monotonicity_suite(std::int64_t instances, std::uint64_t seed, int threads = 0);

/// Exact particle accounting: torus topplings conserve, absorbing runs
/// satisfy retained + dissipated = initial + added, and cached totals match
/// recounts.
SuiteResult conservation_suite(std::int64_t instances, std::uint64_t seed, int threads = 0);

/// Continuous-time transition counts equal the stabilizer's odometer, exact.
SuiteResult gillespie_suite(std::int64_t instances, std::uint64_t seed, int threads = 0);

/// Every instance with more particles than sites exhausts any toppling cap.
SuiteResult pigeonhole_suite(std::int64_t instances, std::uint64_t seed, int threads = 0);

/// The six suites above at their acceptance-criterion instance counts.
std::vector<SuiteResult> run_all(std::uint64_t seed, int threads = 0, double scale = 1.0);

}  // namespace arw::selftest
