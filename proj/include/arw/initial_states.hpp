#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arw/configuration.hpp"

namespace arw {

enum class Family { Poisson, Bernoulli, PeriodicPattern, BlockRenewal };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

/// Recipe for a spatially ergodic initial distribution with a prescribed
/// particle density.  All families produce active configurations only.
struct InitialStateSpec {
    Family family = Family::Poisson;
    double zeta = 0.0;
    std::uint64_t seed = 0;

    /// PeriodicPattern: per-site occupancies of one period.  Empty means
    /// synthesize a pattern matching zeta for the target domain.
    std::vector<std::int32_t> pattern;

    /// BlockRenewal: half-length m of the 2m blocks (dense run then empty run).
    std::int32_t block_half = 4;

    InitialStateSpec with_seed(std::uint64_t s) const {
        InitialStateSpec out = *this;
        out.seed = s;
        return out;
    }
};

/// Draws a configuration from the family's law on the given domain.
/// Deterministic in (spec, domain); the sampling streams are hash-separated
/// from the instruction field.
Configuration generate(const InitialStateSpec& spec, const Domain& domain);

/// Particles per site.
double measured_density(const Configuration& config);

/// Smallest period P <= limit dividing every side, with zeta*P integral
/// (tolerance 1e-9); throws when none exists.
std::vector<std::int32_t> synthesize_pattern(double zeta, const Domain& domain);

}  // namespace arw
