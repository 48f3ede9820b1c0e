#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arw/configuration.hpp"
#include "arw/instruction_field.hpp"
#include "arw/odometer.hpp"

namespace arw {

/// Legal: the site holds at least one active particle.
inline bool is_legal(const Configuration& config, std::int64_t site) {
    return config.state(site).is_active();
}

/// Acceptable: the site holds any particle; toppling a sleeping site wakes
/// and moves it (or puts it back to sleep) even though that is not legal.
inline bool is_acceptable(const Configuration& config, std::int64_t site) {
    return !config.state(site).is_empty();
}

struct ToppleEffect {
    enum class Kind { Slept, Moved, Exited };
    std::int64_t site;
    Kind kind;
    std::int64_t target;   // only for Moved
    bool was_legal;        // site was active when toppled
    bool state_changed;    // sleep on a crowd or a sleeping site is a no-op
};

/// Applies the next unconsumed instruction at `site` (index odometer+1) and
/// advances the odometer.  Returns nullopt, leaving everything untouched,
/// when the toppling is not acceptable.
std::optional<ToppleEffect> topple(Configuration& config, Odometer& odometer,
                                   const InstructionField& field, std::int64_t site);

enum class Scheduler { Fifo, RasterSweep, RandomUnstable, Wavefront };

std::string scheduler_name(Scheduler s);
Scheduler scheduler_from_name(const std::string& name);

struct StabilizeOptions {
    Scheduler scheduler = Scheduler::Fifo;
    std::uint64_t cap = 0;             // 0 = 10^6 x |V|
    std::uint64_t scheduler_seed = 0;  // RandomUnstable pick stream
    bool record_order = false;
};

struct StabilizeReport {
    enum class Termination { Stable, CapExceeded };
    Termination termination = Termination::Stable;
    std::uint64_t topplings = 0;
    std::uint64_t dissipated = 0;
    std::uint64_t slept = 0;     // transitions that left a site sleeping
    std::uint64_t jumps = 0;     // jump instructions applied
    std::uint64_t cap = 0;
    std::vector<std::int64_t> order;  // toppling order, when recorded

    bool stable() const { return termination == Termination::Stable; }
};

/// Performs legal topplings of sites in `volume` (all sites when null) until
/// none is active, in the order picked by the scheduler.  By the Abelian
/// property the final configuration and odometer increment do not depend on
/// that order; the increment is the canonical stabilizing odometer of the
/// volume.  Particles landing outside the volume but inside the domain stay
/// where they land, untoppled.
StabilizeReport stabilize(Configuration& config, Odometer& odometer,
                          const InstructionField& field,
                          const std::vector<std::int64_t>* volume = nullptr,
                          const StabilizeOptions& options = {});

struct SequenceStep {
    enum class Kind { Legal, AcceptableOnly, Invalid };
    std::int64_t site;
    Kind kind;
};

struct SequenceResult {
    std::vector<SequenceStep> steps;
    std::optional<std::size_t> abort_index;  // first non-acceptable toppling
    bool all_legal = true;

    bool acceptable() const { return !abort_index.has_value(); }
};

/// Topples the sites of `alpha` in order, stopping at the first step that is
/// not acceptable.
SequenceResult apply_sequence(Configuration& config, Odometer& odometer,
                              const InstructionField& field,
                              std::span<const std::int64_t> alpha);

struct LeastActionVerdict {
    enum class Result { Pass, Fail, InvalidInput };
    Result result;
    std::string detail;
    std::int64_t violations = 0;
};

/// Checks the Least Action Principle on one instance: for an acceptable
/// sequence `alpha` that stabilizes `eta` in the volume, the canonical legal
/// odometer is pointwise bounded by the toppling counts of `alpha`.
LeastActionVerdict check_least_action(const Configuration& eta,
                                      const InstructionField& field,
                                      const std::vector<std::int64_t>* volume,
                                      std::span<const std::int64_t> alpha);

}  // namespace arw
