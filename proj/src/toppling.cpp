#include "arw/toppling.hpp"

#include <algorithm>
#include <stdexcept>

namespace arw {

namespace {

constexpr std::uint64_t kDefaultCapPerSite = 1'000'000;

// Resolved jump targets for every (site, kernel entry); kNoTarget marks a
// jump out of an absorbing box.
constexpr std::int64_t kNoTarget = -1;

std::vector<std::int64_t> build_target_table(const Domain& domain, const JumpKernel& kernel) {
    const std::int64_t sites = domain.site_count();
    const std::size_t k = kernel.size();
    std::vector<std::int64_t> table(static_cast<std::size_t>(sites) * k);
    for (std::int64_t site = 0; site < sites; ++site) {
        for (std::size_t e = 0; e < k; ++e) {
            const auto target = domain.resolve_jump(site, kernel.entries()[e].offset);
            table[static_cast<std::size_t>(site) * k + e] = target ? *target : kNoTarget;
        }
    }
    return table;
}

struct AppliedInstruction {
    std::int64_t target;  // kNoTarget when dissipated or slept
    bool jumped;
    bool now_sleeping;
};

// Core toppling step used by the schedulers: the caller guarantees the site
// is non-empty and the target table matches the field's kernel.
inline AppliedInstruction apply_at(Configuration& config, Odometer& odometer,
                                   const InstructionField& field,
                                   const std::vector<std::int64_t>& targets,
                                   std::size_t kernel_size, std::int64_t site) {
    const Instruction ins = field.instruction_at(site, odometer.count(site) + 1);
    odometer.increment(site);
    const SiteState before = config.state(site);
    if (ins.is_sleep()) {
        const SiteState after = before.slept();
        config.set_state(site, after);
        return {kNoTarget, false, after.is_sleeping()};
    }
    config.set_state(site, before.decremented());
    const std::int64_t target =
        targets[static_cast<std::size_t>(site) * kernel_size +
                static_cast<std::size_t>(ins.entry)];
    if (target != kNoTarget)
        config.set_state(target, config.state(target).incremented());
    return {target, true, false};
}

}  // namespace

std::optional<ToppleEffect> topple(Configuration& config, Odometer& odometer,
                                   const InstructionField& field, std::int64_t site) {
    const SiteState before = config.state(site);
    if (before.is_empty()) return std::nullopt;
    const Instruction ins = field.instruction_at(site, odometer.count(site) + 1);
    odometer.increment(site);
    ToppleEffect effect;
    effect.site = site;
    effect.was_legal = before.is_active();
    effect.target = kNoTarget;
    if (ins.is_sleep()) {
        const SiteState after = before.slept();
        config.set_state(site, after);
        effect.kind = ToppleEffect::Kind::Slept;
        effect.state_changed = !(after == before);
    } else {
        config.set_state(site, before.decremented());
        const auto target = config.domain().resolve_jump(site, field.offset_of(ins));
        effect.state_changed = true;
        if (target) {
            config.set_state(*target, config.state(*target).incremented());
            effect.kind = ToppleEffect::Kind::Moved;
            effect.target = *target;
        } else {
            effect.kind = ToppleEffect::Kind::Exited;
        }
    }
    return effect;
}

std::string scheduler_name(Scheduler s) {
    switch (s) {
        case Scheduler::Fifo: return "fifo";
        case Scheduler::RasterSweep: return "raster";
        case Scheduler::RandomUnstable: return "random";
        case Scheduler::Wavefront: return "wavefront";
    }
    return "fifo";
}

Scheduler scheduler_from_name(const std::string& name) {
    if (name == "fifo") return Scheduler::Fifo;
    if (name == "raster") return Scheduler::RasterSweep;
    if (name == "random") return Scheduler::RandomUnstable;
    if (name == "wavefront") return Scheduler::Wavefront;
    throw std::invalid_argument("unknown scheduler '" + name +
                                "' (fifo|raster|random|wavefront)");
}

StabilizeReport stabilize(Configuration& config, Odometer& odometer,
                          const InstructionField& field,
                          const std::vector<std::int64_t>* volume,
                          const StabilizeOptions& options) {
    const std::int64_t n_sites = config.site_count();
    std::vector<std::int64_t> all_sites;
    if (!volume) {
        all_sites.resize(static_cast<std::size_t>(n_sites));
        for (std::int64_t i = 0; i < n_sites; ++i) all_sites[static_cast<std::size_t>(i)] = i;
    }
    const std::vector<std::int64_t>& sites = volume ? *volume : all_sites;

    std::vector<char> in_volume(static_cast<std::size_t>(n_sites), 0);
    for (std::int64_t s : sites) in_volume[static_cast<std::size_t>(s)] = 1;

    StabilizeReport report;
    report.cap = options.cap ? options.cap
                             : kDefaultCapPerSite * std::max<std::uint64_t>(1, sites.size());

    const auto targets = build_target_table(config.domain(), field.kernel());
    const std::size_t kernel_size = field.kernel().size();

    // One toppling of `site`, with report bookkeeping.
    auto step = [&](std::int64_t site) {
        const auto applied =
            apply_at(config, odometer, field, targets, kernel_size, site);
        ++report.topplings;
        if (applied.jumped) {
            ++report.jumps;
            if (applied.target == kNoTarget) ++report.dissipated;
        } else if (applied.now_sleeping) {
            ++report.slept;
        }
        if (options.record_order) report.order.push_back(site);
        return applied;
    };
    auto capped = [&] { return report.topplings >= report.cap; };

    switch (options.scheduler) {
        case Scheduler::Fifo:
        case Scheduler::Wavefront: {
            // Same bookkeeping, opposite ends of the work list: FIFO drains
            // oldest activity first, wavefront follows the newest.
            const bool lifo = options.scheduler == Scheduler::Wavefront;
            std::vector<std::int64_t> queue;
            std::vector<char> queued(static_cast<std::size_t>(n_sites), 0);
            std::size_t head = 0;
            auto enqueue = [&](std::int64_t s) {
                if (!queued[static_cast<std::size_t>(s)] &&
                    in_volume[static_cast<std::size_t>(s)] && is_legal(config, s)) {
                    queue.push_back(s);
                    queued[static_cast<std::size_t>(s)] = 1;
                }
            };
            for (std::int64_t s : sites) enqueue(s);
            while (head < queue.size()) {
                std::int64_t site;
                if (lifo) {
                    site = queue.back();
                    queue.pop_back();
                } else {
                    site = queue[head++];
                    // Drop the drained prefix once it dominates the buffer.
                    if (head > 4096 && head * 2 > queue.size()) {
                        queue.erase(queue.begin(),
                                    queue.begin() + static_cast<std::ptrdiff_t>(head));
                        head = 0;
                    }
                }
                queued[static_cast<std::size_t>(site)] = 0;
                if (!is_legal(config, site)) continue;
                if (capped()) { report.termination = StabilizeReport::Termination::CapExceeded; return report; }
                const auto applied = step(site);
                if (applied.target != kNoTarget) enqueue(applied.target);
                enqueue(site);
            }
            break;
        }
        case Scheduler::RasterSweep: {
            bool toppled = true;
            while (toppled) {
                toppled = false;
                for (std::int64_t site : sites) {
                    if (!is_legal(config, site)) continue;
                    if (capped()) { report.termination = StabilizeReport::Termination::CapExceeded; return report; }
                    step(site);
                    toppled = true;
                }
            }
            break;
        }
        case Scheduler::RandomUnstable: {
            rng::CounterStream picks(options.scheduler_seed ? options.scheduler_seed
                                                            : field.seed(),
                                     rng::kPurposeScheduler);
            std::vector<std::int64_t> active;
            std::vector<std::int64_t> slot(static_cast<std::size_t>(n_sites), -1);
            auto track = [&](std::int64_t s) {
                if (slot[static_cast<std::size_t>(s)] < 0 &&
                    in_volume[static_cast<std::size_t>(s)] && is_legal(config, s)) {
                    slot[static_cast<std::size_t>(s)] =
                        static_cast<std::int64_t>(active.size());
                    active.push_back(s);
                }
            };
            auto untrack = [&](std::int64_t s) {
                const std::int64_t i = slot[static_cast<std::size_t>(s)];
                if (i < 0) return;
                const std::int64_t last = active.back();
                active[static_cast<std::size_t>(i)] = last;
                slot[static_cast<std::size_t>(last)] = i;
                active.pop_back();
                slot[static_cast<std::size_t>(s)] = -1;
            };
            for (std::int64_t s : sites) track(s);
            while (!active.empty()) {
                if (capped()) { report.termination = StabilizeReport::Termination::CapExceeded; return report; }
                const std::int64_t site = active[static_cast<std::size_t>(
                    picks.next_below(active.size()))];
                const auto applied = step(site);
                if (!is_legal(config, site)) untrack(site);
                if (applied.target != kNoTarget) track(applied.target);
            }
            break;
        }
    }
    report.termination = StabilizeReport::Termination::Stable;
    return report;
}

SequenceResult apply_sequence(Configuration& config, Odometer& odometer,
                              const InstructionField& field,
                              std::span<const std::int64_t> alpha) {
    SequenceResult result;
    result.steps.reserve(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const std::int64_t site = alpha[i];
        SequenceStep step{site, SequenceStep::Kind::Invalid};
        if (site >= 0 && site < config.site_count()) {
            const SiteState before = config.state(site);
            if (before.is_active())
                step.kind = SequenceStep::Kind::Legal;
            else if (before.is_sleeping())
                step.kind = SequenceStep::Kind::AcceptableOnly;
        }
        if (step.kind == SequenceStep::Kind::Invalid) {
            result.steps.push_back(step);
            result.abort_index = i;
            result.all_legal = false;
            return result;
        }
        if (step.kind == SequenceStep::Kind::AcceptableOnly) result.all_legal = false;
        topple(config, odometer, field, site);
        result.steps.push_back(step);
    }
    return result;
}

LeastActionVerdict check_least_action(const Configuration& eta,
                                      const InstructionField& field,
                                      const std::vector<std::int64_t>* volume,
                                      std::span<const std::int64_t> alpha) {
    Configuration after_alpha = eta;
    Odometer m_alpha(eta.domain());
    const SequenceResult seq = apply_sequence(after_alpha, m_alpha, field, alpha);
    if (!seq.acceptable()) {
        return {LeastActionVerdict::Result::InvalidInput,
                "sequence is not acceptable at step " + std::to_string(*seq.abort_index),
                0};
    }
    const auto stable_in = [&](std::int64_t site) { return !after_alpha.state(site).is_active(); };
    if (volume) {
        for (std::int64_t site : *volume)
            if (!stable_in(site))
                return {LeastActionVerdict::Result::Fail,
                        "sequence does not stabilize the volume", 0};
    } else {
        for (std::int64_t site = 0; site < after_alpha.site_count(); ++site)
            if (!stable_in(site))
                return {LeastActionVerdict::Result::Fail,
                        "sequence does not stabilize the configuration", 0};
    }

    Configuration canonical = eta;
    Odometer m(eta.domain());
    const StabilizeReport rep = stabilize(canonical, m, field, volume);
    if (!rep.stable())
        return {LeastActionVerdict::Result::InvalidInput,
                "legal stabilization exceeded its toppling cap", 0};
    const std::int64_t violations = m.violations_above(m_alpha);
    if (violations > 0)
        return {LeastActionVerdict::Result::Fail,
                "canonical odometer exceeds the sequence's toppling counts",
                violations};
    return {LeastActionVerdict::Result::Pass, "", 0};
}

}  // namespace arw
