#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "arw/domain.hpp"
#include "arw/site_state.hpp"

namespace arw {

/// A site state for every site of a finite domain, with cached particle and
/// active-particle totals.
class Configuration {
public:
    explicit Configuration(Domain domain)
        : domain_(std::move(domain)),
          states_(static_cast<std::size_t>(domain_.site_count())) {}

    const Domain& domain() const { return domain_; }
    std::int64_t site_count() const { return domain_.site_count(); }

    SiteState state(std::int64_t site) const {
        return states_[static_cast<std::size_t>(site)];
    }

    void set_state(std::int64_t site, SiteState next) {
        SiteState& slot = states_[static_cast<std::size_t>(site)];
        particle_total_ += next.particles() - slot.particles();
        active_total_ += next.active_particles() - slot.active_particles();
        slot = next;
    }

    std::int64_t particle_total() const { return particle_total_; }
    std::int64_t active_total() const { return active_total_; }
    double density() const {
        return static_cast<double>(particle_total_) / static_cast<double>(site_count());
    }

    /// Recount both totals from scratch; the invariant is that these always
    /// match the cached values.
    std::pair<std::int64_t, std::int64_t> recompute_totals() const {
        std::int64_t particles = 0;
        std::int64_t active = 0;
        for (const SiteState& s : states_) {
            particles += s.particles();
            active += s.active_particles();
        }
        return {particles, active};
    }

    bool totals_consistent() const {
        return recompute_totals() == std::pair{particle_total_, active_total_};
    }

    bool operator==(const Configuration& other) const {
        return domain_ == other.domain_ && states_ == other.states_;
    }

private:
    Domain domain_;
    std::vector<SiteState> states_;
    std::int64_t particle_total_ = 0;
    std::int64_t active_total_ = 0;
};

}  // namespace arw
