#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace arw {

/// Contents of one lattice site: empty, a single sleeping particle, or
/// n >= 1 active particles.  The total order is
/// Empty < Sleeping < Active(1) < Active(2) < ...
class SiteState {
public:
    enum class Tag : std::uint8_t { Empty, Sleeping, Active };

    constexpr SiteState() : tag_(Tag::Empty), count_(0) {}

    static constexpr SiteState empty() { return SiteState(); }
    static constexpr SiteState sleeping() { return SiteState(Tag::Sleeping, 1); }
    static SiteState active(std::int32_t n) {
        if (n < 1) throw std::domain_error("active site needs n >= 1 particles");
        return SiteState(Tag::Active, n);
    }

    constexpr Tag tag() const { return tag_; }
    constexpr bool is_empty() const { return tag_ == Tag::Empty; }
    constexpr bool is_sleeping() const { return tag_ == Tag::Sleeping; }
    constexpr bool is_active() const { return tag_ == Tag::Active; }

    /// Number of particles on the site, counting a sleeping one as 1.
    constexpr std::int32_t particles() const { return count_; }

    /// Number of active particles; a sleeping particle does not count.
    constexpr std::int32_t active_particles() const {
        return tag_ == Tag::Active ? count_ : 0;
    }

    /// Arrival of one particle.  A sleeping particle is woken.
    constexpr SiteState incremented() const {
        switch (tag_) {
            case Tag::Empty:    return SiteState(Tag::Active, 1);
            case Tag::Sleeping: return SiteState(Tag::Active, 2);
            case Tag::Active:   return SiteState(Tag::Active, count_ + 1);
        }
        return SiteState();
    }

    /// Departure of one particle.  Departing from a sleeping site empties it.
    SiteState decremented() const {
        switch (tag_) {
            case Tag::Empty:
                throw std::domain_error("decrement of an empty site is not acceptable");
            case Tag::Sleeping: return SiteState();
            case Tag::Active:
                return count_ == 1 ? SiteState() : SiteState(Tag::Active, count_ - 1);
        }
        return SiteState();
    }

    /// Effect of a sleep instruction: a lone active particle falls asleep,
    /// a crowd ignores it, a sleeping particle stays asleep.
    SiteState slept() const {
        switch (tag_) {
            case Tag::Empty:
                throw std::domain_error("sleep instruction on an empty site is not acceptable");
            case Tag::Sleeping: return sleeping();
            case Tag::Active:
                return count_ == 1 ? sleeping() : SiteState(Tag::Active, count_);
        }
        return SiteState();
    }

    // Rank realizing Empty < Sleeping < Active(1) < Active(2) < ...
    constexpr std::int64_t order_rank() const {
        return 2 * static_cast<std::int64_t>(count_) - (tag_ == Tag::Sleeping ? 1 : 0);
    }

    friend constexpr bool operator==(SiteState a, SiteState b) {
        return a.tag_ == b.tag_ && a.count_ == b.count_;
    }
    friend constexpr std::strong_ordering operator<=>(SiteState a, SiteState b) {
        return a.order_rank() <=> b.order_rank();
    }

    /// Snapshot token: "0", "s", or the particle count.
    std::string token() const {
        switch (tag_) {
            case Tag::Empty:    return "0";
            case Tag::Sleeping: return "s";
            case Tag::Active:   return std::to_string(count_);
        }
        return "0";
    }

private:
    constexpr SiteState(Tag t, std::int32_t n) : tag_(t), count_(n) {}

    Tag tag_;
    std::int32_t count_;
};

inline std::int32_t particle_count(SiteState s) { return s.particles(); }
inline std::int32_t active_count(SiteState s) { return s.active_particles(); }
inline SiteState site_increment(SiteState s) { return s.incremented(); }
inline SiteState site_decrement(SiteState s) { return s.decremented(); }
inline SiteState site_sleep(SiteState s) { return s.slept(); }

}  // namespace arw
