#pragma once

#include <cstdint>
#include <vector>

#include "arw/domain.hpp"

namespace arw {

/// Per-site toppling counter.
class Odometer {
public:
    explicit Odometer(const Domain& domain)
        : counts_(static_cast<std::size_t>(domain.site_count())) {}

    std::uint64_t count(std::int64_t site) const {
        return counts_[static_cast<std::size_t>(site)];
    }
    void increment(std::int64_t site) { ++counts_[static_cast<std::size_t>(site)]; }
    void set_count(std::int64_t site, std::uint64_t value) {
        counts_[static_cast<std::size_t>(site)] = value;
    }

    std::int64_t site_count() const { return static_cast<std::int64_t>(counts_.size()); }

    std::uint64_t total() const {
        std::uint64_t sum = 0;
        for (std::uint64_t c : counts_) sum += c;
        return sum;
    }
    std::uint64_t max() const {
        std::uint64_t best = 0;
        for (std::uint64_t c : counts_)
            if (c > best) best = c;
        return best;
    }

    void add(const Odometer& other) {
        for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    }

    /// Number of sites where this odometer exceeds `other`; 0 means the
    /// pointwise inequality this <= other holds.
    std::int64_t violations_above(const Odometer& other) const {
        std::int64_t n = 0;
        for (std::size_t i = 0; i < counts_.size(); ++i)
            if (counts_[i] > other.counts_[i]) ++n;
        return n;
    }
    bool pointwise_leq(const Odometer& other) const { return violations_above(other) == 0; }

    bool operator==(const Odometer&) const = default;

private:
    std::vector<std::uint64_t> counts_;
};

}  // namespace arw
