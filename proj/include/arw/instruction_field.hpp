#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "arw/domain.hpp"
#include "arw/jump_kernel.hpp"
#include "arw/rng.hpp"

namespace arw {

class Odometer;

/// One instruction of a per-site stack: either "try to sleep" or "jump by
/// the kernel entry at `entry`".
struct Instruction {
    std::int32_t entry;  // -1 = sleep, otherwise an index into the kernel table

    bool is_sleep() const { return entry < 0; }
    static Instruction sleep() { return {-1}; }
    static Instruction jump(std::int32_t kernel_entry) { return {kernel_entry}; }
    bool operator==(const Instruction&) const = default;
};

/// Deterministic realization of the i.i.d. instruction field: the j-th
/// instruction at site x is a pure function of (seed, geometry, x, j).
/// Marginally, an instruction is a sleep with probability lambda/(1+lambda)
/// and a jump by offset o with probability p(o)/(1+lambda); the cumulative
/// lookup table is ordered sleep first, then kernel entries in file order.
///
/// A per-site shift realizes the field with its first shift(x) instructions
/// deleted; shifted fields share the tail of the parent stream bit for bit.
class InstructionField {
public:
    InstructionField(std::uint64_t seed, double lambda, JumpKernel kernel, Domain domain);

    Instruction instruction_at(std::int64_t site, std::uint64_t index) const;

    /// Field with the first h0(x) instructions deleted at each site, on top
    /// of any existing shift.
    InstructionField shifted(const Odometer& h0) const;

    std::uint64_t seed() const { return seed_; }
    double lambda() const { return lambda_; }
    const JumpKernel& kernel() const { return kernel_; }
    const Domain& domain() const { return domain_; }
    double sleep_probability() const { return lambda_ / (1.0 + lambda_); }
    std::uint64_t shift_at(std::int64_t site) const {
        return shift_ ? (*shift_)[static_cast<std::size_t>(site)] : 0;
    }

    /// Offset of a jump instruction, as a view into the kernel table.
    std::span<const std::int32_t> offset_of(Instruction ins) const {
        return kernel_.entries()[static_cast<std::size_t>(ins.entry)].offset;
    }

private:
    std::uint64_t seed_;
    double lambda_;
    JumpKernel kernel_;
    Domain domain_;
    std::shared_ptr<const std::vector<std::uint64_t>> shift_;  // null means all-zero
    std::vector<double> cumulative_;
    std::uint64_t stream_key_;
};

InstructionField shifted_field(const InstructionField& field, const Odometer& h0);

}  // namespace arw
