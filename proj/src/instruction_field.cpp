#include "arw/instruction_field.hpp"

#include <stdexcept>

#include "arw/odometer.hpp"

namespace arw {

InstructionField::InstructionField(std::uint64_t seed, double lambda,
                                   JumpKernel kernel, Domain domain)
    : seed_(seed), lambda_(lambda), kernel_(std::move(kernel)), domain_(std::move(domain)) {
    if (!(lambda_ > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (kernel_.dim() != domain_.dim())
        throw std::invalid_argument("kernel and domain dimensions differ");
    // Cumulative table: [0, c0) sleep, [c_{i}, c_{i+1}) kernel entry i.
    cumulative_.reserve(kernel_.size() + 1);
    double acc = lambda_ / (1.0 + lambda_);
    cumulative_.push_back(acc);
    for (const auto& entry : kernel_.entries()) {
        acc += entry.prob / (1.0 + lambda_);
        cumulative_.push_back(acc);
    }
    cumulative_.back() = 1.0;  // absorb rounding in the last bin
    stream_key_ = rng::combine(domain_.geometry_key(), rng::kPurposeInstructions);
}

Instruction InstructionField::instruction_at(std::int64_t site, std::uint64_t index) const {
    if (index == 0)
        throw std::invalid_argument("instruction indices start at 1");
    const std::uint64_t counter = shift_at(site) + index;
    const rng::Block block =
        rng::threefry2x64(static_cast<std::uint64_t>(site), counter, seed_, stream_key_);
    const double u = rng::to_unit(block.x0);
    if (u < cumulative_[0]) return Instruction::sleep();
    // Kernel supports are tiny; a linear scan beats a binary search here.
    for (std::size_t i = 1; i < cumulative_.size(); ++i)
        if (u < cumulative_[i]) return Instruction::jump(static_cast<std::int32_t>(i - 1));
    return Instruction::jump(static_cast<std::int32_t>(kernel_.size() - 1));
}

InstructionField InstructionField::shifted(const Odometer& h0) const {
    if (h0.site_count() != domain_.site_count())
        throw std::invalid_argument("shift odometer does not match the field's domain");
    auto combined = std::make_shared<std::vector<std::uint64_t>>(
        static_cast<std::size_t>(domain_.site_count()));
    for (std::int64_t site = 0; site < domain_.site_count(); ++site)
        (*combined)[static_cast<std::size_t>(site)] = shift_at(site) + h0.count(site);
    InstructionField out = *this;
    out.shift_ = std::move(combined);
    return out;
}

InstructionField shifted_field(const InstructionField& field, const Odometer& h0) {
    return field.shifted(h0);
}

}  // namespace arw
