#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace arw {

/// Finite-support jump distribution p(.) on Z^d.  A kernel is accepted only
/// if its probabilities sum to 1 and its support generates all of Z^d, not a
/// proper sublattice.
class JumpKernel {
public:
    struct Entry {
        std::vector<std::int32_t> offset;
        double prob;
    };

    JumpKernel(std::string id, std::int32_t dim, std::vector<Entry> entries);

    /// Symmetric nearest-neighbor kernel, probability 1/(2d) per direction.
    static JumpKernel nearest_neighbor(std::int32_t dim);
    /// d=1 kernel with P(+1) = bias, P(-1) = 1 - bias.
    static JumpKernel biased_1d(double bias);
    /// Resolve "nn" / "biased:<p>" / a kernel file path.
    static JumpKernel from_spec(const std::string& spec, std::int32_t dim);
    /// One entry per line: d offset coordinates then a probability.
    static JumpKernel parse(const std::string& text, std::int32_t dim, std::string id);

    const std::string& id() const { return id_; }
    std::int32_t dim() const { return dim_; }
    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    /// nullopt when the kernel is valid, otherwise the failed condition.
    static std::optional<std::string> validate(std::int32_t dim,
                                               const std::vector<Entry>& entries);

private:
    std::string id_;
    std::int32_t dim_;
    std::vector<Entry> entries_;
};

/// Index of the lattice generated by `vectors` inside Z^d: 1 means the whole
/// lattice, >1 a proper sublattice, nullopt rank-deficient.  Exact integer
/// arithmetic throughout.
std::optional<std::int64_t> lattice_index(std::int32_t dim,
                                          const std::vector<std::vector<std::int32_t>>& vectors);

}  // namespace arw
