#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace arw {

enum class Boundary { Torus, Absorbing };

std::string boundary_name(Boundary b);
Boundary boundary_from_name(const std::string& name);

/// Finite box of Z^d with either periodic (torus) or particle-absorbing
/// boundary.  Sites are addressed by raster index: coordinate 0 varies
/// fastest.
class Domain {
public:
    Domain(std::vector<std::int32_t> sides, Boundary boundary);

    std::int32_t dim() const { return static_cast<std::int32_t>(sides_.size()); }
    const std::vector<std::int32_t>& sides() const { return sides_; }
    std::int32_t side(std::int32_t axis) const { return sides_[axis]; }
    Boundary boundary() const { return boundary_; }
    std::int64_t site_count() const { return site_count_; }

    std::int64_t index_of(std::span<const std::int32_t> coords) const;
    void coords_of(std::int64_t index, std::span<std::int32_t> out) const;

    /// Where a particle jumping from `site` by `offset` lands; nullopt means
    /// it left an absorbing box and is gone.
    std::optional<std::int64_t> resolve_jump(std::int64_t site,
                                             std::span<const std::int32_t> offset) const;

    /// Key mixing the raster geometry (dimension and side lengths) into
    /// deterministic per-site streams.
    std::uint64_t geometry_key() const { return geometry_key_; }

    std::string describe() const;

    bool operator==(const Domain& other) const {
        return sides_ == other.sides_ && boundary_ == other.boundary_;
    }

private:
    std::vector<std::int32_t> sides_;
    std::vector<std::int64_t> strides_;
    Boundary boundary_;
    std::int64_t site_count_;
    std::uint64_t geometry_key_;
};

}  // namespace arw
