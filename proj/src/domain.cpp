#include "arw/domain.hpp"

#include <sstream>
#include <stdexcept>

#include "arw/rng.hpp"

namespace arw {

std::string boundary_name(Boundary b) {
    return b == Boundary::Torus ? "torus" : "absorbing";
}

Boundary boundary_from_name(const std::string& name) {
    if (name == "torus") return Boundary::Torus;
    if (name == "absorbing") return Boundary::Absorbing;
    throw std::invalid_argument("unknown boundary '" + name + "' (torus|absorbing)");
}

Domain::Domain(std::vector<std::int32_t> sides, Boundary boundary)
    : sides_(std::move(sides)), boundary_(boundary) {
    if (sides_.empty()) throw std::invalid_argument("domain needs at least one axis");
    site_count_ = 1;
    strides_.resize(sides_.size());
    for (std::size_t axis = 0; axis < sides_.size(); ++axis) {
        if (sides_[axis] < 1)
            throw std::invalid_argument("domain side lengths must be positive");
        strides_[axis] = site_count_;
        site_count_ *= sides_[axis];
    }
    std::uint64_t key = rng::mix64(static_cast<std::uint64_t>(sides_.size()));
    for (std::int32_t side : sides_)
        key = rng::combine(key, static_cast<std::uint64_t>(side));
    geometry_key_ = key;
}

std::int64_t Domain::index_of(std::span<const std::int32_t> coords) const {
    std::int64_t index = 0;
    for (std::size_t axis = 0; axis < sides_.size(); ++axis)
        index += strides_[axis] * coords[axis];
    return index;
}

void Domain::coords_of(std::int64_t index, std::span<std::int32_t> out) const {
    for (std::size_t axis = 0; axis < sides_.size(); ++axis) {
        out[axis] = static_cast<std::int32_t>(index % sides_[axis]);
        index /= sides_[axis];
    }
}

std::optional<std::int64_t> Domain::resolve_jump(
    std::int64_t site, std::span<const std::int32_t> offset) const {
    std::int64_t index = 0;
    std::int64_t rest = site;
    for (std::size_t axis = 0; axis < sides_.size(); ++axis) {
        const std::int32_t side = sides_[axis];
        std::int64_t c = rest % side + offset[axis];
        rest /= side;
        if (boundary_ == Boundary::Torus) {
            c %= side;
            if (c < 0) c += side;
        } else if (c < 0 || c >= side) {
            return std::nullopt;
        }
        index += strides_[axis] * c;
    }
    return index;
}

std::string Domain::describe() const {
    std::ostringstream out;
    out << "d=" << dim() << " L=";
    for (std::size_t axis = 0; axis < sides_.size(); ++axis) {
        if (axis) out << ',';
        out << sides_[axis];
    }
    out << " boundary=" << boundary_name(boundary_);
    return out.str();
}

}  // namespace arw
