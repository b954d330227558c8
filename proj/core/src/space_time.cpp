#include "homoglab/space_time.hpp"

#include <algorithm>

namespace homoglab {

TimeGrid::TimeGrid(double nu, double horizon, int half_window)
    : nu_(nu), horizon_(horizon > 0.0 ? horizon : 16.0 / nu), half_window_(half_window) {
    if (!(nu > 0.0)) throw DomainError("TimeGrid: nu must be positive");
    if (half_window < 1) throw DomainError("TimeGrid: half window must be positive");
}

SpaceTimeField::SpaceTimeField(BoxGrid box, TimeGrid time, int components)
    : box_(box), time_(time), components_(components) {
    if (components < 1) throw DomainError("SpaceTimeField: need at least one component");
    slices_.reserve(std::size_t(time.size()));
    for (int s = 0; s < time.size(); ++s)
        slices_.emplace_back(box.grid(), components, torus::Domain::frequency);
}

bool SpaceTimeField::slice_is_zero(int slot) const {
    const auto v = slice(slot).values();
    return std::all_of(v.begin(), v.end(), [](const Complex& x) { return x == Complex{}; });
}

void SpaceTimeField::require_compatible(const SpaceTimeField& other) const {
    if (!(box_ == other.box_) || !(time_ == other.time_) || components_ != other.components_)
        throw DomainError("SpaceTimeField: incompatible operands");
}

SpaceTimeField& SpaceTimeField::operator+=(const SpaceTimeField& other) {
    require_compatible(other);
    for (std::size_t s = 0; s < slices_.size(); ++s) slices_[s] += other.slices_[s];
    return *this;
}

SpaceTimeField& SpaceTimeField::operator-=(const SpaceTimeField& other) {
    require_compatible(other);
    for (std::size_t s = 0; s < slices_.size(); ++s) slices_[s] -= other.slices_[s];
    return *this;
}

SpaceTimeField& SpaceTimeField::operator*=(Complex s) {
    for (auto& slice : slices_) slice *= s;
    return *this;
}

SpaceTimeField operator+(SpaceTimeField a, const SpaceTimeField& b) { return a += b; }
SpaceTimeField operator-(SpaceTimeField a, const SpaceTimeField& b) { return a -= b; }
SpaceTimeField operator*(Complex s, SpaceTimeField a) { return a *= s; }

} // namespace homoglab
