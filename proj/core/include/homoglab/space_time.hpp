#pragma once

// Time-frequency grids and space-time fields on the periodic box.

#include <vector>

#include "homoglab/box_grid.hpp"
#include "homoglab/torus_spectral.hpp"

namespace homoglab {

/// Samples t_i = i dt on [0, T), i < S = 2J, and frequencies k_j = 2 pi j / T
/// for j in [-J, J). Frequencies are stored at slot s = j + J.
class TimeGrid {
public:
    /// horizon <= 0 selects T = 16 / nu.
    explicit TimeGrid(double nu, double horizon = 0.0, int half_window = 64);

    double nu() const noexcept { return nu_; }
    double horizon() const noexcept { return horizon_; }
    int half_window() const noexcept { return half_window_; }
    int size() const noexcept { return 2 * half_window_; }
    double dt() const noexcept { return horizon_ / size(); }
    /// Frequency spacing 2 pi / T; the weight of each slot in the frequency-side norm.
    double dk() const noexcept { return two_pi / horizon_; }

    double time(int i) const noexcept { return i * dt(); }
    double k(int slot) const noexcept { return (slot - half_window_) * dk(); }
    Complex lambda(int slot) const noexcept { return {nu_, k(slot)}; }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double nu_;
    double horizon_;
    int half_window_;
};

/// Spatial frequency-domain box fields, one per time-frequency slot.
class SpaceTimeField {
public:
    SpaceTimeField(BoxGrid box, TimeGrid time, int components);

    const BoxGrid& box() const noexcept { return box_; }
    const TimeGrid& time() const noexcept { return time_; }
    int components() const noexcept { return components_; }
    torus::CellGrid grid() const { return box_.grid(); }

    torus::SpectralField& slice(int slot) { return slices_.at(std::size_t(slot)); }
    const torus::SpectralField& slice(int slot) const { return slices_.at(std::size_t(slot)); }
    bool slice_is_zero(int slot) const;

    SpaceTimeField& operator+=(const SpaceTimeField& other);
    SpaceTimeField& operator-=(const SpaceTimeField& other);
    SpaceTimeField& operator*=(Complex s);

private:
    void require_compatible(const SpaceTimeField& other) const;

    BoxGrid box_;
    TimeGrid time_;
    int components_;
    std::vector<torus::SpectralField> slices_;
};

SpaceTimeField operator+(SpaceTimeField a, const SpaceTimeField& b);
SpaceTimeField operator-(SpaceTimeField a, const SpaceTimeField& b);
SpaceTimeField operator*(Complex s, SpaceTimeField a);

} // namespace homoglab
