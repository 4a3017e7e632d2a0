#pragma once

#include "tvws/units.hpp"

#include <cstddef>

namespace tvws {

// Channel geometry over [f_min, f_max). Channel k covers
// [f_min + k*width, f_min + (k+1)*width).
class BandPlan {
public:
    Hz f_min() const noexcept { return f_min_; }
    Hz f_max() const noexcept { return f_max_; }
    Hz channel_width() const noexcept { return channel_width_; }
    std::size_t channel_count() const noexcept { return channel_count_; }

    Hz channel_start(std::size_t k) const;
    Hz channel_end(std::size_t k) const { return channel_start(k) + channel_width_; }

    bool operator==(const BandPlan&) const = default;

private:
    friend BandPlan make_bandplan(Hz, Hz, Hz);
    BandPlan(Hz f_min, Hz f_max, Hz width, std::size_t count)
        : f_min_(f_min), f_max_(f_max), channel_width_(width), channel_count_(count) {}

    Hz f_min_;
    Hz f_max_;
    Hz channel_width_;
    std::size_t channel_count_;
};

// Throws ConfigError when the range is empty, the width is not positive, or
// the range is not a whole number of channels.
BandPlan make_bandplan(Hz f_min, Hz f_max, Hz channel_width);

// Index of the channel holding `f`; boundaries belong to the upper channel.
// Throws OutOfBandError outside [f_min, f_max).
std::size_t channel_of(const BandPlan& plan, Hz f);

// channel_width / step, or ConfigError when it does not divide.
std::size_t samples_per_channel(const BandPlan& plan, Hz step);

} // namespace tvws
