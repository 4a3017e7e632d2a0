#include "tvws/bandplan.hpp"

#include "tvws/error.hpp"

#include <string>

namespace tvws {

Hz BandPlan::channel_start(std::size_t k) const {
    if (k >= channel_count_) {
        throw ArgumentError("channel " + std::to_string(k) + " out of range [0, " +
                            std::to_string(channel_count_) + ")");
    }
    return f_min_ + static_cast<Hz>(k) * channel_width_;
}

BandPlan make_bandplan(Hz f_min, Hz f_max, Hz channel_width) {
    if (f_max <= f_min) {
        throw ConfigError("band plan needs f_max > f_min (got " + std::to_string(f_min) +
                          " .. " + std::to_string(f_max) + ")");
    }
    if (channel_width <= 0) {
        throw ConfigError("channel width must be positive (got " +
                          std::to_string(channel_width) + ")");
    }
    const Hz span = f_max - f_min;
    if (const Hz rem = span % channel_width; rem != 0) {
        throw ConfigError("range of " + std::to_string(span) + " Hz is not a multiple of the " +
                          std::to_string(channel_width) + " Hz channel width (remainder " +
                          std::to_string(rem) + " Hz)");
    }
    return BandPlan(f_min, f_max, channel_width, static_cast<std::size_t>(span / channel_width));
}

std::size_t channel_of(const BandPlan& plan, Hz f) {
    if (f < plan.f_min() || f >= plan.f_max()) {
        throw OutOfBandError(std::to_string(f) + " Hz is outside [" +
                             std::to_string(plan.f_min()) + ", " + std::to_string(plan.f_max()) +
                             ")");
    }
    return static_cast<std::size_t>((f - plan.f_min()) / plan.channel_width());
}

std::size_t samples_per_channel(const BandPlan& plan, Hz step) {
    if (step <= 0) {
        throw ConfigError("step must be positive (got " + std::to_string(step) + ")");
    }
    if (const Hz rem = plan.channel_width() % step; rem != 0) {
        throw ConfigError("channel width " + std::to_string(plan.channel_width()) +
                          " Hz is not a multiple of the " + std::to_string(step) +
                          " Hz step (remainder " + std::to_string(rem) + " Hz)");
    }
    return static_cast<std::size_t>(plan.channel_width() / step);
}

} // namespace tvws
