#pragma once

#include "tvws/frontend.hpp"
#include "tvws/timeutil.hpp"
#include "tvws/units.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace tvws {

// Upper bound on T accepted from any caller.
inline constexpr std::size_t kMaxSweepSamples = 1'000'000;

struct SweepConfig {
    Hz f_min = 471'250'000;
    Hz f_max = 863'250'000;
    Hz step = 250'000;
    double dwell_s = kDefaultDwellSeconds;

    // T = (f_max - f_min) / step. Throws ConfigError if the config is invalid.
    std::size_t sample_count() const;
    void validate() const;

    bool operator==(const SweepConfig&) const = default;
};

struct SweepRecord {
    SweepConfig config;
    std::vector<PowerSample> samples; // samples[i].f_center == f_min + i*step
    Timestamp started_at{};
    std::string sensor_id;
};

// Steps the front-end from f_min to f_max - step, one measurement per step,
// with the measurement bandwidth set to the step. A TuneError from the
// front-end aborts the sweep and propagates unchanged.
SweepRecord run_sweep(FrontEnd& frontend, const SweepConfig& config,
                      std::string sensor_id = "local");

// `f_hz,p_db` CSV, powers to 3 decimals.
void write_sweep_csv(std::ostream& out, const SweepRecord& record);

} // namespace tvws
