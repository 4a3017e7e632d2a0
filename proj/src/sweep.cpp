#include "tvws/sweep.hpp"

#include "tvws/error.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace tvws {

void SweepConfig::validate() const {
    if (f_max <= f_min) {
        throw ConfigError("sweep needs f_max > f_min (got " + std::to_string(f_min) + " .. " +
                          std::to_string(f_max) + ")");
    }
    if (step <= 0) {
        throw ConfigError("sweep step must be positive (got " + std::to_string(step) + ")");
    }
    if (!(dwell_s > 0.0) || !std::isfinite(dwell_s)) {
        throw ConfigError("dwell must be a finite positive number of seconds");
    }
    const Hz span = f_max - f_min;
    if (const Hz rem = span % step; rem != 0) {
        throw ConfigError("sweep range of " + std::to_string(span) +
                          " Hz is not a multiple of the " + std::to_string(step) +
                          " Hz step (remainder " + std::to_string(rem) + " Hz)");
    }
    if (span / step > static_cast<Hz>(kMaxSweepSamples)) {
        throw ConfigError("sweep would take " + std::to_string(span / step) +
                          " samples, limit is " + std::to_string(kMaxSweepSamples));
    }
}

std::size_t SweepConfig::sample_count() const {
    validate();
    return static_cast<std::size_t>((f_max - f_min) / step);
}

SweepRecord run_sweep(FrontEnd& frontend, const SweepConfig& config, std::string sensor_id) {
    const std::size_t total = config.sample_count();
    frontend.set_measurement_bandwidth(config.step);

    SweepRecord record{config, {}, now_utc(), std::move(sensor_id)};
    record.samples.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        const Hz f = config.f_min + static_cast<Hz>(i) * config.step;
        record.samples.push_back(frontend.measure(f, config.dwell_s));
    }
    return record;
}

void write_sweep_csv(std::ostream& out, const SweepRecord& record) {
    out << "f_hz,p_db\n";
    char line[64];
    for (const auto& s : record.samples) {
        std::snprintf(line, sizeof line, "%lld,%.3f\n", static_cast<long long>(s.f_center),
                      s.power_db);
        out << line;
    }
}

} // namespace tvws
