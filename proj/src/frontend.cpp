#include "tvws/frontend.hpp"

#include "fft.hpp"
#include "tvws/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <thread>

namespace tvws {
namespace {

class InFlight {
public:
    InFlight(std::atomic<int>& counter, std::atomic<int>& peak) : counter_(counter) {
        const int now = ++counter_;
        int seen = peak.load();
        while (now > seen && !peak.compare_exchange_weak(seen, now)) {
        }
    }
    ~InFlight() { --counter_; }
    InFlight(const InFlight&) = delete;
    InFlight& operator=(const InFlight&) = delete;

private:
    std::atomic<int>& counter_;
};

} // namespace

void FrontEndConfig::validate() const {
    if (measurement_bandwidth <= 0) {
        throw ConfigError("measurement bandwidth must be positive");
    }
    if (!(jitter_sigma_db >= 0.0) || !std::isfinite(jitter_sigma_db)) {
        throw ConfigError("jitter_sigma_db must be a finite value >= 0");
    }
    if (range.hi <= range.lo) {
        throw ConfigError("tunable range is empty");
    }
    if (mode == FrontEndMode::iq) {
        if (sample_rate <= 0) {
            throw ConfigError("sample rate must be positive");
        }
        if (sample_rate < measurement_bandwidth) {
            throw ConfigError("sample rate " + std::to_string(sample_rate) +
                              " Hz is below the measurement bandwidth " +
                              std::to_string(measurement_bandwidth) + " Hz");
        }
    }
}

SimulatedFrontEnd::SimulatedFrontEnd(std::shared_ptr<const Scene> scene, FrontEndConfig config)
    : scene_(std::move(scene)), config_(config), rng_(config.seed) {
    if (!scene_) {
        throw ConfigError("front-end needs a scene");
    }
    config_.validate();
}

void SimulatedFrontEnd::set_measurement_bandwidth(Hz bandwidth) {
    FrontEndConfig next = config_;
    next.measurement_bandwidth = bandwidth;
    next.validate();
    config_ = next;
}

PowerSample SimulatedFrontEnd::measure(Hz f_center, double dwell_s) {
    InFlight guard(in_flight_, max_in_flight_);
    ++measures_;
    if (!(dwell_s > 0.0) || !std::isfinite(dwell_s)) {
        throw ArgumentError("dwell must be a finite positive number of seconds");
    }
    if (!config_.range.contains(f_center)) {
        throw TuneError(f_center);
    }
    if (config_.realtime) {
        std::this_thread::sleep_for(std::chrono::duration<double>(dwell_s));
    }

    double power_db = 0.0;
    if (config_.mode == FrontEndMode::analytic) {
        const double half = 0.5 * static_cast<double>(config_.measurement_bandwidth);
        const double fc = static_cast<double>(f_center);
        power_db = band_power(*scene_, fc - half, fc + half);
        if (config_.jitter_sigma_db > 0.0) {
            power_db += std::normal_distribution<double>(0.0, config_.jitter_sigma_db)(rng_);
        }
    } else {
        power_db = lin_to_db(measure_iq(f_center, dwell_s));
    }
    return {f_center, power_db};
}

double SimulatedFrontEnd::measure_iq(Hz f_center, double dwell_s) {
    const double want = std::round(dwell_s * static_cast<double>(config_.sample_rate));
    if (want < 1.0) {
        throw ArgumentError("dwell of " + std::to_string(dwell_s) +
                            " s captures no samples at the configured sample rate");
    }
    if (want > static_cast<double>(kMaxIqSamplesPerDwell)) {
        throw ArgumentError("dwell of " + std::to_string(dwell_s) + " s exceeds the " +
                            std::to_string(kMaxIqSamplesPerDwell) + "-sample capture limit");
    }
    const auto n = static_cast<std::size_t>(want);
    const std::uint64_t block_seed = rng_();
    const IqBlock block = generate_iq(*scene_, f_center, config_.sample_rate, n, block_seed);
    return in_band_power_lin(block, config_.sample_rate, config_.measurement_bandwidth);
}

double in_band_power_lin(const IqBlock& block, Hz sample_rate, Hz bandwidth) {
    if (block.empty()) {
        throw ArgumentError("empty capture");
    }
    if (bandwidth <= 0 || bandwidth > sample_rate) {
        throw ArgumentError("bandwidth must lie in (0, sample_rate]");
    }
    const std::size_t n = block.size();
    IqBlock spectrum = block;
    detail::fft_forward(spectrum);

    // Band edges in units of bins.
    const double half = 0.5 * static_cast<double>(bandwidth) * static_cast<double>(n) /
                        static_cast<double>(sample_rate);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto span = detail::bin_span(k, n);
        double weight = 0.0;
        for (int p = 0; p < span.parts; ++p) {
            weight += std::max(0.0, std::min(span.hi[p], half) - std::max(span.lo[p], -half));
        }
        if (weight > 0.0) {
            acc += weight * std::norm(spectrum[k]);
        }
    }
    const double nd = static_cast<double>(n);
    return acc / (nd * nd);
}

} // namespace tvws
