#pragma once

#include "tvws/scene.hpp"
#include "tvws/units.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <random>

namespace tvws {

// Default dwell per measurement, seconds.
inline constexpr double kDefaultDwellSeconds = 0.001;

// Largest capture the iq path will synthesize for a single dwell.
inline constexpr std::size_t kMaxIqSamplesPerDwell = std::size_t{1} << 24;

struct PowerSample {
    Hz f_center = 0;
    double power_db = 0.0;

    bool operator==(const PowerSample&) const = default;
};

struct TunableRange {
    Hz lo = 0;
    Hz hi = 0;

    bool contains(Hz f) const noexcept { return f >= lo && f <= hi; }
    bool operator==(const TunableRange&) const = default;
};

// A tunable receiver: retune, dwell, report in-band power. Implementations are
// not thread-safe; one caller at a time.
class FrontEnd {
public:
    virtual ~FrontEnd() = default;

    // Power in a measurement_bandwidth()-wide band centered on f_center.
    // Throws TuneError outside tunable_range().
    virtual PowerSample measure(Hz f_center, double dwell_s) = 0;

    virtual TunableRange tunable_range() const = 0;

    // Equivalent of a spectrum analyzer's resolution bandwidth.
    virtual Hz measurement_bandwidth() const = 0;
    virtual void set_measurement_bandwidth(Hz bandwidth) = 0;
};

enum class FrontEndMode { analytic, iq };

struct FrontEndConfig {
    FrontEndMode mode = FrontEndMode::analytic;
    Hz measurement_bandwidth = 250'000;
    Hz sample_rate = 4'000'000; // iq mode only
    std::uint64_t seed = 0;
    double jitter_sigma_db = 0.0; // analytic mode only
    TunableRange range{50'000'000, 2'200'000'000};
    // Sleep for the dwell time on every measurement instead of honoring it
    // only logically.
    bool realtime = false;

    // Throws ConfigError on inconsistent settings.
    void validate() const;
};

// Front-end over a synthetic Scene.
//
// analytic: band_power over [f - bw/2, f + bw/2] plus optional Gaussian jitter.
// iq: synthesizes round(dwell * sample_rate) samples, keeps the central bw-wide
// slice of their spectrum and reports its mean-square power.
//
// Every random draw comes from one generator seeded by config.seed, so a fixed
// seed and call sequence reproduce the same samples bit for bit.
class SimulatedFrontEnd final : public FrontEnd {
public:
    SimulatedFrontEnd(std::shared_ptr<const Scene> scene, FrontEndConfig config);

    PowerSample measure(Hz f_center, double dwell_s) override;
    TunableRange tunable_range() const override { return config_.range; }
    Hz measurement_bandwidth() const override { return config_.measurement_bandwidth; }
    void set_measurement_bandwidth(Hz bandwidth) override;

    const FrontEndConfig& config() const noexcept { return config_; }
    const Scene& scene() const noexcept { return *scene_; }

    // Highest number of measure() calls ever observed in flight at once.
    // Anything above 1 means the exclusive-use contract was broken.
    int max_concurrent_measures() const noexcept { return max_in_flight_.load(); }
    std::uint64_t measure_count() const noexcept { return measures_.load(); }

private:
    double measure_iq(Hz f_center, double dwell_s);

    std::shared_ptr<const Scene> scene_;
    FrontEndConfig config_;
    std::mt19937_64 rng_;
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_in_flight_{0};
    std::atomic<std::uint64_t> measures_{0};
};

// Mean-square power of the part of `block` within [-bandwidth/2, bandwidth/2)
// of baseband, for a block sampled at sample_rate. Bins straddling the band
// edge count in proportion to their overlap.
double in_band_power_lin(const IqBlock& block, Hz sample_rate, Hz bandwidth);

} // namespace tvws
