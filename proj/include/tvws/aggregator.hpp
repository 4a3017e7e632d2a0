#pragma once

#include "tvws/detect.hpp"
#include "tvws/net.hpp"
#include "tvws/sweep.hpp"
#include "tvws/timeutil.hpp"

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tvws {

struct RemEntry {
    std::string sensor_id;
    std::size_t channel = 0;
    Hz f_start = 0;
    Verdict verdict = Verdict::free;
    double p_max_db = 0.0;
    double gamma_db = 0.0;

    bool operator==(const RemEntry&) const = default;
};

struct SensorFailure {
    std::string sensor; // address as registered
    std::string error;

    bool operator==(const SensorFailure&) const = default;
};

// Per-sensor, per-channel occupancy collected in one polling round. Sensors
// are identified by the address they were registered under.
struct RemSnapshot {
    Timestamp taken_at{};
    std::vector<RemEntry> entries; // sorted by (sensor_id, channel)
    std::vector<std::string> sensors_ok;
    std::vector<SensorFailure> sensors_failed;
};

struct PollParams {
    SweepConfig sweep;
    Hz channel_width = 8'000'000;
    std::chrono::milliseconds timeout{30'000};
};

// Sends a `channels` request to every sensor at once and merges the replies.
// A sensor that is unreachable, times out, or answers with an error ends up in
// sensors_failed; the others are unaffected.
RemSnapshot poll_all(std::span<const net::Endpoint> sensors, const PollParams& params);

using ChannelSet = std::set<std::size_t>;

struct ComparisonReport {
    ChannelSet detected_free;
    ChannelSet reference_free;
    ChannelSet agreeing;
    double match_ratio = 0.0; // |agreeing| / |reference_free|
    ChannelSet only_detected;
    ChannelSet only_reference;
};

// Throws ArgumentError when the reference is empty or a channel falls outside
// [0, total_channels).
ComparisonReport compare(const ChannelSet& detected, const ChannelSet& reference,
                         std::size_t total_channels);

// {"free_channels": [ints]}
ChannelSet parse_channel_set(std::string_view text);
ChannelSet load_channel_set_file(const std::filesystem::path& path);
std::string channel_set_to_json(const ChannelSet& set);

// `sensor_id,channel,f_start_hz,verdict,p_max_db,gamma_db,taken_at`; powers
// are written in shortest round-trip form so parse_rem_csv gives back the
// same entries.
void write_rem_csv(std::ostream& out, const RemSnapshot& snapshot);
std::string rem_to_csv(const RemSnapshot& snapshot);

struct ParsedRem {
    std::vector<RemEntry> entries;
    std::vector<Timestamp> taken_at; // per row
};

// Skips `#` comment lines. Throws ParseError with the line number.
ParsedRem parse_rem_csv(std::istream& in);

} // namespace tvws
