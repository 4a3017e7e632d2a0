#pragma once

#include "tvws/detect.hpp"
#include "tvws/error.hpp"
#include "tvws/sweep.hpp"
#include "tvws/timeutil.hpp"

#include <string>
#include <string_view>
#include <vector>

// Sensor wire protocol: one UTF-8 JSON object per line, LF terminated.
//
//   {"cmd":"ping"}
//   {"cmd":"info"}
//   {"cmd":"sweep","f_min_hz":I,"f_max_hz":I,"step_hz":I,"dwell_s":F}
//   {"cmd":"channels", <sweep fields>, "channel_width_hz":I}
//
// Replies are {"ok":true,...} or {"ok":false,"error":code,"detail":text}.
// Sweep and channel fields are optional; missing ones take the sensor's
// defaults.
namespace tvws::protocol {

inline constexpr int kVersion = 1;

namespace errc {
inline constexpr std::string_view busy = "busy";
inline constexpr std::string_view unknown_cmd = "unknown_cmd";
inline constexpr std::string_view bad_request = "bad_request";
inline constexpr std::string_view tune_error = "tune_error";
inline constexpr std::string_view internal = "internal";
} // namespace errc

// An {"ok":false,...} reply, or a reply that could not be understood.
class RemoteError : public Error {
public:
    RemoteError(std::string code, std::string detail)
        : Error(detail.empty() ? code : code + ": " + detail), code_(std::move(code)),
          detail_(std::move(detail)) {}

    const std::string& code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string code_;
    std::string detail_;
};

std::string error_reply(std::string_view code, std::string_view detail = {});

std::string sweep_request(const SweepConfig& sweep);
std::string channels_request(const SweepConfig& sweep, Hz channel_width);

std::string sweep_reply(const SweepRecord& record);
std::string channels_reply(const SweepRecord& record, const BandPlan& plan,
                           const Threshold& threshold,
                           const std::vector<ChannelDecision>& decisions);

struct ChannelsResult {
    std::string sensor_id;
    Timestamp started_at{};
    Threshold threshold;
    Hz f_min = 0;
    Hz channel_width = 0;
    std::vector<ChannelDecision> decisions; // n_exceeding is not carried on the wire
};

// Throws RemoteError for error replies and for malformed ones (code
// "bad_reply").
ChannelsResult parse_channels_reply(std::string_view line);
SweepRecord parse_sweep_reply(std::string_view line);

} // namespace tvws::protocol
