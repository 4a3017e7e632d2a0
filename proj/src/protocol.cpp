#include "tvws/protocol.hpp"

#include <json.hpp>

namespace tvws::protocol {
namespace {

using ojson = nlohmann::ordered_json;
using nlohmann::json;

[[noreturn]] void bad_reply(const std::string& detail) { throw RemoteError("bad_reply", detail); }

void put_sweep_fields(ojson& j, const SweepConfig& s) {
    j["f_min_hz"] = s.f_min;
    j["f_max_hz"] = s.f_max;
    j["step_hz"] = s.step;
    j["dwell_s"] = s.dwell_s;
}

ojson reply_head(const SweepRecord& record) {
    ojson j;
    j["ok"] = true;
    j["sensor_id"] = record.sensor_id;
    j["started_at"] = format_rfc3339(record.started_at);
    put_sweep_fields(j, record.config);
    return j;
}

json parse_ok_reply(std::string_view line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        bad_reply("reply is not a JSON object");
    }
    const auto ok = j.find("ok");
    if (ok == j.end() || !ok->is_boolean()) {
        bad_reply("reply lacks a boolean 'ok'");
    }
    if (!ok->get<bool>()) {
        const auto err = j.find("error");
        const auto det = j.find("detail");
        throw RemoteError(err != j.end() && err->is_string() ? err->get<std::string>() : "unknown",
                          det != j.end() && det->is_string() ? det->get<std::string>() : "");
    }
    return j;
}

template <typename T>
T field(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) {
        bad_reply(std::string("reply lacks '") + key + "'");
    }
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        bad_reply(std::string("reply field '") + key + "' has the wrong type");
    }
}

SweepConfig sweep_fields(const json& j) {
    SweepConfig s;
    s.f_min = field<Hz>(j, "f_min_hz");
    s.f_max = field<Hz>(j, "f_max_hz");
    s.step = field<Hz>(j, "step_hz");
    s.dwell_s = field<double>(j, "dwell_s");
    return s;
}

Timestamp reply_time(const json& j) {
    try {
        return parse_rfc3339(field<std::string>(j, "started_at"));
    } catch (const ParseError& e) {
        bad_reply(e.what());
    }
}

} // namespace

std::string error_reply(std::string_view code, std::string_view detail) {
    ojson j;
    j["ok"] = false;
    j["error"] = code;
    if (!detail.empty()) {
        j["detail"] = detail;
    }
    // Details may quote raw request bytes.
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string sweep_request(const SweepConfig& sweep) {
    ojson j;
    j["cmd"] = "sweep";
    put_sweep_fields(j, sweep);
    return j.dump();
}

std::string channels_request(const SweepConfig& sweep, Hz channel_width) {
    ojson j;
    j["cmd"] = "channels";
    put_sweep_fields(j, sweep);
    j["channel_width_hz"] = channel_width;
    return j.dump();
}

std::string sweep_reply(const SweepRecord& record) {
    ojson j = reply_head(record);
    ojson samples = ojson::array();
    for (const auto& s : record.samples) {
        samples.push_back(ojson::array({s.f_center, s.power_db}));
    }
    j["samples"] = std::move(samples);
    return j.dump();
}

std::string channels_reply(const SweepRecord& record, const BandPlan& plan,
                           const Threshold& threshold,
                           const std::vector<ChannelDecision>& decisions) {
    ojson j = reply_head(record);
    j["channel_width_hz"] = plan.channel_width();
    j["gamma_db"] = threshold.gamma_db;
    j["min_db"] = threshold.min_db;
    j["max_db"] = threshold.max_db;
    j["white_spaces"] = white_spaces(decisions).size();
    ojson rows = ojson::array();
    for (const auto& d : decisions) {
        rows.push_back(ojson::array({d.channel, std::string(to_string(d.verdict)), d.p_max_db}));
    }
    j["decisions"] = std::move(rows);
    return j.dump();
}

ChannelsResult parse_channels_reply(std::string_view line) {
    const json j = parse_ok_reply(line);
    ChannelsResult r;
    r.sensor_id = field<std::string>(j, "sensor_id");
    r.started_at = reply_time(j);
    r.f_min = field<Hz>(j, "f_min_hz");
    r.channel_width = field<Hz>(j, "channel_width_hz");
    r.threshold.gamma_db = field<double>(j, "gamma_db");
    r.threshold.min_db = field<double>(j, "min_db");
    r.threshold.max_db = field<double>(j, "max_db");
    const auto rows = j.find("decisions");
    if (rows == j.end() || !rows->is_array()) {
        bad_reply("reply lacks a 'decisions' array");
    }
    for (const auto& row : *rows) {
        if (!row.is_array() || row.size() != 3 || !row[0].is_number_unsigned() ||
            !row[1].is_string() || !row[2].is_number()) {
            bad_reply("malformed decision row " + row.dump());
        }
        ChannelDecision d;
        d.channel = row[0].get<std::size_t>();
        const auto& v = row[1].get_ref<const std::string&>();
        if (v == "occupied") {
            d.verdict = Verdict::occupied;
        } else if (v == "free") {
            d.verdict = Verdict::free;
        } else {
            bad_reply("unknown verdict '" + v + "'");
        }
        d.p_max_db = row[2].get<double>();
        d.f_start = r.f_min + static_cast<Hz>(d.channel) * r.channel_width;
        d.f_end = d.f_start + r.channel_width;
        r.decisions.push_back(d);
    }
    return r;
}

SweepRecord parse_sweep_reply(std::string_view line) {
    const json j = parse_ok_reply(line);
    SweepRecord rec;
    rec.sensor_id = field<std::string>(j, "sensor_id");
    rec.started_at = reply_time(j);
    rec.config = sweep_fields(j);
    const auto rows = j.find("samples");
    if (rows == j.end() || !rows->is_array()) {
        bad_reply("reply lacks a 'samples' array");
    }
    rec.samples.reserve(rows->size());
    for (const auto& row : *rows) {
        if (!row.is_array() || row.size() != 2 || !row[0].is_number_integer() ||
            !row[1].is_number()) {
            bad_reply("malformed sample row " + row.dump());
        }
        rec.samples.push_back({row[0].get<Hz>(), row[1].get<double>()});
    }
    return rec;
}

} // namespace tvws::protocol
