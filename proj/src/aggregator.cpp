#include "tvws/aggregator.hpp"

#include "tvws/error.hpp"
#include "tvws/protocol.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <future>
#include <istream>
#include <ostream>
#include <sstream>

namespace tvws {
namespace {

struct PollOutcome {
    bool ok = false;
    std::string error;
    protocol::ChannelsResult result;
};

PollOutcome poll_one(const net::Endpoint& where, const std::string& request,
                     net::Clock::time_point deadline) {
    PollOutcome out;
    try {
        net::Socket s = net::connect_tcp(where, deadline);
        net::send_all(s, request, deadline);
        net::LineReader reader(s);
        std::string line;
        if (reader.read_line(line, deadline) != net::LineReader::Status::line) {
            out.error = "connection closed without a reply";
            return out;
        }
        out.result = protocol::parse_channels_reply(line);
        out.ok = true;
    } catch (const protocol::RemoteError& e) {
        out.error = e.code();
    } catch (const net::TimeoutError&) {
        out.error = "timeout";
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

std::string shortest(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') {
            q += '"';
        }
        q += c;
    }
    return q + '"';
}

std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
    std::vector<std::string> cells(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cells.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cells.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.emplace_back();
        } else {
            cells.back() += c;
        }
    }
    if (quoted) {
        throw ParseError("line " + std::to_string(line_no), "unterminated quote");
    }
    return cells;
}

template <typename T>
T parse_number(const std::string& s, std::size_t line_no, const char* what) {
    T v{};
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size()) {
        throw ParseError("line " + std::to_string(line_no), std::string("bad ") + what + " '" + s + "'");
    }
    return v;
}

} // namespace

RemSnapshot poll_all(std::span<const net::Endpoint> sensors, const PollParams& params) {
    RemSnapshot snap;
    snap.taken_at = now_utc();
    const std::string request = protocol::channels_request(params.sweep, params.channel_width) + "\n";
    const auto deadline = net::Clock::now() + params.timeout;

    std::vector<std::future<PollOutcome>> pending;
    pending.reserve(sensors.size());
    for (const auto& s : sensors) {
        pending.push_back(std::async(std::launch::async, poll_one, s, request, deadline));
    }
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        const std::string addr = sensors[i].to_string();
        PollOutcome o = pending[i].get();
        if (!o.ok) {
            snap.sensors_failed.push_back({addr, o.error});
            continue;
        }
        snap.sensors_ok.push_back(addr);
        for (const auto& d : o.result.decisions) {
            snap.entries.push_back({o.result.sensor_id, d.channel, d.f_start, d.verdict, d.p_max_db,
                                    o.result.threshold.gamma_db});
        }
    }
    std::stable_sort(snap.entries.begin(), snap.entries.end(),
                     [](const RemEntry& a, const RemEntry& b) {
                         return std::tie(a.sensor_id, a.channel) < std::tie(b.sensor_id, b.channel);
                     });
    return snap;
}

ComparisonReport compare(const ChannelSet& detected, const ChannelSet& reference,
                         std::size_t total_channels) {
    if (reference.empty()) {
        throw ArgumentError("match ratio is undefined for an empty reference set");
    }
    for (const ChannelSet* set : {&detected, &reference}) {
        if (!set->empty() && *set->rbegin() >= total_channels) {
            throw ArgumentError("channel " + std::to_string(*set->rbegin()) +
                                " is outside [0, " + std::to_string(total_channels) + ")");
        }
    }
    ComparisonReport r;
    r.detected_free = detected;
    r.reference_free = reference;
    std::set_intersection(detected.begin(), detected.end(), reference.begin(), reference.end(),
                          std::inserter(r.agreeing, r.agreeing.end()));
    std::set_difference(detected.begin(), detected.end(), reference.begin(), reference.end(),
                        std::inserter(r.only_detected, r.only_detected.end()));
    std::set_difference(reference.begin(), reference.end(), detected.begin(), detected.end(),
                        std::inserter(r.only_reference, r.only_reference.end()));
    r.match_ratio = static_cast<double>(r.agreeing.size()) / static_cast<double>(reference.size());
    return r;
}

ChannelSet parse_channel_set(std::string_view text) {
    using nlohmann::json;
    const json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw ParseError("", "channel set must be a JSON object");
    }
    for (const auto& [k, _] : doc.items()) {
        if (k != "free_channels") {
            throw ParseError("/" + k, "unknown field");
        }
    }
    const auto it = doc.find("free_channels");
    if (it == doc.end() || !it->is_array()) {
        throw ParseError("/free_channels", "expected an array of channel indices");
    }
    ChannelSet out;
    for (std::size_t i = 0; i < it->size(); ++i) {
        const json& v = (*it)[i];
        if (!v.is_number_unsigned()) {
            throw ParseError("/free_channels/" + std::to_string(i), "expected a non-negative integer");
        }
        out.insert(v.get<std::size_t>());
    }
    return out;
}

ChannelSet load_channel_set_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("", "cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_channel_set(buf.str());
}

std::string channel_set_to_json(const ChannelSet& set) {
    nlohmann::json j;
    j["free_channels"] = std::vector<std::size_t>(set.begin(), set.end());
    return j.dump();
}

void write_rem_csv(std::ostream& out, const RemSnapshot& snapshot) {
    out << "sensor_id,channel,f_start_hz,verdict,p_max_db,gamma_db,taken_at\n";
    const std::string ts = format_rfc3339(snapshot.taken_at);
    for (const auto& e : snapshot.entries) {
        out << csv_field(e.sensor_id) << ',' << e.channel << ',' << e.f_start << ','
            << to_string(e.verdict) << ',' << shortest(e.p_max_db) << ','
            << shortest(e.gamma_db) << ',' << ts << '\n';
    }
}

std::string rem_to_csv(const RemSnapshot& snapshot) {
    std::ostringstream out;
    write_rem_csv(out, snapshot);
    return out.str();
}

ParsedRem parse_rem_csv(std::istream& in) {
    ParsedRem out;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!header) {
            if (line != "sensor_id,channel,f_start_hz,verdict,p_max_db,gamma_db,taken_at") {
                throw ParseError("line " + std::to_string(line_no), "unexpected header");
            }
            header = true;
            continue;
        }
        const auto cells = split_csv(line, line_no);
        if (cells.size() != 7) {
            throw ParseError("line " + std::to_string(line_no), "expected 7 columns");
        }
        RemEntry e;
        e.sensor_id = cells[0];
        e.channel = parse_number<std::size_t>(cells[1], line_no, "channel");
        e.f_start = parse_number<Hz>(cells[2], line_no, "f_start_hz");
        if (cells[3] == "occupied") {
            e.verdict = Verdict::occupied;
        } else if (cells[3] == "free") {
            e.verdict = Verdict::free;
        } else {
            throw ParseError("line " + std::to_string(line_no), "bad verdict '" + cells[3] + "'");
        }
        e.p_max_db = parse_number<double>(cells[4], line_no, "p_max_db");
        e.gamma_db = parse_number<double>(cells[5], line_no, "gamma_db");
        out.taken_at.push_back(parse_rfc3339(cells[6]));
        out.entries.push_back(std::move(e));
    }
    if (!header) {
        throw ParseError("", "missing header");
    }
    return out;
}

} // namespace tvws
