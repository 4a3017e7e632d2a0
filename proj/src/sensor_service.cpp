#include "tvws/sensor_service.hpp"

#include "tvws/bandplan.hpp"
#include "tvws/detect.hpp"
#include "tvws/error.hpp"
#include "tvws/protocol.hpp"
#include "tvws/scene.hpp"

#include <json.hpp>

#include <poll.h>
#include <sys/socket.h>

#include <chrono>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace tvws {
namespace {

using nlohmann::json;
namespace errc = protocol::errc;

// ---- config -------------------------------------------------------------

void only_keys(const json& obj, const std::string& path,
               std::initializer_list<std::string_view> keys) {
    if (!obj.is_object()) {
        throw ParseError(path, "expected an object");
    }
    for (const auto& [k, _] : obj.items()) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
            throw ParseError(path + "/" + k, "unknown field");
        }
    }
}

Hz get_hz(const json& v, const std::string& path) {
    if (!v.is_number_integer()) {
        throw ParseError(path, "expected an integer number of Hz");
    }
    if (v.is_number_unsigned() &&
        v.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<Hz>::max())) {
        throw ParseError(path, "value out of range");
    }
    return v.get<Hz>();
}

double get_number(const json& v, const std::string& path) {
    if (!v.is_number()) {
        throw ParseError(path, "expected a number");
    }
    return v.get<double>();
}

void read_sweep(const json& j, const std::string& path, SweepConfig& s) {
    only_keys(j, path, {"f_min_hz", "f_max_hz", "step_hz", "dwell_s"});
    if (j.contains("f_min_hz")) s.f_min = get_hz(j["f_min_hz"], path + "/f_min_hz");
    if (j.contains("f_max_hz")) s.f_max = get_hz(j["f_max_hz"], path + "/f_max_hz");
    if (j.contains("step_hz")) s.step = get_hz(j["step_hz"], path + "/step_hz");
    if (j.contains("dwell_s")) s.dwell_s = get_number(j["dwell_s"], path + "/dwell_s");
}

void read_frontend(const json& j, FrontEndConfig& fe) {
    only_keys(j, "/frontend",
              {"mode", "sample_rate_hz", "seed", "jitter_sigma_db", "realtime", "tunable_range_hz"});
    if (j.contains("mode")) {
        const json& m = j["mode"];
        if (m == "analytic") {
            fe.mode = FrontEndMode::analytic;
        } else if (m == "iq") {
            fe.mode = FrontEndMode::iq;
        } else {
            throw ParseError("/frontend/mode", "expected \"analytic\" or \"iq\"");
        }
    }
    if (j.contains("sample_rate_hz")) {
        fe.sample_rate = get_hz(j["sample_rate_hz"], "/frontend/sample_rate_hz");
    }
    if (j.contains("seed")) {
        const json& s = j["seed"];
        if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<long long>() < 0)) {
            throw ParseError("/frontend/seed", "expected a non-negative integer");
        }
        fe.seed = s.get<std::uint64_t>();
    }
    if (j.contains("jitter_sigma_db")) {
        fe.jitter_sigma_db = get_number(j["jitter_sigma_db"], "/frontend/jitter_sigma_db");
    }
    if (j.contains("realtime")) {
        if (!j["realtime"].is_boolean()) {
            throw ParseError("/frontend/realtime", "expected a boolean");
        }
        fe.realtime = j["realtime"].get<bool>();
    }
    if (j.contains("tunable_range_hz")) {
        const json& r = j["tunable_range_hz"];
        if (!r.is_array() || r.size() != 2) {
            throw ParseError("/frontend/tunable_range_hz", "expected [lo, hi]");
        }
        fe.range = {get_hz(r[0], "/frontend/tunable_range_hz/0"),
                    get_hz(r[1], "/frontend/tunable_range_hz/1")};
    }
}

// ---- requests -----------------------------------------------------------

struct BadRequest {
    std::string detail;
};

Hz request_hz(const json& req, const char* key, Hz fallback) {
    const auto it = req.find(key);
    if (it == req.end()) {
        return fallback;
    }
    if (!it->is_number_integer()) {
        throw BadRequest{std::string(key) + " must be an integer"};
    }
    if (it->is_number_unsigned() &&
        it->get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<Hz>::max())) {
        throw BadRequest{std::string(key) + " is out of range"};
    }
    return it->get<Hz>();
}

SweepConfig request_sweep(const json& req, const SweepConfig& defaults) {
    SweepConfig s;
    s.f_min = request_hz(req, "f_min_hz", defaults.f_min);
    s.f_max = request_hz(req, "f_max_hz", defaults.f_max);
    s.step = request_hz(req, "step_hz", defaults.step);
    s.dwell_s = defaults.dwell_s;
    if (const auto it = req.find("dwell_s"); it != req.end()) {
        if (!it->is_number()) {
            throw BadRequest{"dwell_s must be a number"};
        }
        s.dwell_s = it->get<double>();
    }
    return s;
}

void check_keys(const json& req, std::initializer_list<std::string_view> keys) {
    for (const auto& [k, _] : req.items()) {
        if (k != "cmd" && std::find(keys.begin(), keys.end(), k) == keys.end()) {
            throw BadRequest{"unknown field '" + k + "'"};
        }
    }
}

std::string_view mode_name(FrontEndMode m) { return m == FrontEndMode::iq ? "iq" : "analytic"; }

} // namespace

void SensorConfig::validate() const {
    if (sensor_id.empty()) {
        throw ConfigError("sensor_id must not be empty");
    }
    frontend.validate();
    default_sweep.validate();
    make_bandplan(default_sweep.f_min, default_sweep.f_max, default_channel_width);
}

SensorConfig parse_sensor_config(std::string_view text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("", std::string("malformed JSON: ") + e.what());
    }
    only_keys(doc, "", {"sensor_id", "listen", "scene_path", "frontend", "default_sweep",
                        "default_plan"});
    SensorConfig cfg;
    if (!doc.contains("sensor_id") || !doc["sensor_id"].is_string()) {
        throw ParseError("/sensor_id", "expected a string");
    }
    cfg.sensor_id = doc["sensor_id"].get<std::string>();
    if (!doc.contains("scene_path") || !doc["scene_path"].is_string()) {
        throw ParseError("/scene_path", "expected a string");
    }
    cfg.scene_path = doc["scene_path"].get<std::string>();
    if (cfg.scene_path.is_relative() && !base_dir.empty()) {
        cfg.scene_path = base_dir / cfg.scene_path;
    }
    if (doc.contains("listen")) {
        if (!doc["listen"].is_string()) {
            throw ParseError("/listen", "expected \"host:port\"");
        }
        try {
            cfg.listen = net::parse_endpoint(doc["listen"].get<std::string>());
        } catch (const net::NetError& e) {
            throw ParseError("/listen", e.what());
        }
    }
    if (doc.contains("frontend")) {
        read_frontend(doc["frontend"], cfg.frontend);
    }
    if (doc.contains("default_sweep")) {
        read_sweep(doc["default_sweep"], "/default_sweep", cfg.default_sweep);
    }
    if (doc.contains("default_plan")) {
        only_keys(doc["default_plan"], "/default_plan", {"channel_width_hz"});
        if (doc["default_plan"].contains("channel_width_hz")) {
            cfg.default_channel_width = get_hz(doc["default_plan"]["channel_width_hz"],
                                               "/default_plan/channel_width_hz");
        }
    }
    cfg.frontend.measurement_bandwidth = cfg.default_sweep.step;
    return cfg;
}

SensorConfig load_sensor_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("", "cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_sensor_config(buf.str(), path.parent_path());
}

SensorService::SensorService(Identity identity, std::unique_ptr<FrontEnd> frontend,
                             SweepConfig default_sweep, Hz default_channel_width)
    : identity_(std::move(identity)), frontend_(std::move(frontend)),
      default_sweep_(default_sweep), default_channel_width_(default_channel_width) {
    if (identity_.sensor_id.empty()) {
        throw ConfigError("sensor_id must not be empty");
    }
    if (!frontend_) {
        throw ConfigError("sensor service needs a front-end");
    }
}

std::unique_ptr<SensorService> SensorService::from_config(const SensorConfig& config) {
    config.validate();
    auto scene = std::make_shared<const Scene>(load_scene_file(config.scene_path));
    auto fe = std::make_unique<SimulatedFrontEnd>(scene, config.frontend);
    Identity id{config.sensor_id, scene->label, std::string(mode_name(config.frontend.mode))};
    return std::make_unique<SensorService>(std::move(id), std::move(fe), config.default_sweep,
                                           config.default_channel_width);
}

std::string SensorService::info_reply() const {
    nlohmann::ordered_json j;
    j["ok"] = true;
    j["role"] = "sensor";
    j["sensor_id"] = identity_.sensor_id;
    j["version"] = protocol::kVersion;
    j["scene"] = identity_.scene_label;
    j["frontend_mode"] = identity_.frontend_mode;
    const TunableRange r = frontend_->tunable_range();
    j["tunable_range_hz"] = {r.lo, r.hi};
    j["default_sweep"] = {{"f_min_hz", default_sweep_.f_min},
                          {"f_max_hz", default_sweep_.f_max},
                          {"step_hz", default_sweep_.step},
                          {"dwell_s", default_sweep_.dwell_s}};
    j["default_plan"] = {{"channel_width_hz", default_channel_width_}};
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string SensorService::run_measurement(const SweepConfig& sweep,
                                           std::optional<Hz> channel_width) {
    std::optional<BandPlan> plan;
    try {
        sweep.validate();
        if (channel_width) {
            plan = make_bandplan(sweep.f_min, sweep.f_max, *channel_width);
            samples_per_channel(*plan, sweep.step);
        }
    } catch (const ConfigError& e) {
        return protocol::error_reply(errc::bad_request, e.what());
    }

    std::unique_lock claim(claim_, std::try_to_lock);
    if (!claim.owns_lock()) {
        return protocol::error_reply(errc::busy);
    }
    try {
        const SweepRecord record = run_sweep(*frontend_, sweep, identity_.sensor_id);
        claim.unlock();
        if (!plan) {
            return protocol::sweep_reply(record);
        }
        const Threshold t = compute_threshold(record);
        return protocol::channels_reply(record, *plan, t, classify(record, *plan, t));
    } catch (const TuneError& e) {
        nlohmann::ordered_json j;
        j["ok"] = false;
        j["error"] = errc::tune_error;
        j["detail"] = e.what();
        j["frequency_hz"] = e.frequency_hz();
        return j.dump();
    } catch (const ConfigError& e) {
        return protocol::error_reply(errc::bad_request, e.what());
    } catch (const ArgumentError& e) {
        return protocol::error_reply(errc::bad_request, e.what());
    }
}

std::string SensorService::handle_request(std::string_view line) {
    try {
        const json req = json::parse(line, nullptr, false);
        if (req.is_discarded()) {
            return protocol::error_reply(errc::bad_request, "request is not valid JSON");
        }
        if (!req.is_object()) {
            return protocol::error_reply(errc::bad_request, "request must be a JSON object");
        }
        const auto cmd_it = req.find("cmd");
        if (cmd_it == req.end() || !cmd_it->is_string()) {
            return protocol::error_reply(errc::bad_request, "missing string field 'cmd'");
        }
        const auto& cmd = cmd_it->get_ref<const std::string&>();
        if (cmd == "ping") {
            check_keys(req, {});
            nlohmann::ordered_json j;
            j["ok"] = true;
            j["role"] = "sensor";
            j["sensor_id"] = identity_.sensor_id;
            j["version"] = protocol::kVersion;
            return j.dump(-1, ' ', false, json::error_handler_t::replace);
        }
        if (cmd == "info") {
            check_keys(req, {});
            return info_reply();
        }
        if (cmd == "sweep") {
            check_keys(req, {"f_min_hz", "f_max_hz", "step_hz", "dwell_s"});
            return run_measurement(request_sweep(req, default_sweep_), std::nullopt);
        }
        if (cmd == "channels") {
            check_keys(req, {"f_min_hz", "f_max_hz", "step_hz", "dwell_s", "channel_width_hz"});
            const SweepConfig s = request_sweep(req, default_sweep_);
            return run_measurement(s, request_hz(req, "channel_width_hz", default_channel_width_));
        }
        return protocol::error_reply(errc::unknown_cmd, cmd);
    } catch (const BadRequest& e) {
        return protocol::error_reply(errc::bad_request, e.detail);
    } catch (const std::exception& e) {
        return protocol::error_reply(errc::internal, e.what());
    }
}

// ---- TCP ----------------------------------------------------------------

SensorServer::SensorServer(SensorService& service, const net::Endpoint& listen)
    : service_(service), listener_(net::listen_tcp(listen)), port_(net::local_port(listener_)) {}

SensorServer::~SensorServer() { stop(); }

void SensorServer::start() {
    if (!runner_.joinable()) {
        runner_ = std::thread([this] { run(); });
    }
}

void SensorServer::stop() {
    request_stop();
    if (runner_.joinable()) {
        runner_.join();
    }
}

void SensorServer::run() {
    while (!stop_.load()) {
        pollfd p{listener_.fd(), POLLIN, 0};
        const int rc = ::poll(&p, 1, 100);
        reap(false);
        if (rc <= 0) {
            continue;
        }
        net::Socket client(::accept4(listener_.fd(), nullptr, nullptr, SOCK_CLOEXEC));
        if (!client) {
            continue;
        }
        std::lock_guard lock(conns_mutex_);
        auto& conn = conns_.emplace_back();
        conn.socket = std::move(client);
        conn.worker = std::thread([this, &conn] { serve_connection(conn); });
    }
    {
        std::lock_guard lock(conns_mutex_);
        for (auto& c : conns_) {
            ::shutdown(c.socket.fd(), SHUT_RDWR);
        }
    }
    reap(true);
}

void SensorServer::reap(bool all) {
    std::list<Connection> finished;
    {
        std::lock_guard lock(conns_mutex_);
        for (auto it = conns_.begin(); it != conns_.end();) {
            auto next = std::next(it);
            if (all || it->done.load()) {
                finished.splice(finished.end(), conns_, it);
            }
            it = next;
        }
    }
    for (auto& c : finished) {
        c.worker.join();
    }
}

void SensorServer::serve_connection(Connection& conn) {
    net::LineReader reader(conn.socket);
    std::string line;
    const auto send_deadline = [] { return net::Clock::now() + std::chrono::seconds(30); };
    try {
        while (!stop_.load()) {
            const auto status = reader.read_line(line);
            if (status == net::LineReader::Status::eof) {
                break;
            }
            if (status == net::LineReader::Status::too_long) {
                net::send_all(conn.socket,
                              protocol::error_reply(errc::bad_request, "line too long") + "\n",
                              send_deadline());
                break;
            }
            net::send_all(conn.socket, service_.handle_request(line) + "\n", send_deadline());
        }
    } catch (const std::exception&) {
        // Client went away mid-exchange; nothing else to do for it.
    }
    conn.done.store(true);
}

void serve(const SensorConfig& config, const std::atomic<bool>& stop, std::ostream* log) {
    auto service = SensorService::from_config(config);
    SensorServer server(*service, config.listen);
    if (log) {
        *log << "sensor " << config.sensor_id << " listening on " << config.listen.host << ":"
             << server.port() << std::endl;
    }
    server.start();
    while (!stop.load()) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    server.stop();
}

} // namespace tvws
