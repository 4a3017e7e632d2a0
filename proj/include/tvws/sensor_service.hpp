#pragma once

#include "tvws/frontend.hpp"
#include "tvws/net.hpp"
#include "tvws/sweep.hpp"

#include <atomic>
#include <filesystem>
#include <iosfwd>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

namespace tvws {

struct SensorConfig {
    std::string sensor_id;
    net::Endpoint listen{"127.0.0.1", 7878};
    FrontEndConfig frontend;
    std::filesystem::path scene_path;
    SweepConfig default_sweep;
    Hz default_channel_width = 8'000'000;

    void validate() const;
};

// JSON layout:
//   {"sensor_id": "...", "listen": "host:port", "scene_path": "...",
//    "frontend": {"mode": "analytic"|"iq", "sample_rate_hz": I, "seed": I,
//                 "jitter_sigma_db": F, "realtime": B, "tunable_range_hz": [I, I]},
//    "default_sweep": {"f_min_hz": I, "f_max_hz": I, "step_hz": I, "dwell_s": F},
//    "default_plan": {"channel_width_hz": I}}
// Only sensor_id and scene_path are required. A relative scene_path is
// resolved against `base_dir`.
SensorConfig parse_sensor_config(std::string_view text, const std::filesystem::path& base_dir = {});
SensorConfig load_sensor_config_file(const std::filesystem::path& path);

// Protocol endpoint around one exclusively owned front-end. handle_request is
// safe to call from any number of threads; sweeps take a try-lock on the
// front-end and contenders get a `busy` reply instead of waiting.
class SensorService {
public:
    struct Identity {
        std::string sensor_id;
        std::string scene_label;
        std::string frontend_mode;
    };

    SensorService(Identity identity, std::unique_ptr<FrontEnd> frontend, SweepConfig default_sweep,
                  Hz default_channel_width);

    // Loads the scene and builds a SimulatedFrontEnd.
    static std::unique_ptr<SensorService> from_config(const SensorConfig& config);

    // One request line (without LF) in, one reply line (without LF) out.
    // Never throws for bad input.
    std::string handle_request(std::string_view line);

    const Identity& identity() const noexcept { return identity_; }
    // Only meaningful while no request is in flight.
    FrontEnd& frontend() noexcept { return *frontend_; }

private:
    // Runs under the front-end claim; channel_width set means classify too.
    std::string run_measurement(const SweepConfig& sweep, std::optional<Hz> channel_width);
    std::string info_reply() const;

    Identity identity_;
    std::unique_ptr<FrontEnd> frontend_;
    SweepConfig default_sweep_;
    Hz default_channel_width_;
    std::mutex claim_;
};

// Newline-delimited JSON over TCP, one thread per client connection.
class SensorServer {
public:
    // Binds immediately; throws net::NetError on failure.
    SensorServer(SensorService& service, const net::Endpoint& listen);
    ~SensorServer();
    SensorServer(const SensorServer&) = delete;
    SensorServer& operator=(const SensorServer&) = delete;

    std::uint16_t port() const noexcept { return port_; }

    // Accept loop; returns after request_stop(), once every client is gone.
    void run();
    // Async-signal-safe.
    void request_stop() noexcept { stop_.store(true); }

    // run() on a background thread.
    void start();
    void stop();

private:
    struct Connection {
        net::Socket socket;
        std::thread worker;
        std::atomic<bool> done{false};
    };

    void serve_connection(Connection& conn);
    void reap(bool all);

    SensorService& service_;
    net::Socket listener_;
    std::uint16_t port_ = 0;
    std::atomic<bool> stop_{false};
    std::mutex conns_mutex_;
    std::list<Connection> conns_;
    std::thread runner_;
};

// Runs a sensor daemon until `stop` becomes true.
void serve(const SensorConfig& config, const std::atomic<bool>& stop,
           std::ostream* log = nullptr);

} // namespace tvws
