#pragma once

#include "tvws/net.hpp"
#include "tvws/scene.hpp"
#include "tvws/sensor_service.hpp"

#include <memory>
#include <string>

namespace tvws::testing {

// A SensorService + SensorServer pair on an ephemeral loopback port.
struct LocalSensor {
    LocalSensor(std::string id, Scene scene, FrontEndConfig fe = {}, SweepConfig defaults = {},
                Hz channel_width = 8'000'000) {
        auto shared = std::make_shared<const Scene>(std::move(scene));
        auto frontend = std::make_unique<SimulatedFrontEnd>(shared, fe);
        raw_frontend = frontend.get();
        service = std::make_unique<SensorService>(
            SensorService::Identity{std::move(id), shared->label, "analytic"}, std::move(frontend),
            defaults, channel_width);
        server = std::make_unique<SensorServer>(*service, net::Endpoint{"127.0.0.1", 0});
        server->start();
    }

    net::Endpoint endpoint() const { return {"127.0.0.1", server->port()}; }

    SimulatedFrontEnd* raw_frontend = nullptr;
    std::unique_ptr<SensorService> service;
    std::unique_ptr<SensorServer> server;
};

// Blocking request/reply client for tests.
class Client {
public:
    explicit Client(const net::Endpoint& where)
        : socket_(net::connect_tcp(where, net::Clock::now() + std::chrono::seconds(5))),
          reader_(socket_) {}

    void send_raw(std::string_view bytes) {
        net::send_all(socket_, bytes, net::Clock::now() + std::chrono::seconds(5));
    }

    // Empty string on EOF.
    std::string read(std::chrono::seconds timeout = std::chrono::seconds(60)) {
        std::string line;
        if (reader_.read_line(line, net::Clock::now() + timeout) != net::LineReader::Status::line) {
            return {};
        }
        return line;
    }

    std::string request(std::string_view line) {
        send_raw(std::string(line) + "\n");
        return read();
    }

private:
    net::Socket socket_;
    net::LineReader reader_;
};

} // namespace tvws::testing
