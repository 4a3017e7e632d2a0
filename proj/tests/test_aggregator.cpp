#include "loopback.hpp"
#include "support.hpp"

#include "tvws/aggregator.hpp"
#include "tvws/error.hpp"

#include <doctest.h>

#include <future>
#include <sstream>
#include <thread>

using namespace tvws;

namespace {

// A port nobody listens on.
net::Endpoint dead_endpoint() {
    net::Socket s = net::listen_tcp({"127.0.0.1", 0});
    const auto port = net::local_port(s);
    s.close();
    return {"127.0.0.1", port};
}

RemSnapshot without_time(RemSnapshot s) {
    s.taken_at = {};
    return s;
}

} // namespace

TEST_SUITE("aggregator") {

TEST_CASE("one sensor, default config: 49 entries") {
    testing::LocalSensor s("alpha", testing::uhf_scene());
    const std::vector<net::Endpoint> sensors{s.endpoint()};
    const RemSnapshot snap = poll_all(sensors, {});
    CHECK(snap.entries.size() == 49);
    CHECK(snap.sensors_ok.size() == 1);
    CHECK(snap.sensors_failed.empty());
    std::size_t free = 0;
    for (const auto& e : snap.entries) {
        CHECK(e.sensor_id == "alpha");
        free += e.verdict == Verdict::free;
    }
    CHECK(free == 29);
    CHECK(snap.entries[3].f_start == 471'250'000 + 3 * 8'000'000);
}

TEST_CASE("partial failure: 3 sensors, one unreachable") {
    testing::LocalSensor a("a", testing::uhf_scene());
    testing::LocalSensor b("b", testing::noise_scene());
    const std::vector<net::Endpoint> sensors{a.endpoint(), dead_endpoint(), b.endpoint()};
    const RemSnapshot snap = poll_all(sensors, {});
    CHECK(snap.entries.size() == 98);
    REQUIRE(snap.sensors_failed.size() == 1);
    CHECK(snap.sensors_failed[0].sensor == sensors[1].to_string());
    CHECK(snap.sensors_ok.size() == 2);
    // Entries are grouped by sensor then channel.
    CHECK(snap.entries.front().sensor_id == "a");
    CHECK(snap.entries.back().sensor_id == "b");
    CHECK(snap.entries.back().channel == 48);

    // Failure isolation: same entries as polling the healthy ones alone.
    const std::vector<net::Endpoint> healthy{a.endpoint(), b.endpoint()};
    CHECK(poll_all(healthy, {}).entries == snap.entries);
}

TEST_CASE("zero responders still yields a snapshot") {
    const std::vector<net::Endpoint> sensors{dead_endpoint(), dead_endpoint()};
    const RemSnapshot snap = poll_all(sensors, {});
    CHECK(snap.entries.empty());
    CHECK(snap.sensors_failed.size() == 2);
    CHECK(snap.sensors_ok.empty());
}

TEST_CASE("busy sensor is recorded as failed with 'busy'") {
    FrontEndConfig fe;
    fe.realtime = true;
    testing::LocalSensor s("slow", testing::noise_scene(), fe);
    const std::string slow = R"({"cmd":"sweep","f_min_hz":600000000,"f_max_hz":604000000,"step_hz":250000,"dwell_s":0.05})";
    auto holder = std::async(std::launch::async, [&] {
        testing::Client c(s.endpoint());
        return c.request(slow);
    });
    std::this_thread::sleep_for(std::chrono::milliseconds(150));
    const std::vector<net::Endpoint> sensors{s.endpoint()};
    const RemSnapshot snap = poll_all(sensors, {});
    REQUIRE(snap.sensors_failed.size() == 1);
    CHECK(snap.sensors_failed[0].error == "busy");
    holder.get();
}

TEST_CASE("silent sensor times out") {
    // Accepts via the kernel backlog but never answers.
    net::Socket mute = net::listen_tcp({"127.0.0.1", 0});
    const std::vector<net::Endpoint> sensors{{"127.0.0.1", net::local_port(mute)}};
    PollParams p;
    p.timeout = std::chrono::milliseconds(300);
    const auto t0 = std::chrono::steady_clock::now();
    const RemSnapshot snap = poll_all(sensors, p);
    CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(3));
    REQUIRE(snap.sensors_failed.size() == 1);
    CHECK(snap.sensors_failed[0].error == "timeout");
}

TEST_CASE("poll determinism modulo timestamps") {
    FrontEndConfig fe;
    fe.jitter_sigma_db = 1.0;
    fe.seed = 3;
    RemSnapshot snaps[2];
    for (auto& snap : snaps) {
        testing::LocalSensor a("a", testing::uhf_scene(), fe);
        testing::LocalSensor b("b", testing::uhf_scene(), fe);
        const std::vector<net::Endpoint> sensors{a.endpoint(), b.endpoint()};
        snap = poll_all(sensors, {});
    }
    CHECK(without_time(snaps[0]).entries == without_time(snaps[1]).entries);
}

TEST_CASE("compare") {
    SUBCASE("identical sets") {
        const auto r = compare({1, 2, 3}, {1, 2, 3}, 49);
        CHECK(r.match_ratio == 1.0);
        CHECK(r.only_detected.empty());
        CHECK(r.only_reference.empty());
    }
    SUBCASE("disjoint sets") {
        const auto r = compare({1, 2}, {3, 4}, 49);
        CHECK(r.match_ratio == 0.0);
        CHECK(r.agreeing.empty());
    }
    SUBCASE("29 of 35") {
        ChannelSet reference;
        for (std::size_t k = 0; k < 35; ++k) {
            reference.insert(k);
        }
        ChannelSet detected(reference.begin(), std::next(reference.begin(), 29));
        const auto r = compare(detected, reference, 49);
        CHECK(std::abs(r.match_ratio - 29.0 / 35.0) < 1e-9);
        CHECK(r.only_reference.size() == 6);
    }
    SUBCASE("argument swap swaps the one-sided sets") {
        const ChannelSet x{0, 1, 5, 7};
        const ChannelSet y{1, 2, 7, 9};
        const auto xy = compare(x, y, 10);
        const auto yx = compare(y, x, 10);
        CHECK(xy.agreeing == yx.agreeing);
        CHECK(xy.only_detected == yx.only_reference);
        CHECK(xy.only_reference == yx.only_detected);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(compare({1}, {}, 49), ArgumentError);
        CHECK_THROWS_AS(compare({49}, {1}, 49), ArgumentError);
    }
}

TEST_CASE("channel set files") {
    CHECK(parse_channel_set(R"({"free_channels":[3,1,2]})") == ChannelSet{1, 2, 3});
    CHECK(parse_channel_set(channel_set_to_json({4, 8})) == ChannelSet{4, 8});
    CHECK_THROWS_AS(parse_channel_set(R"({"free_channels":[-1]})"), ParseError);
    CHECK_THROWS_AS(parse_channel_set(R"({"free":[1]})"), ParseError);
    CHECK_THROWS_AS(parse_channel_set("nope"), ParseError);
    CHECK(load_channel_set_file(testing::scenes_dir() / "uhf_reference_free.json").size() == 35);
}

TEST_CASE("REM CSV") {
    RemSnapshot snap;
    snap.taken_at = parse_rfc3339("2026-10-17T05:47:12.345Z");
    SUBCASE("empty snapshot is header only") {
        CHECK(rem_to_csv(snap) == "sensor_id,channel,f_start_hz,verdict,p_max_db,gamma_db,taken_at\n");
    }
    SUBCASE("one sensor, 49 channels: 50 lines, parse round trip") {
        testing::LocalSensor s("roof,\"east\"", testing::uhf_scene());
        const std::vector<net::Endpoint> sensors{s.endpoint()};
        snap = poll_all(sensors, {});
        const std::string csv = rem_to_csv(snap);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 50);
        std::istringstream in("# config: {}\n" + csv);
        const ParsedRem parsed = parse_rem_csv(in);
        CHECK(parsed.entries == snap.entries);
        for (const auto& t : parsed.taken_at) {
            CHECK(t == snap.taken_at);
        }
        // Emit again from the parsed entries: fixpoint.
        RemSnapshot again = snap;
        again.entries = parsed.entries;
        CHECK(rem_to_csv(again) == csv);
    }
    SUBCASE("malformed rows") {
        std::istringstream bad("sensor_id,channel,f_start_hz,verdict,p_max_db,gamma_db,taken_at\n"
                               "a,1,2,maybe,1,1,2026-10-17T05:47:12.345Z\n");
        CHECK_THROWS_AS(parse_rem_csv(bad), ParseError);
        std::istringstream no_header("");
        CHECK_THROWS_AS(parse_rem_csv(no_header), ParseError);
    }
}

TEST_CASE("RFC 3339 timestamps") {
    const Timestamp t = parse_rfc3339("2026-10-17T05:47:12.345Z");
    CHECK(format_rfc3339(t) == "2026-10-17T05:47:12.345Z");
    CHECK(format_rfc3339(parse_rfc3339("1970-01-01T00:00:00Z")) == "1970-01-01T00:00:00.000Z");
    CHECK_THROWS_AS(parse_rfc3339("2026-10-17 05:47:12"), ParseError);
    CHECK_THROWS_AS(parse_rfc3339("2026-10-17T05:47:12+02:00"), ParseError);
}

}
