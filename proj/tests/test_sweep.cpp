#include "support.hpp"

#include "tvws/bandplan.hpp"
#include "tvws/error.hpp"
#include "tvws/sweep.hpp"

#include <doctest.h>

#include <sstream>

using namespace tvws;

namespace {

SimulatedFrontEnd make_frontend(Scene s, FrontEndConfig cfg = {}) {
    return SimulatedFrontEnd(std::make_shared<const Scene>(std::move(s)), cfg);
}

} // namespace

TEST_SUITE("sweep") {

TEST_CASE("default configuration takes 1568 samples") {
    auto fe = make_frontend(testing::uhf_scene());
    const SweepConfig cfg{471'250'000, 863'250'000, 250'000, 0.001};
    CHECK(cfg.sample_count() == 1568);
    const SweepRecord rec = run_sweep(fe, cfg, "s1");
    REQUIRE(rec.samples.size() == 1568);
    CHECK(rec.sensor_id == "s1");
    CHECK(rec.config == cfg);
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        REQUIRE(rec.samples[i].f_center - cfg.f_min == static_cast<Hz>(i) * cfg.step);
    }
    const auto plan = make_bandplan(cfg.f_min, cfg.f_max, 8'000'000);
    CHECK(plan.channel_count() == 49);
    CHECK(samples_per_channel(plan, cfg.step) == 32);
}

TEST_CASE("defaults are the default configuration") {
    const SweepConfig cfg;
    CHECK(cfg.f_min == 471'250'000);
    CHECK(cfg.f_max == 863'250'000);
    CHECK(cfg.step == 250'000);
    CHECK(cfg.dwell_s == 0.001);
}

TEST_CASE("analytic jitter-free sweep equals band power over bin centers") {
    const Scene scene = testing::uhf_scene();
    auto fe = make_frontend(scene);
    const SweepRecord rec = run_sweep(fe, {});
    for (const auto& s : rec.samples) {
        const double f = static_cast<double>(s.f_center);
        REQUIRE(s.power_db == band_power(scene, f - 125'000.0, f + 125'000.0));
    }
}

TEST_CASE("invalid config fails before any measurement") {
    auto fe = make_frontend(testing::noise_scene());
    try {
        run_sweep(fe, {471'250'000, 863'250'000, 300'000, 0.001});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("remainder") != std::string::npos);
    }
    CHECK_THROWS_AS(run_sweep(fe, {10, 5, 1, 0.001}), ConfigError);
    CHECK_THROWS_AS(run_sweep(fe, {0, 10, 0, 0.001}), ConfigError);
    CHECK_THROWS_AS(run_sweep(fe, {0, 10, 1, 0.0}), ConfigError);
    CHECK_THROWS_AS(run_sweep(fe, {0, 10'000'000'000, 1, 0.001}), ConfigError);
    CHECK(fe.measure_count() == 0);
}

TEST_CASE("tune error aborts the sweep at the failing frequency") {
    auto fe = make_frontend(testing::noise_scene());
    try {
        run_sweep(fe, {2'100'000'000, 2'300'000'000, 25'000'000, 0.001});
        FAIL("expected TuneError");
    } catch (const TuneError& e) {
        CHECK(e.frequency_hz() == 2'225'000'000);
    }
    CHECK(fe.measure_count() == 6);
}

TEST_CASE("same seed gives a bit-identical record") {
    FrontEndConfig cfg;
    cfg.jitter_sigma_db = 2.0;
    cfg.seed = 1234;
    auto a = make_frontend(testing::uhf_scene(), cfg);
    auto b = make_frontend(testing::uhf_scene(), cfg);
    CHECK(run_sweep(a, {}).samples == run_sweep(b, {}).samples);
}

TEST_CASE("CSV export") {
    SweepRecord rec;
    rec.config = {100, 102, 1, 0.001};
    rec.samples = {{100, -116.0206}, {101, -60.0}};
    std::ostringstream out;
    write_sweep_csv(out, rec);
    CHECK(out.str() == "f_hz,p_db\n100,-116.021\n101,-60.000\n");
}

}
