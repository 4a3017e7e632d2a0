#include "oracles.hpp"
#include "support.hpp"

#include "tvws/detect.hpp"
#include "tvws/error.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace tvws;

namespace {

SweepRecord record_of(std::vector<double> powers, Hz f_min = 0, Hz step = 1) {
    SweepRecord rec;
    rec.config = {f_min, f_min + static_cast<Hz>(powers.size()) * step, step, 0.001};
    for (std::size_t i = 0; i < powers.size(); ++i) {
        rec.samples.push_back({f_min + static_cast<Hz>(i) * step, powers[i]});
    }
    return rec;
}

// One 8 MHz channel worth of 32 samples at 250 kHz, plus a companion channel
// that pins the sweep min and max.
SweepRecord two_channels(const std::vector<double>& first, double lo, double hi) {
    std::vector<double> p = first;
    p.push_back(lo);
    p.push_back(hi);
    p.resize(64, lo);
    return record_of(p, 471'250'000, 250'000);
}

} // namespace

TEST_SUITE("detect") {

TEST_CASE("threshold is the min/max midpoint") {
    const Threshold t = compute_threshold(record_of({-100, -60, -40}));
    CHECK(t.gamma_db == -70.0);
    CHECK(t.min_db == -100.0);
    CHECK(t.max_db == -40.0);
}

TEST_CASE("degenerate threshold and all-free verdict") {
    const SweepRecord rec = record_of(std::vector<double>(64, -90.0), 471'250'000, 250'000);
    const Threshold t = compute_threshold(rec);
    CHECK(t.gamma_db == -90.0);
    const auto plan = make_bandplan(471'250'000, 487'250'000, 8'000'000);
    const auto d = classify(rec, plan, t);
    CHECK(white_spaces(d).size() == 2);
}

TEST_CASE("empty record has no threshold") {
    CHECK_THROWS_AS(compute_threshold(SweepRecord{}), ArgumentError);
}

TEST_CASE("UHF scenario threshold sits between noise and the strongest multiplex") {
    const Scene scene = testing::uhf_scene();
    SimulatedFrontEnd fe(std::make_shared<const Scene>(scene), {});
    const Threshold t = compute_threshold(run_sweep(fe, {}));
    const double noise_bin = band_power(testing::noise_scene(), 0.0, 250'000.0);
    double strongest = -INFINITY;
    for (const auto& e : scene.emitters) {
        strongest = std::max(strongest, e.psd_db_per_hz() + 10.0 * std::log10(250e3));
    }
    CHECK(t.min_db == doctest::Approx(noise_bin).epsilon(1e-12));
    CHECK(t.max_db == doctest::Approx(lin_to_db(db_to_lin(strongest) + db_to_lin(noise_bin))).epsilon(1e-12));
    CHECK(t.gamma_db > noise_bin);
    CHECK(t.gamma_db < strongest);
}

TEST_CASE("verdict rules") {
    const auto plan = make_bandplan(471'250'000, 487'250'000, 8'000'000);
    // gamma = (-100 + -40) / 2 = -70
    SUBCASE("all samples well below gamma: free") {
        const auto rec = two_channels(std::vector<double>(32, -80.0), -100.0, -40.0);
        const auto d = classify(rec, plan, compute_threshold(rec));
        CHECK(d[0].verdict == Verdict::free);
        CHECK(d[0].n_exceeding == 0);
        CHECK(d[0].p_max_db == -80.0);
    }
    SUBCASE("one sample above gamma: occupied") {
        std::vector<double> p(32, -80.0);
        p[17] = -69.9;
        const auto rec = two_channels(p, -100.0, -40.0);
        const auto d = classify(rec, plan, compute_threshold(rec));
        CHECK(d[0].verdict == Verdict::occupied);
        CHECK(d[0].n_exceeding == 1);
        CHECK(d[0].p_max_db == -69.9);
    }
    SUBCASE("samples exactly at gamma: free") {
        const auto rec = two_channels(std::vector<double>(32, -70.0), -100.0, -40.0);
        const auto t = compute_threshold(rec);
        REQUIRE(t.gamma_db == -70.0);
        CHECK(classify(rec, plan, t)[0].verdict == Verdict::free);
    }
}

TEST_CASE("record and plan must agree") {
    const auto rec = record_of(std::vector<double>(64, -90.0), 471'250'000, 250'000);
    const auto t = compute_threshold(rec);
    CHECK_THROWS_AS(classify(rec, make_bandplan(471'250'000, 495'250'000, 8'000'000), t), ArgumentError);
    CHECK_THROWS_AS(classify(record_of(std::vector<double>(16, -90.0), 0, 3),
                             make_bandplan(0, 48, 8), compute_threshold(record_of({-1}))),
                    ArgumentError);
    SweepRecord truncated = rec;
    truncated.samples.pop_back();
    CHECK_THROWS_AS(classify(truncated, make_bandplan(471'250'000, 487'250'000, 8'000'000), t),
                    ArgumentError);
}

TEST_CASE("white_spaces") {
    std::vector<ChannelDecision> d(4);
    for (std::size_t k = 0; k < 4; ++k) {
        d[k].channel = k;
        d[k].verdict = Verdict::occupied;
    }
    CHECK(white_spaces(d).empty());
    for (auto& x : d) {
        x.verdict = Verdict::free;
    }
    CHECK(white_spaces(d) == std::vector<std::size_t>{0, 1, 2, 3});
    d[2].verdict = Verdict::occupied;
    CHECK(white_spaces(d) == std::vector<std::size_t>{0, 1, 3});
}

TEST_CASE("property: threshold bounds and degenerate midpoint over random records") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 1000; ++i) {
        const auto rec = testing::random_record(rng, 3, 32);
        const Threshold t = compute_threshold(rec);
        CHECK(t.min_db <= t.gamma_db);
        CHECK(t.gamma_db <= t.max_db);
    }
}

TEST_CASE("property: shift equivariance") {
    std::mt19937_64 rng(99);
    const auto plan = make_bandplan(471'250'000, 471'250'000 + 3 * 8'000'000, 8'000'000);
    for (int i = 0; i < 200; ++i) {
        const auto rec = testing::random_record(rng, 3, 32);
        const Threshold t = compute_threshold(rec);
        const auto base = classify(rec, plan, t);
        for (double c : {-30.0, -1.0, 0.5, 20.0}) {
            SweepRecord shifted = rec;
            for (auto& s : shifted.samples) {
                s.power_db += c;
            }
            const Threshold ts = compute_threshold(shifted);
            CHECK(ts.gamma_db == t.gamma_db + c);
            const auto d = classify(shifted, plan, ts);
            for (std::size_t k = 0; k < d.size(); ++k) {
                CHECK(d[k].verdict == base[k].verdict);
            }
        }
    }
}

TEST_CASE("property: raising a sample at fixed gamma never frees a channel") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> pick(0, 95);
    std::uniform_real_distribution<double> bump(0.0, 50.0);
    const auto plan = make_bandplan(471'250'000, 471'250'000 + 3 * 8'000'000, 8'000'000);
    for (int i = 0; i < 500; ++i) {
        auto rec = testing::random_record(rng, 3, 32);
        const Threshold t = compute_threshold(rec);
        const auto before = classify(rec, plan, t);
        rec.samples[pick(rng)].power_db += bump(rng);
        const auto after = classify(rec, plan, t);
        for (std::size_t k = 0; k < 3; ++k) {
            if (before[k].verdict == Verdict::occupied) {
                CHECK(after[k].verdict == Verdict::occupied);
            }
        }
    }
}

TEST_CASE("property: occupied and free partition the channels") {
    std::mt19937_64 rng(8);
    const auto plan = make_bandplan(471'250'000, 471'250'000 + 5 * 8'000'000, 8'000'000);
    for (int i = 0; i < 200; ++i) {
        const auto rec = testing::random_record(rng, 5, 32);
        const auto d = classify(rec, plan, compute_threshold(rec));
        const auto free = white_spaces(d);
        std::size_t occupied = 0;
        for (const auto& x : d) {
            occupied += x.verdict == Verdict::occupied;
            CHECK((x.verdict == Verdict::occupied) == (x.n_exceeding >= 1));
            CHECK((x.verdict == Verdict::occupied) == (x.p_max_db > compute_threshold(rec).gamma_db));
            if (x.verdict == Verdict::free) {
                CHECK(std::binary_search(free.begin(), free.end(), x.channel));
            }
        }
        CHECK(occupied + free.size() == plan.channel_count());
    }
}

TEST_CASE("property: classify matches the brute-force oracle") {
    std::mt19937_64 rng(31337);
    const Hz f_min = 471'250'000;
    const auto plan = make_bandplan(f_min, f_min + 3 * 8'000'000, 8'000'000);
    for (int i = 0; i < 1000; ++i) {
        const auto rec = testing::random_record(rng, 3, 32);
        const auto d = classify(rec, plan, compute_threshold(rec));
        const auto o = oracle::brute_classify(rec.samples, f_min, 8'000'000, 3);
        for (std::size_t k = 0; k < 3; ++k) {
            REQUIRE((d[k].verdict == Verdict::occupied) == o[k].occupied);
            REQUIRE(d[k].p_max_db == o[k].p_max);
            REQUIRE(d[k].n_exceeding == o[k].exceeding);
        }
    }
}

TEST_CASE("decisions CSV") {
    std::vector<ChannelDecision> d{{0, 471'250'000, 479'250'000, Verdict::occupied, -62.8254, 30},
                                   {1, 479'250'000, 487'250'000, Verdict::free, -116.0206, 0}};
    std::ostringstream out;
    write_decisions_csv(out, d);
    CHECK(out.str() ==
          "channel,f_start_hz,f_end_hz,verdict,p_max_db,n_exceeding\n"
          "0,471250000,479250000,occupied,-62.825,30\n"
          "1,479250000,487250000,free,-116.021,0\n");
}

}
