#pragma once

#include "tvws/scene.hpp"
#include "tvws/sweep.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace tvws::testing {

inline std::filesystem::path source_dir() { return TVWS_SOURCE_DIR; }
inline std::filesystem::path scenes_dir() { return source_dir() / "scenes"; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("tvws-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

inline Scene uhf_scene() { return load_scene_file(scenes_dir() / "uhf_scenario.json"); }

inline Scene noise_scene(double noise_db = -170.0) { return Scene{"noise", noise_db, {}}; }

// A record over `channels` plan channels with random dB powers. Powers are
// multiples of 1/64 dB so sums and shifts stay exact in binary floating point.
inline SweepRecord random_record(std::mt19937_64& rng, std::size_t channels, std::size_t per_channel,
                                 Hz f_min = 471'250'000, Hz step = 250'000) {
    SweepRecord rec;
    rec.config = {f_min, f_min + static_cast<Hz>(channels * per_channel) * step, step, 0.001};
    std::uniform_int_distribution<int> level(-130 * 64, -30 * 64);
    std::bernoulli_distribution spike(0.05);
    std::uniform_int_distribution<int> base_pick(0, 3);
    const double base = -110.0 + 5.0 * base_pick(rng);
    for (std::size_t i = 0; i < channels * per_channel; ++i) {
        // Mostly a flat floor with sparse spikes, so both verdicts show up.
        const double p = spike(rng) ? level(rng) / 64.0 : base + (level(rng) % 64) / 64.0;
        rec.samples.push_back({f_min + static_cast<Hz>(i) * step, p});
    }
    return rec;
}

} // namespace tvws::testing
