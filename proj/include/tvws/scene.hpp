#pragma once

#include "tvws/units.hpp"

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tvws {

enum class EmitterKind { wideband_tv, narrowband_incumbent };

std::string_view to_string(EmitterKind kind);

// Wireless-microphone scale; narrower than the 250 kHz sweep step.
inline constexpr Hz kDefaultNarrowbandWidth = 200'000;

// Flat PSD over [f_center - bandwidth/2, f_center + bandwidth/2].
struct Emitter {
    Hz f_center = 0;
    Hz bandwidth = 0;
    double power_db = 0.0; // total power, scene-relative dB
    EmitterKind kind = EmitterKind::wideband_tv;

    double psd_db_per_hz() const { return power_db - lin_to_db(static_cast<double>(bandwidth)); }
    double f_low() const { return static_cast<double>(f_center) - 0.5 * static_cast<double>(bandwidth); }
    double f_high() const { return static_cast<double>(f_center) + 0.5 * static_cast<double>(bandwidth); }

    bool operator==(const Emitter&) const = default;
};

struct Scene {
    std::string label;
    double noise_psd_db_per_hz = -170.0;
    std::vector<Emitter> emitters;

    // Copy holding only the emitters of one kind.
    Scene only(EmitterKind kind) const;

    bool operator==(const Scene&) const = default;
};

// Parses the scene JSON document. Unknown keys, missing fields, wrong types and
// non-positive bandwidths raise ParseError carrying the field path.
Scene parse_scene(std::string_view text);
Scene load_scene(std::istream& source);
Scene load_scene_file(const std::filesystem::path& path);
std::string scene_to_json(const Scene& scene);

// Integrated power over [f_lo, f_hi], linear and dB. Throws ArgumentError on an
// empty band.
double band_power_lin(const Scene& scene, double f_lo, double f_hi);
double band_power(const Scene& scene, double f_lo, double f_hi);

using IqBlock = std::vector<std::complex<double>>;

// n baseband samples of the scene seen through a [f_center - rate/2,
// f_center + rate/2) window. Expected mean-square power equals
// band_power_lin over that window. Bit-identical for identical arguments.
IqBlock generate_iq(const Scene& scene, Hz f_center, Hz sample_rate, std::size_t n,
                    std::uint64_t seed);

} // namespace tvws
