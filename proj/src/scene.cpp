#include "tvws/scene.hpp"

#include "fft.hpp"
#include "tvws/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>

namespace tvws {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ParseError(path + "/" + key, "unknown field");
        }
    }
}

const json& require(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParseError(path + "/" + key, "missing field");
    }
    return *it;
}

double require_finite(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (!v.is_number()) {
        throw ParseError(path + "/" + key, "expected a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        throw ParseError(path + "/" + key, "expected a finite number");
    }
    return d;
}

Hz require_hz(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (v.is_number_unsigned()) {
        const auto u = v.get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(std::numeric_limits<Hz>::max())) {
            throw ParseError(path + "/" + key, "frequency out of range");
        }
        return static_cast<Hz>(u);
    }
    if (!v.is_number_integer()) {
        throw ParseError(path + "/" + key, "expected an integer number of Hz");
    }
    return v.get<Hz>();
}

EmitterKind parse_kind(const json& v, const std::string& path) {
    if (!v.is_string()) {
        throw ParseError(path, "expected a string");
    }
    const auto& s = v.get_ref<const std::string&>();
    if (s == "wideband_tv") {
        return EmitterKind::wideband_tv;
    }
    if (s == "narrowband_incumbent") {
        return EmitterKind::narrowband_incumbent;
    }
    throw ParseError(path, "unknown emitter kind '" + s + "'");
}

// Length of [a_lo, a_hi] ∩ [b_lo, b_hi].
double overlap(double a_lo, double a_hi, double b_lo, double b_hi) {
    return std::max(0.0, std::min(a_hi, b_hi) - std::max(a_lo, b_lo));
}

} // namespace

std::string_view to_string(EmitterKind kind) {
    switch (kind) {
    case EmitterKind::wideband_tv:
        return "wideband_tv";
    case EmitterKind::narrowband_incumbent:
        return "narrowband_incumbent";
    }
    return "?";
}

Scene Scene::only(EmitterKind kind) const {
    Scene out{label, noise_psd_db_per_hz, {}};
    std::copy_if(emitters.begin(), emitters.end(), std::back_inserter(out.emitters),
                 [kind](const Emitter& e) { return e.kind == kind; });
    return out;
}

Scene parse_scene(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("", std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("", "scene must be a JSON object");
    }
    reject_unknown_keys(doc, "", {"label", "noise_psd_db_per_hz", "emitters"});

    Scene scene;
    const json& label = require(doc, "", "label");
    if (!label.is_string()) {
        throw ParseError("/label", "expected a string");
    }
    scene.label = label.get<std::string>();
    scene.noise_psd_db_per_hz = require_finite(doc, "", "noise_psd_db_per_hz");

    const json& emitters = require(doc, "", "emitters");
    if (!emitters.is_array()) {
        throw ParseError("/emitters", "expected an array");
    }
    for (std::size_t i = 0; i < emitters.size(); ++i) {
        const std::string path = "/emitters/" + std::to_string(i);
        const json& e = emitters[i];
        if (!e.is_object()) {
            throw ParseError(path, "expected an object");
        }
        reject_unknown_keys(e, path, {"f_center_hz", "bandwidth_hz", "power_db", "kind"});
        Emitter em;
        em.f_center = require_hz(e, path, "f_center_hz");
        em.bandwidth = require_hz(e, path, "bandwidth_hz");
        if (em.bandwidth <= 0) {
            throw ParseError(path + "/bandwidth_hz", "bandwidth must be positive");
        }
        em.power_db = require_finite(e, path, "power_db");
        em.kind = parse_kind(require(e, path, "kind"), path + "/kind");
        scene.emitters.push_back(em);
    }
    return scene;
}

Scene load_scene(std::istream& source) {
    std::ostringstream buf;
    buf << source.rdbuf();
    return parse_scene(buf.str());
}

Scene load_scene_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("", "cannot open scene file " + path.string());
    }
    return load_scene(in);
}

std::string scene_to_json(const Scene& scene) {
    nlohmann::ordered_json doc;
    doc["label"] = scene.label;
    doc["noise_psd_db_per_hz"] = scene.noise_psd_db_per_hz;
    doc["emitters"] = nlohmann::ordered_json::array();
    for (const auto& e : scene.emitters) {
        doc["emitters"].push_back({{"f_center_hz", e.f_center},
                                   {"bandwidth_hz", e.bandwidth},
                                   {"power_db", e.power_db},
                                   {"kind", std::string(to_string(e.kind))}});
    }
    return doc.dump(2);
}

double band_power_lin(const Scene& scene, double f_lo, double f_hi) {
    if (!(f_hi > f_lo)) {
        throw ArgumentError("empty band [" + std::to_string(f_lo) + ", " + std::to_string(f_hi) +
                            "]");
    }
    double total = db_to_lin(scene.noise_psd_db_per_hz) * (f_hi - f_lo);
    for (const auto& e : scene.emitters) {
        total += db_to_lin(e.psd_db_per_hz()) * overlap(e.f_low(), e.f_high(), f_lo, f_hi);
    }
    return total;
}

double band_power(const Scene& scene, double f_lo, double f_hi) {
    return lin_to_db(band_power_lin(scene, f_lo, f_hi));
}

IqBlock generate_iq(const Scene& scene, Hz f_center, Hz sample_rate, std::size_t n,
                    std::uint64_t seed) {
    if (n == 0) {
        throw ArgumentError("generate_iq needs n > 0");
    }
    if (sample_rate <= 0) {
        throw ArgumentError("generate_iq needs a positive sample rate");
    }
    std::mt19937_64 rng(seed);
    // Circularly-symmetric CN(0, 1): each quadrature carries half the power.
    std::normal_distribution<double> unit(0.0, std::sqrt(0.5));

    const double fs = static_cast<double>(sample_rate);
    const double fc = static_cast<double>(f_center);
    const double bin_width = fs / static_cast<double>(n);

    IqBlock out(n);
    const double noise_amp = std::sqrt(db_to_lin(scene.noise_psd_db_per_hz) * fs);
    for (auto& x : out) {
        const double re = unit(rng);
        const double im = unit(rng);
        x = noise_amp * std::complex<double>(re, im);
    }

    // Each emitter contributes an independent white Gaussian spectrum masked to
    // its in-band bins; bin k is weighted by the emitter power it owns.
    IqBlock spectrum(n, {0.0, 0.0});
    bool any = false;
    const double nd = static_cast<double>(n);
    for (const auto& e : scene.emitters) {
        if (overlap(e.f_low(), e.f_high(), fc - fs / 2, fc + fs / 2) <= 0.0) {
            continue;
        }
        any = true;
        const double psd = db_to_lin(e.psd_db_per_hz());
        for (std::size_t k = 0; k < n; ++k) {
            const auto span = detail::bin_span(k, n);
            double owned = 0.0;
            for (int p = 0; p < span.parts; ++p) {
                owned += overlap(e.f_low(), e.f_high(), fc + span.lo[p] * bin_width,
                                 fc + span.hi[p] * bin_width);
            }
            const double re = unit(rng);
            const double im = unit(rng);
            if (owned > 0.0) {
                spectrum[k] += nd * std::sqrt(psd * owned) * std::complex<double>(re, im);
            }
        }
    }
    if (any) {
        detail::fft_backward(spectrum);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] += spectrum[i] / nd;
        }
    }
    return out;
}

} // namespace tvws
