#include "tvws/detect.hpp"

#include "tvws/error.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>

namespace tvws {

std::string_view to_string(Verdict v) {
    return v == Verdict::occupied ? "occupied" : "free";
}

Threshold compute_threshold(std::span<const PowerSample> samples) {
    if (samples.empty()) {
        throw ArgumentError("cannot compute a threshold over an empty sweep");
    }
    const auto [lo, hi] = std::minmax_element(
        samples.begin(), samples.end(),
        [](const PowerSample& a, const PowerSample& b) { return a.power_db < b.power_db; });
    Threshold t;
    t.min_db = lo->power_db;
    t.max_db = hi->power_db;
    t.gamma_db = (t.min_db + t.max_db) / 2.0;
    return t;
}

Threshold compute_threshold(const SweepRecord& record) { return compute_threshold(record.samples); }

std::vector<ChannelDecision> classify(const SweepRecord& record, const BandPlan& plan,
                                      const Threshold& threshold) {
    const SweepConfig& cfg = record.config;
    if (cfg.f_min != plan.f_min() || cfg.f_max != plan.f_max()) {
        throw ArgumentError("sweep range [" + std::to_string(cfg.f_min) + ", " +
                            std::to_string(cfg.f_max) + ") does not match band plan [" +
                            std::to_string(plan.f_min()) + ", " + std::to_string(plan.f_max()) +
                            ")");
    }
    try {
        samples_per_channel(plan, cfg.step);
    } catch (const ConfigError& e) {
        throw ArgumentError(e.what());
    }
    if (cfg.step <= 0 ||
        record.samples.size() != static_cast<std::size_t>((cfg.f_max - cfg.f_min) / cfg.step)) {
        throw ArgumentError("sweep holds " + std::to_string(record.samples.size()) +
                            " samples, expected one per step");
    }

    std::vector<ChannelDecision> out(plan.channel_count());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].channel = k;
        out[k].f_start = plan.channel_start(k);
        out[k].f_end = plan.channel_end(k);
        out[k].p_max_db = -std::numeric_limits<double>::infinity();
    }
    for (const auto& s : record.samples) {
        auto& d = out[channel_of(plan, s.f_center)];
        d.p_max_db = std::max(d.p_max_db, s.power_db);
        if (s.power_db > threshold.gamma_db) {
            ++d.n_exceeding;
        }
    }
    for (auto& d : out) {
        d.verdict = d.n_exceeding > 0 ? Verdict::occupied : Verdict::free;
    }
    return out;
}

std::vector<std::size_t> white_spaces(std::span<const ChannelDecision> decisions) {
    std::vector<std::size_t> out;
    for (const auto& d : decisions) {
        if (d.verdict == Verdict::free) {
            out.push_back(d.channel);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

void write_decisions_csv(std::ostream& out, std::span<const ChannelDecision> decisions) {
    out << "channel,f_start_hz,f_end_hz,verdict,p_max_db,n_exceeding\n";
    char line[160];
    for (const auto& d : decisions) {
        std::snprintf(line, sizeof line, "%zu,%lld,%lld,%s,%.3f,%zu\n", d.channel,
                      static_cast<long long>(d.f_start), static_cast<long long>(d.f_end),
                      d.verdict == Verdict::occupied ? "occupied" : "free", d.p_max_db,
                      d.n_exceeding);
        out << line;
    }
}

} // namespace tvws
