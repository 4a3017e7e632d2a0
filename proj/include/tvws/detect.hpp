#pragma once

#include "tvws/bandplan.hpp"
#include "tvws/sweep.hpp"

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace tvws {

// Midpoint of the lowest and highest sample power, in dB.
struct Threshold {
    double gamma_db = 0.0;
    double min_db = 0.0;
    double max_db = 0.0;
};

enum class Verdict { occupied, free };

std::string_view to_string(Verdict v);

struct ChannelDecision {
    std::size_t channel = 0;
    Hz f_start = 0;
    Hz f_end = 0;
    Verdict verdict = Verdict::free;
    double p_max_db = 0.0;
    std::size_t n_exceeding = 0; // samples strictly above gamma

    bool operator==(const ChannelDecision&) const = default;
};

// Throws ArgumentError on an empty collection.
Threshold compute_threshold(std::span<const PowerSample> samples);
Threshold compute_threshold(const SweepRecord& record);

// One decision per channel of `plan`. A channel is occupied as soon as one of
// its samples exceeds gamma; it is free only when every sample is <= gamma.
// The record must cover exactly the plan's range with a step that divides the
// channel width, otherwise ArgumentError.
std::vector<ChannelDecision> classify(const SweepRecord& record, const BandPlan& plan,
                                      const Threshold& threshold);

// Indices of free channels, ascending.
std::vector<std::size_t> white_spaces(std::span<const ChannelDecision> decisions);

// `channel,f_start_hz,f_end_hz,verdict,p_max_db,n_exceeding` CSV.
void write_decisions_csv(std::ostream& out, std::span<const ChannelDecision> decisions);

} // namespace tvws
