#pragma once

#include <cmath>
#include <cstdint>

namespace tvws {

// Frequencies are exact integer Hz everywhere; band edges that can land on
// half-Hz values are handled as double only inside the power integrals.
using Hz = std::int64_t;

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }

} // namespace tvws
