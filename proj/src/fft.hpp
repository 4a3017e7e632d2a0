#pragma once

#include <complex>
#include <span>

namespace tvws::detail {

// Unnormalized in-place DFT of any length (FFTW backed).
void fft_forward(std::span<std::complex<double>> data);
void fft_backward(std::span<std::complex<double>> data);

// Signed frequency index of DFT bin k for a length-n transform.
inline long long signed_bin(std::size_t k, std::size_t n) {
    const auto kk = static_cast<long long>(k);
    return kk < static_cast<long long>((n + 1) / 2) ? kk : kk - static_cast<long long>(n);
}

// Intervals (in units of bin width, relative to DC) that DFT bin k owns. The
// bins partition [-n/2, n/2) exactly; for even n the Nyquist bin owns one
// half-bin at each window edge.
struct BinSpan {
    double lo[2];
    double hi[2];
    int parts;
};

inline BinSpan bin_span(std::size_t k, std::size_t n) {
    const double s = static_cast<double>(signed_bin(k, n));
    const double half = 0.5 * static_cast<double>(n);
    if (n % 2 == 0 && s == -half) {
        return {{-half, half - 0.5}, {-half + 0.5, half}, 2};
    }
    return {{s - 0.5, 0.0}, {s + 0.5, 0.0}, 1};
}

} // namespace tvws::detail
