#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace tvws::detail {
namespace {

// The FFTW planner is not reentrant; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};

void transform(std::span<std::complex<double>> data, int sign) {
    if (data.empty()) {
        return;
    }
    const int n = static_cast<int>(data.size());
    // Always run on an fftw_malloc'd buffer so the plan (and therefore the
    // bit pattern of the result) does not depend on caller alignment.
    std::unique_ptr<fftw_complex, FftwFree> buf(fftw_alloc_complex(data.size()));
    if (!buf) {
        throw std::bad_alloc();
    }
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_1d(n, buf.get(), buf.get(), sign, FFTW_ESTIMATE);
    }
    if (plan == nullptr) {
        throw std::runtime_error("fftw: planning failed");
    }
    std::copy(data.begin(), data.end(), reinterpret_cast<std::complex<double>*>(buf.get()));
    fftw_execute(plan);
    std::copy_n(reinterpret_cast<const std::complex<double>*>(buf.get()), data.size(), data.begin());
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
}

} // namespace

void fft_forward(std::span<std::complex<double>> data) { transform(data, FFTW_FORWARD); }
void fft_backward(std::span<std::complex<double>> data) { transform(data, FFTW_BACKWARD); }

} // namespace tvws::detail
