#include "vortexpacket/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>

#include "vortexpacket/errors.hpp"

namespace vortex {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

double fft_wavenumber(int i, int n, double dx) {
    const int j = (i < n / 2) ? i : i - n;
    return 2.0 * std::numbers::pi * j / (n * dx);
}

namespace {

// Plan creation is not thread-safe in FFTW; execution on distinct buffers is.
std::mutex plan_mutex;
std::map<std::pair<int, int>, fftw_plan>& plan_cache() {
    static std::map<std::pair<int, int>, fftw_plan> cache;
    return cache;
}

fftw_plan get_plan(int n, int sign) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto& cache = plan_cache();
    const auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    // FFTW_UNALIGNED: the plan is reused on arbitrary caller buffers.
    std::vector<std::complex<double>> scratch(static_cast<size_t>(n) * n);
    auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan =
        fftw_plan_dft_2d(n, n, ptr, ptr, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, plan);
    return plan;
}

}  // namespace

void fft2(std::vector<std::complex<double>>& data, int n, bool inverse) {
    if (!is_power_of_two(n))
        throw Error(ErrorCode::invalid_argument, "fft2: grid size must be a power of two");
    if (data.size() != static_cast<size_t>(n) * n)
        throw Error(ErrorCode::invalid_argument, "fft2: buffer size does not match grid");
    fftw_plan plan = get_plan(n, inverse ? FFTW_BACKWARD : FFTW_FORWARD);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, ptr, ptr);
    if (inverse) {
        const double scale = 1.0 / (static_cast<double>(n) * n);
        for (auto& v : data) v *= scale;
    }
}

}  // namespace vortex
