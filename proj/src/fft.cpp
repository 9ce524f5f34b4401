#include "wisense/fft.hpp"

#include <algorithm>
#include <fftw3.h>
#include <mutex>

namespace wisense {

namespace {
// The FFTW planner is not re-entrant.
std::mutex &planner_mutex()
{
    static std::mutex m;
    return m;
}
} // namespace

Fft::Fft(std::size_t n) : n_(n)
{
    if (n == 0)
        throw Error("nfft", "must be positive");
    std::lock_guard lock(planner_mutex());
    in_ = reinterpret_cast<cplx *>(fftw_malloc(sizeof(fftw_complex) * n));
    out_ = reinterpret_cast<cplx *>(fftw_malloc(sizeof(fftw_complex) * n));
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex *>(in_),
                             reinterpret_cast<fftw_complex *>(out_), FFTW_FORWARD, FFTW_ESTIMATE);
    if (!plan_)
        throw Error("fft", "planner failed");
}

Fft::~Fft()
{
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    fftw_free(in_);
    fftw_free(out_);
}

void Fft::forward(std::span<const cplx> in, std::span<cplx> out)
{
    if (in.size() > n_ || out.size() < n_)
        throw Error("fft", "buffer size mismatch");
    std::copy(in.begin(), in.end(), in_);
    std::fill(in_ + in.size(), in_ + n_, cplx{});
    fftw_execute(static_cast<fftw_plan>(plan_));
    std::copy(out_, out_ + n_, out.begin());
}

} // namespace wisense
