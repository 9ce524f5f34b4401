#pragma once

#include "wisense/common.hpp"

#include <span>

namespace wisense {

// Forward complex DFT of fixed size backed by an FFTW plan,
// X[k] = sum_n x[n] exp(-j 2 pi k n / N). Not copyable; one instance per
// thread.
class Fft
{
public:
    explicit Fft(std::size_t n);
    ~Fft();
    Fft(const Fft &) = delete;
    Fft &operator=(const Fft &) = delete;

    std::size_t size() const { return n_; }

    // `in` may be shorter than size(); the remainder is zero-padded.
    void forward(std::span<const cplx> in, std::span<cplx> out);

private:
    std::size_t n_;
    cplx *in_ = nullptr;
    cplx *out_ = nullptr;
    void *plan_ = nullptr;
};

} // namespace wisense
