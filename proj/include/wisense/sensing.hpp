#pragma once

#include "wisense/channel.hpp"

#include <string>
#include <utility>

namespace wisense::sensing {

using channel::Cir;

// Fast-time x slow-time matrix, stored row-major (one row per tap).
struct RadarDataMatrix
{
    std::size_t n_fast = 0;
    std::size_t n_slow = 0;
    std::vector<cplx> samples;
    std::vector<double> fast_axis; // tap delays, s
    std::vector<double> slow_axis; // packet timestamps, s
    double pri = 0.0;              // s

    cplx &at(std::size_t fast, std::size_t slow) { return samples[fast * n_slow + slow]; }
    const cplx &at(std::size_t fast, std::size_t slow) const { return samples[fast * n_slow + slow]; }
    double prf() const { return 1.0 / pri; }
};

// [direction][fast][slow].
struct RadarDataCube
{
    std::size_t n_directions = 0;
    std::size_t n_fast = 0;
    std::size_t n_slow = 0;
    std::vector<cplx> samples;
    std::vector<std::size_t> direction_axis; // codebook indices
    std::vector<double> fast_axis;
    std::vector<double> slow_axis;
    double pri = 0.0;

    cplx &at(std::size_t d, std::size_t fast, std::size_t slow)
    {
        return samples[(d * n_fast + fast) * n_slow + slow];
    }
    const cplx &at(std::size_t d, std::size_t fast, std::size_t slow) const
    {
        return samples[(d * n_fast + fast) * n_slow + slow];
    }
    RadarDataMatrix slice(std::size_t d) const;
};

enum class WindowKind
{
    Rect,
    Hann,
    Hamming,
    BlackmanHarris,
};

std::string to_string(WindowKind kind);
WindowKind window_kind_from_string(const std::string &s);

struct WindowSpec
{
    WindowKind kind = WindowKind::BlackmanHarris;
    std::size_t length = 32;
    double overlap = 0.0; // fraction in [0, 1)
    std::size_t nfft = 128;

    void validate() const;
    std::size_t hop() const; // max(1, round(L (1 - o)))
    std::size_t frame_count(std::size_t n_slow) const;
};

// Doppler bins in centred layout: bin i has frequency (i - (nfft-1)/2) * prf / nfft,
// spanning (-prf/2, prf/2].
std::vector<double> doppler_axis(std::size_t nfft, double prf);
std::size_t doppler_center_index(std::size_t nfft);

struct RangeDopplerMap
{
    std::size_t n_fast = 0;
    std::size_t nfft = 0;
    std::vector<double> magnitudes; // [fast][doppler], linear
    std::vector<double> doppler_axis;
    std::vector<double> range_axis; // bi-static delay, s

    double at(std::size_t fast, std::size_t bin) const { return magnitudes[fast * nfft + bin]; }
};

struct Spectrogram
{
    std::size_t n_frames = 0;
    std::size_t nfft = 0;
    std::vector<double> magnitudes; // [frame][doppler], linear
    std::vector<double> frame_times;
    std::vector<double> doppler_axis;

    double at(std::size_t frame, std::size_t bin) const { return magnitudes[frame * nfft + bin]; }
};

enum class RangeCollapse
{
    Max,
    Sum,
};

RadarDataMatrix build_matrix(std::vector<std::pair<double, Cir>> cir_stream);

std::vector<double> window_coefficients(WindowKind kind, std::size_t length);

// Subtracts the slow-time mean of every fast-time row.
RadarDataMatrix clutter_removal(const RadarDataMatrix &m);

// Windowed, zero-padded Doppler DFT of slow-time samples
// [slow_start, slow_start + w.length) for every fast-time row.
RangeDopplerMap range_doppler(const RadarDataMatrix &m, const WindowSpec &w, std::size_t slow_start = 0);

Spectrogram stft_micro_doppler(const RadarDataMatrix &m, const WindowSpec &w,
                               RangeCollapse collapse = RangeCollapse::Max);

// Per-frame bin of the strongest Doppler component.
std::vector<std::size_t> peak_bins(const Spectrogram &sg);

// Highest Doppler (Hz) per frame whose magnitude is within floor_db of that
// frame's peak. Traces the upper micro-Doppler envelope.
std::vector<double> upper_envelope(const Spectrogram &sg, double floor_db = 20.0);

// Viterbi ridge through the dB spectrogram, paying jump_penalty_db for every
// bin moved between consecutive frames. Returns one bin per frame.
std::vector<std::size_t> ridge_track(const Spectrogram &sg, double jump_penalty_db = 0.5);

// Mono-static convention v = f_D * lambda / 2.
std::vector<double> velocity_axis(const std::vector<double> &doppler_hz, double wavelength);

} // namespace wisense::sensing
