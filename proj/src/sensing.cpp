#include "wisense/sensing.hpp"
#include "wisense/fft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wisense::sensing {

namespace {

void doppler_rows(const RadarDataMatrix &m, const std::vector<double> &window, std::size_t slow_start, Fft &fft,
                  std::vector<double> &magnitudes)
{
    const std::size_t n = fft.size(), len = window.size(), c = doppler_center_index(n);
    std::vector<cplx> seg(len), spec(n);
    magnitudes.assign(m.n_fast * n, 0.0);
    for (std::size_t r = 0; r < m.n_fast; ++r)
    {
        for (std::size_t k = 0; k < len; ++k)
            seg[k] = m.at(r, slow_start + k) * window[k];
        fft.forward(seg, spec);
        for (std::size_t i = 0; i < n; ++i)
        {
            // Shifted bin i holds frequency index i - c.
            const std::size_t src = (i + n - c) % n;
            magnitudes[r * n + i] = std::abs(spec[src]);
        }
    }
}

} // namespace

RadarDataMatrix RadarDataCube::slice(std::size_t d) const
{
    if (d >= n_directions)
        throw Error("cube", "direction index out of range");
    RadarDataMatrix m;
    m.n_fast = n_fast;
    m.n_slow = n_slow;
    const auto begin = samples.begin() + static_cast<std::ptrdiff_t>(d * n_fast * n_slow);
    m.samples.assign(begin, begin + static_cast<std::ptrdiff_t>(n_fast * n_slow));
    m.fast_axis = fast_axis;
    m.slow_axis = slow_axis;
    m.pri = pri;
    return m;
}

std::string to_string(WindowKind kind)
{
    switch (kind)
    {
    case WindowKind::Rect:
        return "rect";
    case WindowKind::Hann:
        return "hann";
    case WindowKind::Hamming:
        return "hamming";
    case WindowKind::BlackmanHarris:
        return "blackman-harris";
    }
    return "unknown";
}

WindowKind window_kind_from_string(const std::string &s)
{
    for (auto k : {WindowKind::Rect, WindowKind::Hann, WindowKind::Hamming, WindowKind::BlackmanHarris})
        if (s == to_string(k))
            return k;
    throw Error("window", "unknown window kind '" + s + "'");
}

void WindowSpec::validate() const
{
    if (length < 2)
        throw Error("window.length", "must be at least 2");
    if (nfft < length)
        throw Error("window.nfft", "must be at least the window length");
    if (!(overlap >= 0.0 && overlap < 1.0))
        throw Error("window.overlap", "must lie in [0, 1)");
}

std::size_t WindowSpec::hop() const
{
    const auto h = std::llround(static_cast<double>(length) * (1.0 - overlap));
    return static_cast<std::size_t>(std::max<long long>(1, h));
}

std::size_t WindowSpec::frame_count(std::size_t n_slow) const
{
    if (n_slow < length)
        return 0;
    return (n_slow - length) / hop() + 1;
}

std::size_t doppler_center_index(std::size_t nfft) { return (nfft - 1) / 2; }

std::vector<double> doppler_axis(std::size_t nfft, double prf)
{
    const auto c = static_cast<double>(doppler_center_index(nfft));
    std::vector<double> axis(nfft);
    for (std::size_t i = 0; i < nfft; ++i)
        axis[i] = (static_cast<double>(i) - c) * prf / static_cast<double>(nfft);
    return axis;
}

RadarDataMatrix build_matrix(std::vector<std::pair<double, Cir>> cir_stream)
{
    if (cir_stream.empty())
        throw Error("stream", "no CIRs");
    std::stable_sort(cir_stream.begin(), cir_stream.end(),
                     [](const auto &a, const auto &b) { return a.first < b.first; });
    const auto grid = cir_stream.front().second.grid();
    if (grid.n_taps == 0)
        throw Error("stream", "empty CIR");

    RadarDataMatrix m;
    m.n_fast = grid.n_taps;
    m.n_slow = cir_stream.size();
    m.samples.resize(m.n_fast * m.n_slow);
    for (std::size_t k = 0; k < grid.n_taps; ++k)
        m.fast_axis.push_back(grid.delay(k));

    const std::size_t n = cir_stream.size();
    m.pri = n > 1 ? (cir_stream.back().first - cir_stream.front().first) / static_cast<double>(n - 1) : 0.0;
    for (std::size_t s = 0; s < n; ++s)
    {
        const auto &[t, cir] = cir_stream[s];
        if (cir.grid() != grid)
            throw Error("stream", "CIRs use mismatched tap grids");
        if (s > 0)
        {
            const double step = t - cir_stream[s - 1].first;
            if (!(std::abs(step - m.pri) <= 1e-6 * m.pri))
            {
                std::ostringstream msg;
                msg << "non-uniform timestamps at packet " << s << " (reconstruct irregular feedback first)";
                throw Error("stream", msg.str());
            }
        }
        m.slow_axis.push_back(t);
        for (std::size_t k = 0; k < grid.n_taps; ++k)
            m.at(k, s) = cir.taps[k];
    }
    return m;
}

std::vector<double> window_coefficients(WindowKind kind, std::size_t length)
{
    if (length < 2)
        throw Error("window.length", "must be at least 2");
    std::vector<double> w(length);
    const double denom = static_cast<double>(length - 1);
    for (std::size_t k = 0; k < length; ++k)
    {
        // Evaluate on the lower half only so the result is exactly symmetric.
        const double x = 2.0 * kPi * static_cast<double>(std::min(k, length - 1 - k)) / denom;
        switch (kind)
        {
        case WindowKind::Rect:
            w[k] = 1.0;
            break;
        case WindowKind::Hann:
            w[k] = 0.5 - 0.5 * std::cos(x);
            break;
        case WindowKind::Hamming:
            w[k] = 0.54 - 0.46 * std::cos(x);
            break;
        case WindowKind::BlackmanHarris:
            w[k] = 0.35875 - 0.48829 * std::cos(x) + 0.14128 * std::cos(2.0 * x) - 0.01168 * std::cos(3.0 * x);
            break;
        }
    }
    if (kind == WindowKind::Hann)
        w.front() = w.back() = 0.0;
    return w;
}

RadarDataMatrix clutter_removal(const RadarDataMatrix &m)
{
    RadarDataMatrix out = m;
    if (m.n_slow == 0)
        return out;
    for (std::size_t r = 0; r < m.n_fast; ++r)
    {
        cplx mean{};
        for (std::size_t s = 0; s < m.n_slow; ++s)
            mean += m.at(r, s);
        mean /= static_cast<double>(m.n_slow);
        for (std::size_t s = 0; s < m.n_slow; ++s)
            out.at(r, s) = m.at(r, s) - mean;
    }
    return out;
}

RangeDopplerMap range_doppler(const RadarDataMatrix &m, const WindowSpec &w, std::size_t slow_start)
{
    w.validate();
    if (slow_start + w.length > m.n_slow)
        throw Error("range_doppler", "slow-time slice exceeds the matrix");
    Fft fft(w.nfft);
    RangeDopplerMap map;
    map.n_fast = m.n_fast;
    map.nfft = w.nfft;
    doppler_rows(m, window_coefficients(w.kind, w.length), slow_start, fft, map.magnitudes);
    map.doppler_axis = doppler_axis(w.nfft, m.prf());
    map.range_axis = m.fast_axis;
    return map;
}

Spectrogram stft_micro_doppler(const RadarDataMatrix &m, const WindowSpec &w, RangeCollapse collapse)
{
    w.validate();
    if (m.n_slow < w.length)
        throw Error("stft", "fewer slow-time samples than the window length");
    const std::size_t hop = w.hop(), frames = w.frame_count(m.n_slow);
    const auto window = window_coefficients(w.kind, w.length);
    Fft fft(w.nfft);

    Spectrogram sg;
    sg.n_frames = frames;
    sg.nfft = w.nfft;
    sg.magnitudes.assign(frames * w.nfft, 0.0);
    sg.doppler_axis = doppler_axis(w.nfft, m.prf());
    std::vector<double> rd;
    for (std::size_t f = 0; f < frames; ++f)
    {
        const std::size_t start = f * hop;
        doppler_rows(m, window, start, fft, rd);
        for (std::size_t i = 0; i < w.nfft; ++i)
        {
            double acc = 0.0;
            for (std::size_t r = 0; r < m.n_fast; ++r)
            {
                const double v = rd[r * w.nfft + i];
                acc = collapse == RangeCollapse::Max ? std::max(acc, v) : acc + v;
            }
            sg.magnitudes[f * w.nfft + i] = acc;
        }
        sg.frame_times.push_back(m.slow_axis[start] + 0.5 * static_cast<double>(w.length - 1) * m.pri);
    }
    return sg;
}

std::vector<std::size_t> peak_bins(const Spectrogram &sg)
{
    std::vector<std::size_t> out(sg.n_frames);
    for (std::size_t f = 0; f < sg.n_frames; ++f)
    {
        const auto row = sg.magnitudes.begin() + static_cast<std::ptrdiff_t>(f * sg.nfft);
        out[f] = static_cast<std::size_t>(std::max_element(row, row + static_cast<std::ptrdiff_t>(sg.nfft)) - row);
    }
    return out;
}

std::vector<double> upper_envelope(const Spectrogram &sg, double floor_db)
{
    if (!(floor_db > 0.0))
        throw Error("floor_db", "must be positive");
    const double ratio = std::pow(10.0, -floor_db / 20.0);
    const auto peaks = peak_bins(sg);
    std::vector<double> out(sg.n_frames);
    for (std::size_t f = 0; f < sg.n_frames; ++f)
    {
        const double level = sg.at(f, peaks[f]) * ratio;
        std::size_t top = peaks[f];
        for (std::size_t i = top; i < sg.nfft; ++i)
            if (sg.at(f, i) >= level)
                top = i;
        out[f] = sg.doppler_axis[top];
    }
    return out;
}

std::vector<std::size_t> ridge_track(const Spectrogram &sg, double jump_penalty_db)
{
    if (!(jump_penalty_db >= 0.0))
        throw Error("jump_penalty_db", "must be non-negative");
    const std::size_t nf = sg.n_frames, nb = sg.nfft;
    if (nf == 0)
        return {};
    auto db = [&](std::size_t f, std::size_t i) { return 20.0 * std::log10(std::max(sg.at(f, i), 1e-300)); };

    std::vector<double> score(nb), next(nb);
    std::vector<std::size_t> back(nf * nb, 0);
    for (std::size_t i = 0; i < nb; ++i)
        score[i] = db(0, i);
    for (std::size_t f = 1; f < nf; ++f)
    {
        for (std::size_t i = 0; i < nb; ++i)
        {
            double best = -std::numeric_limits<double>::infinity();
            std::size_t arg = 0;
            for (std::size_t j = 0; j < nb; ++j)
            {
                const double jump = std::abs(static_cast<double>(i) - static_cast<double>(j));
                const double v = score[j] - jump_penalty_db * jump;
                if (v > best)
                {
                    best = v;
                    arg = j;
                }
            }
            next[i] = best + db(f, i);
            back[f * nb + i] = arg;
        }
        score.swap(next);
    }
    std::vector<std::size_t> path(nf);
    path[nf - 1] = static_cast<std::size_t>(std::max_element(score.begin(), score.end()) - score.begin());
    for (std::size_t f = nf - 1; f > 0; --f)
        path[f - 1] = back[f * nb + path[f]];
    return path;
}

std::vector<double> velocity_axis(const std::vector<double> &doppler_hz, double wavelength)
{
    if (!(wavelength > 0.0))
        throw Error("wavelength", "must be positive");
    std::vector<double> v(doppler_hz.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = doppler_hz[i] * wavelength / 2.0;
    return v;
}

} // namespace wisense::sensing
