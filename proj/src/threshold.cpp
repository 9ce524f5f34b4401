#include "wisense/threshold.hpp"

#include <algorithm>

namespace wisense::threshold {

double FeedbackLog::reduction() const
{
    if (n_total == 0)
        return 0.0;
    return 1.0 - static_cast<double>(reported.size()) / static_cast<double>(n_total);
}

double trrs(const Cir &a, const Cir &b)
{
    if (a.grid() != b.grid())
        throw Error("trrs", "CIRs use different tap grids");
    const auto n = static_cast<std::ptrdiff_t>(a.taps.size());
    double ea = 0.0, eb = 0.0;
    for (std::ptrdiff_t k = 0; k < n; ++k)
    {
        ea += a.taps[k].real() * a.taps[k].real() + a.taps[k].imag() * a.taps[k].imag();
        eb += b.taps[k].real() * b.taps[k].real() + b.taps[k].imag() * b.taps[k].imag();
    }
    if (!(ea > 0.0) || !(eb > 0.0))
        throw Error("trrs", "zero-energy CIR");

    // c[lag] = sum_k a[k] conj(b[k - lag]).
    double best = 0.0;
    for (std::ptrdiff_t lag = -(n - 1); lag <= n - 1; ++lag)
    {
        double re = 0.0, im = 0.0;
        for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(0, lag); k < std::min(n, n + lag); ++k)
        {
            const cplx &x = a.taps[k];
            const cplx &y = b.taps[k - lag];
            re += x.real() * y.real() + x.imag() * y.imag();
            im += x.imag() * y.real() - x.real() * y.imag();
        }
        best = std::max(best, std::hypot(re, im));
    }
    return std::min(1.0, best / std::sqrt(ea * eb));
}

double csi_variation(const Cir &a, const Cir &b) { return 1.0 - trrs(a, b); }

FeedbackLog apply_policy(const CirStream &stream, double threshold)
{
    if (stream.empty())
        throw Error("stream", "empty CIR stream");
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw Error("threshold", "must lie in [0, 1]");
    FeedbackLog log;
    log.threshold = threshold;
    log.n_total = stream.size();
    log.variations.reserve(stream.size());
    log.reported.push_back({0, stream[0].first, stream[0].second});
    log.variations.push_back(0.0);
    for (std::size_t k = 1; k < stream.size(); ++k)
    {
        const double v = csi_variation(log.reported.back().cir, stream[k].second);
        log.variations.push_back(v);
        if (v > threshold)
            log.reported.push_back({k, stream[k].first, stream[k].second});
    }
    return log;
}

CirStream reconstruct(const FeedbackLog &log, const phy::PacketSchedule &schedule)
{
    if (log.reported.empty())
        throw Error("feedback", "log has no reports");
    const auto ts = schedule.timestamps();
    const auto &reps = log.reported;
    CirStream out;
    out.reserve(ts.size());
    for (double t : ts)
    {
        const auto it = std::lower_bound(reps.begin(), reps.end(), t,
                                         [](const Report &r, double v) { return r.timestamp < v; });
        if (it == reps.end())
        {
            out.emplace_back(t, reps.back().cir);
            continue;
        }
        if (it->timestamp == t || it == reps.begin())
        {
            out.emplace_back(t, it->cir);
            continue;
        }
        const Report &lo = *(it - 1), &hi = *it;
        const double w = (t - lo.timestamp) / (hi.timestamp - lo.timestamp);
        Cir c = lo.cir;
        for (std::size_t k = 0; k < c.taps.size(); ++k)
        {
            const cplx &a = lo.cir.taps[k], &b = hi.cir.taps[k];
            c.taps[k] = {a.real() + w * (b.real() - a.real()), a.imag() + w * (b.imag() - a.imag())};
        }
        out.emplace_back(t, std::move(c));
    }
    return out;
}

} // namespace wisense::threshold
