#include "wisense/angles.hpp"
#include "wisense/fft.hpp"

#include <algorithm>

namespace wisense::angles {

std::vector<double> cpi_midpoints(const sensing::RadarDataCube &cube, std::size_t cpi_len)
{
    if (cpi_len == 0)
        throw Error("cpi", "length must be positive");
    std::vector<double> mids;
    for (std::size_t c = 0; (c + 1) * cpi_len <= cube.n_slow; ++c)
        mids.push_back(0.5 * (cube.slow_axis[c * cpi_len] + cube.slow_axis[(c + 1) * cpi_len - 1]));
    return mids;
}

std::vector<AngleEstimate> estimate_angles(const sensing::RadarDataCube &cube, const phy::Codebook &codebook,
                                           const EstimatorOptions &opts)
{
    const std::size_t len = opts.cpi_len;
    if (len < 2)
        throw Error("cpi", "length must be at least 2");
    if (opts.nfft < len)
        throw Error("cpi", "FFT length must cover the CPI");
    if (cube.n_slow < len)
        throw Error("cpi", "cube shorter than one CPI");
    if (cube.direction_axis.size() != cube.n_directions)
        throw Error("cube", "direction axis does not match the cube");
    for (std::size_t idx : cube.direction_axis)
        if (idx >= codebook.size())
            throw Error("cube", "direction index outside the codebook");

    const auto mids = cpi_midpoints(cube, len);
    Fft fft(opts.nfft);
    std::vector<cplx> seg(len), spec(opts.nfft);
    std::vector<AngleEstimate> out;
    for (std::size_t c = 0; c < mids.size(); ++c)
    {
        std::size_t best_d = 0;
        double best_p = -1.0;
        for (std::size_t d = 0; d < cube.n_directions; ++d)
        {
            double power = 0.0;
            for (std::size_t r = 0; r < cube.n_fast; ++r)
            {
                cplx mean{};
                for (std::size_t k = 0; k < len; ++k)
                    mean += cube.at(d, r, c * len + k);
                mean /= static_cast<double>(len);
                for (std::size_t k = 0; k < len; ++k)
                    seg[k] = cube.at(d, r, c * len + k) - mean;
                fft.forward(seg, spec);
                for (std::size_t b = 1; b < opts.nfft; ++b)
                    power += std::norm(spec[b]);
            }
            if (power > best_p)
            {
                best_p = power;
                best_d = d;
            }
        }
        if (!(best_p > 0.0))
            throw Error("angles", "no target power in CPI " + std::to_string(c));
        const std::size_t idx = cube.direction_axis[best_d];
        const Direction dir = codebook.direction(idx);
        out.push_back({c, dir.azimuth, dir.elevation, idx, best_p, mids[c]});
    }
    return out;
}

std::vector<Direction> ground_truth_angles(const kinematics::JointTrajectory &traj, const Vec3 &node_pos,
                                           const phy::ArrayMount &mount, const std::vector<double> &timestamps)
{
    std::vector<Direction> out;
    out.reserve(timestamps.size());
    for (double t : timestamps)
    {
        const auto joints = traj.sample_at(t);
        const Vec3 torso = joints[kinematics::index(kinematics::Joint::SpineOrigin)];
        out.push_back(mount.to_local(direction_of(torso - node_pos)));
    }
    return out;
}

AccuracyReport accuracy(const std::vector<double> &estimates, const std::vector<double> &truths, double bin_width)
{
    if (estimates.size() != truths.size())
        throw Error("accuracy", "estimate and truth lists differ in length");
    if (!(bin_width > 0.0))
        throw Error("accuracy", "bin width must be positive");
    AccuracyReport rep;
    rep.bin_width = bin_width;
    const auto n_bins = static_cast<std::size_t>(std::ceil(360.0 / bin_width));
    for (std::size_t b = 0; b < n_bins; ++b)
        rep.bin_edges.push_back(-180.0 + bin_width * static_cast<double>(b));
    rep.histogram.assign(n_bins, 0);
    double sum = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i)
    {
        const double e = wrap_180(estimates[i] - truths[i]);
        rep.errors.push_back(e);
        sum += std::abs(e);
        auto b = static_cast<std::size_t>(std::floor((e + 180.0) / bin_width));
        rep.histogram[std::min(b, n_bins - 1)] += 1;
    }
    rep.mean_abs_error = estimates.empty() ? 0.0 : sum / static_cast<double>(estimates.size());
    return rep;
}

} // namespace wisense::angles
