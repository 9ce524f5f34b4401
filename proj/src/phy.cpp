#include "wisense/phy.hpp"
#include "wisense/sensing.hpp"

#include <random>

namespace wisense::phy {

namespace {

const std::vector<double> kAz5 = {0, 45, 90, 270, 315};
const std::vector<double> kEl5 = {0, 45, 90, 135, 180};
const std::vector<double> kAz17 = {0, 11, 23, 34, 45, 56, 68, 79, 90, 270, 281, 292, 304, 315, 326, 337, 349};
const std::vector<double> kEl17 = {0, 11, 22, 33, 45, 56, 67, 78, 90, 101, 112, 123, 135, 146, 157, 168, 180};

channel::TapGrid tap_grid(const channel::Environment &env, const SweepOptions &opts)
{
    return channel::default_tap_grid(env, opts.bandwidth, opts.n_taps);
}

// Rays and their per-tap kernels at one packet time.
struct PacketRays
{
    channel::ChannelRealization real;
    std::vector<cplx> kernels; // [ray][tap]
};

PacketRays trace_packet(const channel::Environment &env, const kinematics::JointTrajectory &traj, double t,
                        const channel::TapGrid &grid)
{
    const auto joints = traj.sample_at(t);
    PacketRays p{channel::trace_rays(env, std::span<const Vec3>(joints), t), {}};
    p.kernels.resize(p.real.rays.size() * grid.n_taps);
    for (std::size_t i = 0; i < p.real.rays.size(); ++i)
        channel::ray_kernel(p.real.rays[i], grid, std::span<cplx>(p.kernels).subspan(i * grid.n_taps, grid.n_taps));
    return p;
}

} // namespace

void PacketSchedule::validate() const
{
    if (!(prf > 0.0))
        throw Error("schedule.prf", "must be positive");
    if (n_packets < 1)
        throw Error("schedule.n_packets", "must be at least 1");
}

std::vector<double> PacketSchedule::timestamps() const
{
    validate();
    std::vector<double> ts(n_packets);
    for (std::size_t k = 0; k < n_packets; ++k)
        ts[k] = timestamp(k);
    return ts;
}

Direction Codebook::direction(std::size_t i) const
{
    if (i >= size())
        throw Error("codebook", "direction index out of range");
    return {azimuths[i / elevations.size()], elevations[i % elevations.size()]};
}

void Codebook::validate() const
{
    if (n_rows < 1 || n_cols < 1)
        throw Error("codebook." + name, "array dimensions must be at least 1");
    if (azimuths.empty() || elevations.empty())
        throw Error("codebook." + name, "azimuth and elevation lists must be non-empty");
    for (double a : azimuths)
        if (!(a >= 0.0 && a < 360.0))
            throw Error("codebook." + name, "azimuths must lie in [0, 360)");
    for (double e : elevations)
        if (!(e >= 0.0 && e <= 180.0))
            throw Error("codebook." + name, "elevations must lie in [0, 180]");
}

Codebook Codebook::preset(const std::string &name)
{
    if (name == "2x2")
        return {name, 2, 2, kAz5, kEl5};
    if (name == "2x8")
        return {name, 2, 8, kAz17, kEl5};
    if (name == "8x8")
        return {name, 8, 8, kAz17, kEl17};
    throw Error("codebook", "unknown preset '" + name + "'");
}

std::vector<std::string> Codebook::preset_names() { return {"2x2", "2x8", "8x8"}; }

TrnConfig TrnConfig::rx_training()
{
    TrnConfig t;
    t.mode = TrnMode::RxTraining;
    t.subfields_per_unit = 10;
    return t;
}

TrnConfig TrnConfig::tx_training(std::size_t p, std::size_t m, std::size_t n)
{
    TrnConfig t;
    t.mode = TrnMode::TxTraining;
    t.p = p;
    t.m = m;
    t.n = n;
    t.subfields_per_unit = m + 1;
    return t;
}

std::string to_string(TrnMode mode) { return mode == TrnMode::RxTraining ? "trn-r" : "trn-t"; }

TrnMode trn_mode_from_string(const std::string &s)
{
    if (s == "trn-r")
        return TrnMode::RxTraining;
    if (s == "trn-t")
        return TrnMode::TxTraining;
    throw Error("trn_mode", "expected 'trn-r' or 'trn-t', got '" + s + "'");
}

std::vector<cplx> steering_vector(std::size_t n_rows, std::size_t n_cols, double azimuth, double elevation,
                                  double spacing)
{
    if (n_rows < 1 || n_cols < 1)
        throw Error("array", "dimensions must be at least 1");
    if (!(spacing > 0.0))
        throw Error("array", "element spacing must be positive");
    const Vec3 u = unit_vector({azimuth, elevation});
    std::vector<cplx> w(n_rows * n_cols);
    const double yc = 0.5 * static_cast<double>(n_cols - 1), zc = 0.5 * static_cast<double>(n_rows - 1);
    for (std::size_t r = 0; r < n_rows; ++r)
        for (std::size_t c = 0; c < n_cols; ++c)
        {
            const double y = (static_cast<double>(c) - yc) * spacing, z = (static_cast<double>(r) - zc) * spacing;
            w[r * n_cols + c] = std::polar(1.0, 2.0 * kPi * (y * u.y + z * u.z));
        }
    return w;
}

cplx array_gain(std::span<const cplx> weights, std::size_t n_rows, std::size_t n_cols, double azimuth,
                double elevation, double spacing)
{
    if (weights.size() != n_rows * n_cols)
        throw Error("array", "weight vector does not match the array dimensions");
    const auto a = steering_vector(n_rows, n_cols, azimuth, elevation, spacing);
    cplx acc{};
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += std::conj(weights[i]) * a[i];
    return acc / std::sqrt(static_cast<double>(a.size()));
}

Cir estimate_cir(const Cir &truth, const NoiseModel &noise, std::uint64_t packet_index, std::uint64_t stream)
{
    if (!noise.enabled() || truth.taps.empty())
        return truth;
    const double mean_power = truth.energy() / static_cast<double>(truth.taps.size());
    const double variance = mean_power / std::pow(10.0, noise.snr_db / 10.0);
    std::mt19937_64 rng(mix_seed(noise.seed, packet_index, stream));
    std::normal_distribution<double> gauss(0.0, std::sqrt(variance / 2.0));
    Cir out = truth;
    for (auto &tap : out.taps)
    {
        const double re = gauss(rng);
        const double im = gauss(rng);
        tap += cplx{re, im};
    }
    return out;
}

std::size_t training_length(const Codebook &codebook, const TrnConfig &trn)
{
    if (trn.subfields_per_unit < 1)
        throw Error("trn.subfields_per_unit", "must be at least 1");
    return (codebook.size() + trn.subfields_per_unit - 1) / trn.subfields_per_unit;
}

std::vector<std::pair<double, Cir>> siso_stream(const channel::Environment &env,
                                                const kinematics::JointTrajectory &traj,
                                                const PacketSchedule &schedule, const NoiseModel &noise,
                                                const SweepOptions &opts)
{
    schedule.validate();
    env.validate();
    const auto grid = tap_grid(env, opts);
    std::vector<std::pair<double, Cir>> stream;
    stream.reserve(schedule.n_packets);
    std::optional<Cir> memory;
    for (std::size_t k = 0; k < schedule.n_packets; ++k)
    {
        const double t = schedule.timestamp(k);
        const auto p = trace_packet(env, traj, t, grid);
        Cir cir;
        if (!opts.ddhc)
        {
            cir = channel::cir_from_rays(p.real, grid);
        }
        else
        {
            channel::ChannelRealization target{t, {}};
            for (const auto &r : p.real.rays)
                if (r.target_related)
                    target.rays.push_back(r);
            cir = channel::cir_from_rays(target, grid);
            const Cir fresh = channel::ddhc_fresh(p.real, grid, opts.ddhc->generator_seed, k);
            memory = channel::ddhc_blend(memory, fresh, t - schedule.t_start, *opts.ddhc);
            for (std::size_t i = 0; i < grid.n_taps; ++i)
                cir.taps[i] += memory->taps[i];
        }
        stream.emplace_back(t, estimate_cir(cir, noise, k, 0));
    }
    return stream;
}

sensing::RadarDataCube trn_sweep(const channel::Environment &env, const kinematics::JointTrajectory &traj,
                                 const PacketSchedule &schedule, const Codebook &codebook, const TrnConfig &trn,
                                 const NoiseModel &noise, const SweepOptions &opts)
{
    schedule.validate();
    env.validate();
    codebook.validate();
    const auto grid = tap_grid(env, opts);
    const std::size_t n_dir = codebook.size(), n_el = codebook.n_rows * codebook.n_cols;

    std::vector<std::vector<cplx>> awv(n_dir);
    for (std::size_t d = 0; d < n_dir; ++d)
    {
        const Direction dir = codebook.direction(d);
        awv[d] = steering_vector(codebook.n_rows, codebook.n_cols, dir.azimuth, dir.elevation, opts.element_spacing);
    }

    sensing::RadarDataCube cube;
    cube.n_directions = n_dir;
    cube.n_fast = grid.n_taps;
    cube.n_slow = schedule.n_packets;
    cube.samples.assign(n_dir * grid.n_taps * schedule.n_packets, cplx{});
    for (std::size_t d = 0; d < n_dir; ++d)
        cube.direction_axis.push_back(d);
    for (std::size_t k = 0; k < grid.n_taps; ++k)
        cube.fast_axis.push_back(grid.delay(k));
    cube.slow_axis = schedule.timestamps();
    cube.pri = 1.0 / schedule.prf;

    const double norm = 1.0 / std::sqrt(static_cast<double>(n_el));
    std::vector<cplx> weights, steer;
    Cir cir;
    cir.t0 = grid.t0;
    cir.tap_spacing = grid.spacing;
    for (std::size_t k = 0; k < schedule.n_packets; ++k)
    {
        const auto p = trace_packet(env, traj, schedule.timestamp(k), grid);
        const auto &rays = p.real.rays;

        // Steering vectors of every ray at the trained end, local frame.
        std::vector<std::vector<cplx>> ray_steer(rays.size());
        for (std::size_t i = 0; i < rays.size(); ++i)
        {
            const Direction global = trn.mode == TrnMode::RxTraining ? rays[i].aoa : rays[i].aod;
            const Direction local = opts.mount.to_local(global);
            ray_steer[i] = steering_vector(codebook.n_rows, codebook.n_cols, local.azimuth, local.elevation,
                                           opts.element_spacing);
        }

        for (std::size_t d = 0; d < n_dir; ++d)
        {
            cir.taps.assign(grid.n_taps, cplx{});
            for (std::size_t i = 0; i < rays.size(); ++i)
            {
                cplx g{};
                for (std::size_t e = 0; e < n_el; ++e)
                    g += std::conj(awv[d][e]) * ray_steer[i][e];
                g *= norm;
                const cplx *kern = &p.kernels[i * grid.n_taps];
                for (std::size_t t = 0; t < grid.n_taps; ++t)
                    cir.taps[t] += g * kern[t];
            }
            const Cir est = estimate_cir(cir, noise, k, d);
            for (std::size_t t = 0; t < grid.n_taps; ++t)
                cube.at(d, t, k) = est.taps[t];
        }
    }
    return cube;
}

} // namespace wisense::phy
