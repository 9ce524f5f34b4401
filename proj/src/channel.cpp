#include "wisense/channel.hpp"

#include <random>
#include <sstream>

namespace wisense::channel {

namespace {

double sinc(double x)
{
    if (x == 0.0)
        return 1.0;
    const double px = kPi * x;
    return std::sin(px) / px;
}

Ray make_ray(const Environment &env, double path_length, double extra_loss_db, int n_reflections,
             const Vec3 &departure, const Vec3 &arrival, bool target_related)
{
    if (!(path_length > 0.0))
        throw Error("ray", "degenerate zero-length path");
    const double lambda = env.wavelength();
    Ray r;
    r.path_length = path_length;
    r.delay = path_length / kSpeedOfLight;
    const double loss = friis_path_loss_db(path_length, lambda) + extra_loss_db;
    if (loss < 0.0)
        throw Error("ray", "path shorter than the far-field limit lambda/(4 pi)");
    r.gain = db_to_amplitude(loss);
    r.phase = wrap_2pi(-2.0 * kPi * path_length / lambda + kPi * n_reflections);
    r.aod = direction_of(departure);
    r.aoa = direction_of(arrival);
    r.n_reflections = n_reflections;
    r.target_related = target_related;
    return r;
}

} // namespace

bool Environment::inside(const Vec3 &p) const
{
    return p.x >= 0.0 && p.y >= 0.0 && p.z >= 0.0 && p.x <= room.x && p.y <= room.y && p.z <= room.z;
}

void Environment::validate() const
{
    if (!(room.x > 0.0 && room.y > 0.0 && room.z > 0.0))
        throw Error("environment.room", "dimensions must be positive");
    auto strictly_inside = [&](const Vec3 &p) {
        return p.x > 0.0 && p.y > 0.0 && p.z > 0.0 && p.x < room.x && p.y < room.y && p.z < room.z;
    };
    if (!strictly_inside(tx))
        throw Error("environment.tx", "must lie strictly inside the room");
    if (!strictly_inside(rx))
        throw Error("environment.rx", "must lie strictly inside the room");
    if (tx == rx)
        throw Error("environment.rx", "must differ from tx");
    if (!(carrier_frequency > 0.0))
        throw Error("environment.carrier_frequency", "must be positive");
    if (!(joint_scattering_loss_db >= 0.0))
        throw Error("environment.joint_scattering_loss_db", "must be non-negative");
}

double Cir::energy() const
{
    double e = 0.0;
    for (const auto &t : taps)
        e += std::norm(t);
    return e;
}

void DdhcParams::validate() const
{
    if (!(rho >= 0.0 && rho < 1.0))
        throw Error("ddhc.rho", "must lie in [0, 1)");
    if (!(t0 >= 0.0))
        throw Error("ddhc.t0", "must be non-negative");
}

double friis_path_loss_db(double distance, double wavelength)
{
    if (!(distance > 0.0))
        throw Error("distance", "must be positive");
    if (!(wavelength > 0.0))
        throw Error("wavelength", "must be positive");
    return 20.0 * std::log10(4.0 * kPi * distance / wavelength);
}

ChannelRealization trace_rays(const Environment &env, std::optional<std::span<const Vec3>> joints, double timestamp)
{
    env.validate();
    ChannelRealization real;
    real.timestamp = timestamp;

    const Vec3 los = env.rx - env.tx;
    real.rays.push_back(make_ray(env, los.norm(), 0.0, 0, los, env.tx - env.rx, false));

    if (joints)
    {
        for (const Vec3 &j : *joints)
        {
            if (!env.inside(j))
            {
                std::ostringstream msg;
                msg << "joint (" << j.x << ", " << j.y << ", " << j.z << ") outside the room";
                throw Error("joints", msg.str());
            }
            const Vec3 out = j - env.tx, back = j - env.rx;
            real.rays.push_back(
                make_ray(env, out.norm() + back.norm(), env.joint_scattering_loss_db, 1, out, back, true));
        }
    }

    if (env.wall_reflections)
    {
        for (int axis = 0; axis < 3; ++axis)
        {
            for (double plane : {0.0, axis == 0 ? env.room.x : axis == 1 ? env.room.y : env.room.z})
            {
                auto coord = [axis](Vec3 &v) -> double & { return axis == 0 ? v.x : axis == 1 ? v.y : v.z; };
                Vec3 image = env.tx, rx = env.rx;
                coord(image) = 2.0 * plane - coord(image);
                const double s = (plane - coord(image)) / (coord(rx) - coord(image));
                const Vec3 hit = image + (rx - image) * s;
                real.rays.push_back(make_ray(env, (rx - image).norm(), 0.0, 1, hit - env.tx, hit - env.rx, false));
            }
        }
    }
    return real;
}

TapGrid default_tap_grid(const Environment &env, double bandwidth, std::size_t n_taps)
{
    if (!(bandwidth > 0.0))
        throw Error("bandwidth", "must be positive");
    if (n_taps == 0)
        throw Error("n_taps", "must be at least 1");
    const double spacing = 1.0 / bandwidth;
    const double los_delay = (env.rx - env.tx).norm() / kSpeedOfLight;
    return {los_delay - static_cast<double>(kDefaultLeadTaps) * spacing, spacing, n_taps};
}

void ray_kernel(const Ray &ray, const TapGrid &grid, std::span<cplx> out)
{
    const double last = grid.delay(grid.n_taps - 1);
    if (ray.delay < grid.t0 || ray.delay > last)
    {
        std::ostringstream msg;
        msg.precision(12);
        msg << "ray delay " << ray.delay * 1e9 << " ns outside tap window [" << grid.t0 * 1e9 << ", " << last * 1e9
            << "] ns";
        throw Error("cir", msg.str());
    }
    const cplx a = ray.amplitude();
    for (std::size_t k = 0; k < grid.n_taps; ++k)
        out[k] = a * sinc((grid.delay(k) - ray.delay) / grid.spacing);
}

Cir cir_from_rays(const ChannelRealization &real, const TapGrid &grid, std::span<const cplx> weights)
{
    if (!(grid.spacing > 0.0) || grid.n_taps == 0)
        throw Error("cir", "invalid tap grid");
    if (!weights.empty() && weights.size() != real.rays.size())
        throw Error("cir", "one weight per ray required");
    Cir cir;
    cir.t0 = grid.t0;
    cir.tap_spacing = grid.spacing;
    cir.taps.assign(grid.n_taps, cplx{});
    std::vector<cplx> kernel(grid.n_taps);
    for (std::size_t i = 0; i < real.rays.size(); ++i)
    {
        ray_kernel(real.rays[i], grid, kernel);
        const cplx w = weights.empty() ? cplx{1.0, 0.0} : weights[i];
        for (std::size_t k = 0; k < grid.n_taps; ++k)
            cir.taps[k] += w * kernel[k];
    }
    return cir;
}

Cir cir_from_rays(const ChannelRealization &real, double bandwidth, std::size_t n_taps)
{
    if (!(bandwidth > 0.0))
        throw Error("bandwidth", "must be positive");
    const auto los = std::find_if(real.rays.begin(), real.rays.end(),
                                  [](const Ray &r) { return r.n_reflections == 0 && !r.target_related; });
    const double spacing = 1.0 / bandwidth;
    double anchor = los != real.rays.end() ? los->delay : 0.0;
    if (los == real.rays.end())
        for (const auto &r : real.rays)
            anchor = anchor == 0.0 ? r.delay : std::min(anchor, r.delay);
    return cir_from_rays(real, TapGrid{anchor - static_cast<double>(kDefaultLeadTaps) * spacing, spacing, n_taps});
}

Cir ddhc_blend(const std::optional<Cir> &prev, const Cir &fresh, double t, const DdhcParams &p)
{
    p.validate();
    if (t < 0.0)
        throw Error("t", "must be non-negative");
    if (t <= p.t0)
        return fresh;
    if (!prev)
        throw Error("ddhc", "previous state required after the coherence onset");
    if (prev->grid() != fresh.grid())
        throw Error("ddhc", "previous and fresh CIRs use different tap grids");
    Cir out = fresh;
    for (std::size_t k = 0; k < out.taps.size(); ++k)
        out.taps[k] = p.rho * prev->taps[k] + (1.0 - p.rho) * fresh.taps[k];
    return out;
}

Cir ddhc_fresh(const ChannelRealization &real, const TapGrid &grid, std::uint64_t seed, std::uint64_t index)
{
    std::mt19937_64 rng(mix_seed(seed, index));
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    ChannelRealization unrelated;
    unrelated.timestamp = real.timestamp;
    for (const auto &r : real.rays)
    {
        if (r.target_related)
            continue;
        Ray redrawn = r;
        redrawn.phase = phase(rng);
        unrelated.rays.push_back(redrawn);
    }
    return cir_from_rays(unrelated, grid);
}

} // namespace wisense::channel
