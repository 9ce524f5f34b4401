#pragma once

#include "wisense/common.hpp"

#include <cstdint>
#include <optional>
#include <span>

namespace wisense::channel {

struct Environment
{
    Vec3 room{19.0, 10.0, 3.0}; // box from the origin, m
    Vec3 tx{4.0, 5.0, 1.5};
    Vec3 rx{6.0, 3.0, 1.5};
    double carrier_frequency = 60e9; // Hz
    bool wall_reflections = false;
    // Extra loss applied to every joint's single-bounce ray on top of Friis.
    double joint_scattering_loss_db = 20.0;

    double wavelength() const { return wisense::wavelength(carrier_frequency); }
    bool inside(const Vec3 &p) const; // closed box
    void validate() const;
};

struct Ray
{
    double delay = 0.0;   // s
    double gain = 0.0;    // linear amplitude
    double phase = 0.0;   // rad, [0, 2pi)
    Direction aod;        // at TX
    Direction aoa;        // at RX, pointing back along the arrival path
    int n_reflections = 0;
    bool target_related = false;
    double path_length = 0.0; // m

    cplx amplitude() const { return std::polar(gain, phase); }
};

struct ChannelRealization
{
    double timestamp = 0.0;
    std::vector<Ray> rays;
};

// Uniform tap grid shared by every CIR in a stream.
struct TapGrid
{
    double t0 = 0.0;        // delay of tap 0, s
    double spacing = 0.0;   // s
    std::size_t n_taps = 0;

    double delay(std::size_t k) const { return t0 + spacing * static_cast<double>(k); }
    bool operator==(const TapGrid &) const = default;
};

struct Cir
{
    std::vector<cplx> taps;
    double tap_spacing = 0.0;
    double t0 = 0.0;

    TapGrid grid() const { return {t0, tap_spacing, taps.size()}; }
    double energy() const;
};

struct DdhcParams
{
    double rho = 0.0;          // [0, 1)
    double t0 = 0.0;           // coherence onset, s
    std::uint64_t generator_seed = 0;

    void validate() const;
};

inline constexpr std::size_t kDefaultTaps = 64;
inline constexpr std::size_t kDefaultLeadTaps = 2;

// 20 log10(4 pi d / lambda).
double friis_path_loss_db(double distance, double wavelength);
inline double db_to_amplitude(double loss_db) { return std::pow(10.0, -loss_db / 20.0); }

// LOS, one single-bounce ray per joint and (when enabled) first-order wall
// images off the six room faces.
ChannelRealization trace_rays(const Environment &env, std::optional<std::span<const Vec3>> joints,
                              double timestamp = 0.0);

// Window starting kDefaultLeadTaps taps before the LOS delay.
TapGrid default_tap_grid(const Environment &env, double bandwidth, std::size_t n_taps = kDefaultTaps);

// Band-limited (sinc) projection of the ray sum onto the tap grid. When
// `weights` is given, ray i is scaled by weights[i].
Cir cir_from_rays(const ChannelRealization &real, const TapGrid &grid, std::span<const cplx> weights = {});
Cir cir_from_rays(const ChannelRealization &real, double bandwidth, std::size_t n_taps = kDefaultTaps);

// Per-tap contribution of a single ray (amplitude times sinc), shared by the
// weighted sweeps in phy.
void ray_kernel(const Ray &ray, const TapGrid &grid, std::span<cplx> out);

// Autoregressive memory for target-unrelated components, per tap.
Cir ddhc_blend(const std::optional<Cir> &prev, const Cir &fresh, double t, const DdhcParams &p);

// Surrogate for the standardised target-unrelated generator: the
// target-unrelated rays of `real` with phases redrawn from (seed, index).
Cir ddhc_fresh(const ChannelRealization &real, const TapGrid &grid, std::uint64_t seed, std::uint64_t index);

} // namespace wisense::channel
