#pragma once

#include "wisense/channel.hpp"
#include "wisense/kinematics.hpp"

#include <limits>
#include <string>

namespace wisense::sensing {
struct RadarDataCube;
}

namespace wisense::phy {

using channel::Cir;

struct PacketSchedule
{
    double prf = 590.0; // Hz
    std::size_t n_packets = 768;
    double t_start = 0.0;

    void validate() const;
    double timestamp(std::size_t k) const { return t_start + static_cast<double>(k) / prf; }
    std::vector<double> timestamps() const;
};

struct NoiseModel
{
    double snr_db = std::numeric_limits<double>::infinity(); // +inf disables noise
    std::uint64_t seed = 0;

    bool enabled() const { return std::isfinite(snr_db); }
};

struct Codebook
{
    std::string name;
    std::size_t n_rows = 1; // vertical elements
    std::size_t n_cols = 1; // horizontal elements
    std::vector<double> azimuths;   // degrees
    std::vector<double> elevations; // degrees

    // Azimuth-major Cartesian product: index = ia * |el| + ie.
    std::size_t size() const { return azimuths.size() * elevations.size(); }
    Direction direction(std::size_t i) const;
    void validate() const;

    static Codebook preset(const std::string &name); // "2x2", "2x8", "8x8"
    static std::vector<std::string> preset_names();
};

enum class TrnMode
{
    RxTraining,
    TxTraining,
};

struct TrnConfig
{
    TrnMode mode = TrnMode::RxTraining;
    std::size_t p = 2, m = 15, n = 1; // TRN-unit structure
    std::size_t subfields_per_unit = 10;

    static TrnConfig rx_training();
    // M + 1 subfields per unit are usable for beam sweeping.
    static TrnConfig tx_training(std::size_t p = 2, std::size_t m = 15, std::size_t n = 1);
};

std::string to_string(TrnMode mode);
TrnMode trn_mode_from_string(const std::string &s);

// Mounting of a phased array: boresight azimuth (degrees) in the room frame.
// Arrays stand vertically, so elevation needs no rotation.
struct ArrayMount
{
    double boresight_azimuth = 0.0;

    Direction to_local(const Direction &global) const
    {
        return {wrap_360(global.azimuth - boresight_azimuth), global.elevation};
    }
};

inline constexpr double kHalfWavelength = 0.5;

// Uniform planar array in the local y-z plane with boresight along local +x.
// Element (r, c) sits at (c, r) * spacing wavelengths about the array centre.
std::vector<cplx> steering_vector(std::size_t n_rows, std::size_t n_cols, double azimuth, double elevation,
                                  double spacing = kHalfWavelength);

// w^H a(az, el) / sqrt(N).
cplx array_gain(std::span<const cplx> weights, std::size_t n_rows, std::size_t n_cols, double azimuth,
                double elevation, double spacing = kHalfWavelength);

// True CIR plus circular Gaussian noise at the configured SNR relative to the
// mean tap power. Deterministic in (seed, packet, stream).
Cir estimate_cir(const Cir &truth, const NoiseModel &noise, std::uint64_t packet_index = 0, std::uint64_t stream = 0);

std::size_t training_length(const Codebook &codebook, const TrnConfig &trn);

struct SweepOptions
{
    double bandwidth = 1.76e9;
    std::size_t n_taps = channel::kDefaultTaps;
    ArrayMount mount{};
    double element_spacing = kHalfWavelength;
    // Target-unrelated rays follow the autoregressive blend when set.
    std::optional<channel::DdhcParams> ddhc;
};

// Omni SISO CIR stream, one estimate per packet.
std::vector<std::pair<double, Cir>> siso_stream(const channel::Environment &env,
                                                const kinematics::JointTrajectory &traj,
                                                const PacketSchedule &schedule, const NoiseModel &noise,
                                                const SweepOptions &opts = {});

// Directional sweep: every codebook direction is measured at every packet.
sensing::RadarDataCube trn_sweep(const channel::Environment &env, const kinematics::JointTrajectory &traj,
                                 const PacketSchedule &schedule, const Codebook &codebook, const TrnConfig &trn,
                                 const NoiseModel &noise, const SweepOptions &opts = {});

} // namespace wisense::phy
