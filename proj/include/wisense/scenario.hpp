#pragma once

#include "wisense/angles.hpp"
#include "wisense/sensing.hpp"
#include "wisense/threshold.hpp"

#include <json.hpp>

#include <string>

namespace wisense::scenario {

struct GaitConfig
{
    double height = 1.8;
    Vec2 start{4.0, 4.0};
    Vec2 end{5.0, 4.0};
    double duration = 1.3;
};

struct ProcessingConfig
{
    sensing::WindowSpec window{sensing::WindowKind::BlackmanHarris, 32, 0.5, 128};
    sensing::RangeCollapse collapse = sensing::RangeCollapse::Max;
    std::size_t cpi = 32;
    std::size_t cpi_nfft = 64;
};

struct DirectionalConfig
{
    bool enabled = false;
    std::vector<std::string> codebooks; // preset names or codebook file paths
    phy::TrnMode trn_mode = phy::TrnMode::RxTraining;
    std::size_t p = 2, m = 15, n = 1;
    double tx_boresight_azimuth = 270.0;
    double rx_boresight_azimuth = 270.0;

    phy::TrnConfig trn() const;
    // Mount and position of the node whose array is trained.
    phy::ArrayMount trained_mount() const;
};

struct ScenarioConfig
{
    std::string name = "custom";
    channel::Environment environment{};
    double bandwidth = 1.76e9;
    std::size_t n_taps = channel::kDefaultTaps;
    GaitConfig gait{};
    phy::PacketSchedule schedule{};
    phy::NoiseModel noise{20.0, 1};
    // Recorded for provenance only; the abstract PHY does not use them.
    int mcs = 12;
    int golay_length = 128;
    std::optional<channel::DdhcParams> ddhc;
    ProcessingConfig processing{};
    std::vector<double> threshold_levels{0.0, 0.025, 0.05, 0.1, 0.2};
    DirectionalConfig directional{};
    std::string output_directory = "out";
    std::vector<std::string> output_formats{"csv", "json", "pgm"};

    void validate() const;
    Vec3 trained_node() const;

    kinematics::BodyModel body() const;
    kinematics::GaitParams gait_params() const;
    phy::SweepOptions sweep_options() const;
};

nlohmann::json to_json(const ScenarioConfig &c);
// Unknown keys and type mismatches raise Error naming the offending field.
ScenarioConfig from_json(const nlohmann::json &j);
ScenarioConfig load_config(const std::string &path);

ScenarioConfig preset(const std::string &name); // "paper-siso", "paper-directional"
std::vector<std::string> preset_names();

phy::Codebook resolve_codebook(const std::string &name_or_path);

// Joint trajectory sampled at the packet timestamps.
kinematics::JointTrajectory trajectory(const ScenarioConfig &c);

threshold::CirStream run_siso(const ScenarioConfig &c);
sensing::RadarDataCube run_directional(const ScenarioConfig &c, const phy::Codebook &codebook);

// Matrix -> clutter removal -> STFT with the configured window.
sensing::Spectrogram micro_doppler(const ScenarioConfig &c, const threshold::CirStream &stream,
                                   const sensing::WindowSpec &window);
sensing::Spectrogram micro_doppler(const ScenarioConfig &c, const threshold::CirStream &stream);

// Whole-stream Doppler map (single window spanning every packet).
sensing::RangeDopplerMap full_range_doppler(const ScenarioConfig &c, const threshold::CirStream &stream);

struct ThresholdPoint
{
    double threshold = 0.0;
    std::size_t reported = 0;
    std::size_t total = 0;
    double reduction = 0.0;
};

std::vector<ThresholdPoint> threshold_sweep(const threshold::CirStream &stream, const std::vector<double> &levels);

struct AngleRun
{
    std::string codebook;
    std::vector<angles::AngleEstimate> estimates;
    std::vector<Direction> truths;
    angles::AccuracyReport azimuth;
    angles::AccuracyReport elevation;
};

AngleRun evaluate_angles(const ScenarioConfig &c, const phy::Codebook &codebook, const sensing::RadarDataCube &cube);

} // namespace wisense::scenario
