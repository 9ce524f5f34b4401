#pragma once

#include "wisense/phy.hpp"
#include "wisense/sensing.hpp"

namespace wisense::angles {

struct AngleEstimate
{
    std::size_t cpi_index = 0;
    double azimuth = 0.0;   // degrees, codebook member
    double elevation = 0.0; // degrees, codebook member
    std::size_t direction_index = 0;
    double power = 0.0;     // linear
    double cpi_time = 0.0;  // CPI midpoint, s
};

struct AccuracyReport
{
    std::vector<double> errors; // estimate - truth wrapped to (-180, 180]
    double bin_width = 5.0;
    std::vector<double> bin_edges; // lower edges
    std::vector<std::size_t> histogram;
    double mean_abs_error = 0.0;
};

struct EstimatorOptions
{
    std::size_t cpi_len = 32;
    std::size_t nfft = 64;
};

// Codebook argmax of clutter-removed, non-DC Doppler power per CPI.
std::vector<AngleEstimate> estimate_angles(const sensing::RadarDataCube &cube, const phy::Codebook &codebook,
                                           const EstimatorOptions &opts = {});

// Midpoint times of the non-overlapping CPIs of a cube.
std::vector<double> cpi_midpoints(const sensing::RadarDataCube &cube, std::size_t cpi_len);

// Local (azimuth, elevation) of the torso seen from the trained node.
std::vector<Direction> ground_truth_angles(const kinematics::JointTrajectory &traj, const Vec3 &node_pos,
                                           const phy::ArrayMount &mount, const std::vector<double> &timestamps);

AccuracyReport accuracy(const std::vector<double> &estimates, const std::vector<double> &truths,
                        double bin_width = 5.0);

} // namespace wisense::angles
