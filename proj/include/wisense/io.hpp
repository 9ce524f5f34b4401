#pragma once

#include "wisense/sensing.hpp"
#include "wisense/threshold.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>

namespace wisense::io {

namespace fs = std::filesystem;

inline constexpr const char *kVersion = "1.0.0";

// Shortest text that parses back to the same double.
std::string format_number(double v);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const fs::path &path);

void write_file(const fs::path &path, std::string_view contents);
std::string read_file(const fs::path &path);

// Binary artifacts (host byte order, IEEE doubles).
void write_cir_stream(const fs::path &path, const threshold::CirStream &stream);
threshold::CirStream read_cir_stream(const fs::path &path);
void write_cube(const fs::path &path, const sensing::RadarDataCube &cube);
sensing::RadarDataCube read_cube(const fs::path &path);

// Heatmap CSV: header row carries the column axis, first column the row axis.
struct Heatmap
{
    std::string row_label;
    std::string col_label;
    std::vector<double> row_axis;
    std::vector<double> col_axis;
    std::vector<double> values; // [row][col]
};

Heatmap spectrogram_heatmap(const sensing::Spectrogram &sg);
Heatmap range_doppler_heatmap(const sensing::RangeDopplerMap &rd);
std::string heatmap_csv(const Heatmap &h);
Heatmap parse_heatmap_csv(const std::string &text);
nlohmann::json heatmap_axes(const Heatmap &h, const std::string &kind);

inline constexpr double kDbFloor = -120.0;

// Binary PGM: x = rows of the heatmap, y = columns with the last column on
// top. Linear magnitudes go to dB relative to the image maximum, floored.
std::string heatmap_pgm(const Heatmap &h);

std::string trajectory_csv(const kinematics::JointTrajectory &traj);
std::string rays_csv(const std::vector<channel::ChannelRealization> &reals);

nlohmann::json feedback_json(const threshold::FeedbackLog &log);

struct RunManifest
{
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string version = kVersion;
    std::map<std::string, std::string> files; // relative path -> sha256

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json &j);
};

// Writes `contents` under `dir` and records its checksum in the manifest.
void write_artifact(const fs::path &dir, const std::string &name, std::string_view contents, RunManifest &manifest);

} // namespace wisense::io
