#pragma once

#include "wisense/common.hpp"

#include <array>
#include <span>
#include <string_view>

// Parametric walking-human model: a 17-joint skeleton whose limbs follow
// sinusoidal flexing angles over the gait cycle while the torso translates
// along a straight line.

namespace wisense::kinematics {

inline constexpr std::size_t kNumJoints = 17;
inline constexpr std::size_t kNumSegments = 16;

enum class Joint : std::size_t
{
    SpineOrigin = 0, // root, mid-pelvis
    Neck,
    Head,
    LeftShoulder,
    RightShoulder,
    LeftElbow,
    RightElbow,
    LeftWrist,
    RightWrist,
    LeftHip,
    RightHip,
    LeftKnee,
    RightKnee,
    LeftAnkle,
    RightAnkle,
    LeftToe,
    RightToe,
};

constexpr std::size_t index(Joint j) { return static_cast<std::size_t>(j); }

std::string_view joint_name(Joint j);

struct Segment
{
    Joint parent;
    Joint child;
    double length; // m
};

// Body geometry. Segment lengths are fixed fractions of the height.
struct BodyModel
{
    double height = 1.8; // m
    std::array<Segment, kNumSegments> segments{};

    static BodyModel with_height(double height);

    double length(Joint parent, Joint child) const;
    double hip_height() const;   // spine origin above floor when standing
    double leg_length() const;   // hip -> ankle
    void validate() const;
};

// Fractions of body height (anthropometric averages).
struct BodyFractions
{
    static constexpr double hip_height = 0.530;
    static constexpr double hip_half_width = 0.052;
    static constexpr double thigh = 0.245;
    static constexpr double shank = 0.246;
    static constexpr double foot = 0.100;
    static constexpr double spine = 0.300; // spine origin -> neck
    static constexpr double head = 0.090;  // neck -> head centre
    static constexpr double shoulder_half_width = 0.110;
    static constexpr double shoulder_drop = 0.025;
    static constexpr double upper_arm = 0.186;
    static constexpr double forearm = 0.146;
};

// Gait constants. Cycle length follows the Boulic normalisation
// relative_cycle_length = kCycleLengthCoefficient * sqrt(relative_velocity),
// with relative velocity = speed / hip height (1/s).
struct GaitConstants
{
    static constexpr double kCycleLengthCoefficient = 1.346;
    // Torso oscillations at twice the cycle frequency, scaled by hip height.
    static constexpr double kVerticalAmplitude = 0.015;  // * rv * hip height
    static constexpr double kForwardAmplitude = 0.021;   // * hip height
    // Flexing angle amplitudes (degrees).
    static constexpr double kHipMean = 5.0;
    static constexpr double kHipAmplitude = 20.0;
    static constexpr double kKneeMean = 20.0;
    static constexpr double kKneeAmplitude = 18.0;
    static constexpr double kAnkleAmplitude = 10.0;
    static constexpr double kShoulderAmplitude = 15.0;
    static constexpr double kElbowMean = 20.0;
    static constexpr double kElbowAmplitude = 10.0;
};

struct GaitParams
{
    Vec2 start{};
    Vec2 end{};
    double duration = 1.3;              // s
    double sample_interval = 1.69e-3;   // s

    void validate() const;
    std::size_t sample_count() const;   // round(duration / sample_interval)
    double speed() const;               // mean planar torso speed, m/s
    double relative_velocity(const BodyModel &body) const;
    // Gait cycle period in seconds; infinite when standing still.
    double cycle_period(const BodyModel &body) const;
};

// positions are stored sample-major: [sample][joint].
struct JointTrajectory
{
    std::vector<double> timestamps;
    std::vector<std::array<Vec3, kNumJoints>> positions;

    std::size_t size() const { return timestamps.size(); }
    const Vec3 &at(std::size_t sample, Joint j) const { return positions[sample][index(j)]; }
    // Linear interpolation in time; t outside the span is rejected.
    std::array<Vec3, kNumJoints> sample_at(double t) const;
};

// Joint positions at time t (seconds since start; clamped to [0, duration]).
std::array<Vec3, kNumJoints> pose_at(const BodyModel &body, const GaitParams &gait, double t);

// Samples evenly spanning [0, duration]; count = gait.sample_count().
JointTrajectory build_walker(const BodyModel &body, const GaitParams &gait);

// Samples the walker at caller-supplied timestamps (e.g. packet times).
JointTrajectory build_walker_at(const BodyModel &body, const GaitParams &gait,
                                std::span<const double> timestamps);

// Finite-difference velocities, central inside and one-sided at the ends.
std::vector<std::array<Vec3, kNumJoints>> joint_velocities(const JointTrajectory &traj);

} // namespace wisense::kinematics
