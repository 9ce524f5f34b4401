#include "wisense/kinematics.hpp"

#include <algorithm>
#include <limits>

namespace wisense::kinematics {

namespace {

constexpr std::array<std::string_view, kNumJoints> kJointNames = {
    "spine_origin", "neck",        "head",        "left_shoulder", "right_shoulder", "left_elbow",
    "right_elbow",  "left_wrist",  "right_wrist", "left_hip",      "right_hip",      "left_knee",
    "right_knee",   "left_ankle",  "right_ankle", "left_toe",      "right_toe",
};

struct LimbAngles
{
    double hip, knee, foot_pitch, shoulder, elbow; // radians
};

LimbAngles limb_angles(double cycle_phase_rad, bool moving)
{
    if (!moving)
        return {0.0, 0.0, 0.0, 0.0, 0.0};
    using G = GaitConstants;
    const double p = cycle_phase_rad;
    return {
        deg2rad(G::kHipMean + G::kHipAmplitude * std::sin(p)),
        deg2rad(G::kKneeMean + G::kKneeAmplitude * std::sin(p + kPi / 4.0)),
        deg2rad(G::kAnkleAmplitude * std::sin(p + kPi / 2.0)),
        deg2rad(-G::kShoulderAmplitude * std::sin(p)),
        deg2rad(G::kElbowMean + G::kElbowAmplitude * std::sin(p + kPi / 2.0)),
    };
}

// Sagittal-plane vector of the given length, rotated forward by `angle` from
// straight down.
Vec3 swing(double length, double angle) { return {length * std::sin(angle), 0.0, -length * std::cos(angle)}; }

} // namespace

std::string_view joint_name(Joint j) { return kJointNames[index(j)]; }

BodyModel BodyModel::with_height(double height)
{
    using F = BodyFractions;
    const double h = height;
    BodyModel b;
    b.height = height;
    const double shoulder_offset = h * std::hypot(F::shoulder_half_width, F::shoulder_drop);
    b.segments = {{
        {Joint::SpineOrigin, Joint::Neck, h * F::spine},
        {Joint::Neck, Joint::Head, h * F::head},
        {Joint::Neck, Joint::LeftShoulder, shoulder_offset},
        {Joint::Neck, Joint::RightShoulder, shoulder_offset},
        {Joint::LeftShoulder, Joint::LeftElbow, h * F::upper_arm},
        {Joint::RightShoulder, Joint::RightElbow, h * F::upper_arm},
        {Joint::LeftElbow, Joint::LeftWrist, h * F::forearm},
        {Joint::RightElbow, Joint::RightWrist, h * F::forearm},
        {Joint::SpineOrigin, Joint::LeftHip, h * F::hip_half_width},
        {Joint::SpineOrigin, Joint::RightHip, h * F::hip_half_width},
        {Joint::LeftHip, Joint::LeftKnee, h * F::thigh},
        {Joint::RightHip, Joint::RightKnee, h * F::thigh},
        {Joint::LeftKnee, Joint::LeftAnkle, h * F::shank},
        {Joint::RightKnee, Joint::RightAnkle, h * F::shank},
        {Joint::LeftAnkle, Joint::LeftToe, h * F::foot},
        {Joint::RightAnkle, Joint::RightToe, h * F::foot},
    }};
    b.validate();
    return b;
}

double BodyModel::length(Joint parent, Joint child) const
{
    for (const auto &s : segments)
        if (s.parent == parent && s.child == child)
            return s.length;
    throw Error("body", "no segment " + std::string(joint_name(parent)) + " -> " + std::string(joint_name(child)));
}

double BodyModel::hip_height() const { return height * BodyFractions::hip_height; }

double BodyModel::leg_length() const
{
    return length(Joint::LeftHip, Joint::LeftKnee) + length(Joint::LeftKnee, Joint::LeftAnkle);
}

void BodyModel::validate() const
{
    if (!(height > 0.0))
        throw Error("body.height", "must be positive");

    // Tree check: every joint except the root has exactly one parent, and
    // following parents always reaches the root.
    std::array<int, kNumJoints> parent;
    parent.fill(-1);
    for (const auto &s : segments)
    {
        if (!(s.length > 0.0))
            throw Error("body.segments", "segment lengths must be positive");
        if (s.child == Joint::SpineOrigin || parent[index(s.child)] != -1)
            throw Error("body.segments", "joints do not form a tree rooted at the spine origin");
        parent[index(s.child)] = static_cast<int>(index(s.parent));
    }
    for (std::size_t j = 1; j < kNumJoints; ++j)
    {
        std::size_t cur = j, steps = 0;
        while (cur != 0)
        {
            if (parent[cur] < 0 || ++steps > kNumJoints)
                throw Error("body.segments", "joint " + std::string(joint_name(Joint(j))) + " is not connected to the root");
            cur = static_cast<std::size_t>(parent[cur]);
        }
    }
    const double leg_chain = length(Joint::LeftHip, Joint::LeftKnee) + length(Joint::LeftKnee, Joint::LeftAnkle) +
                             length(Joint::LeftAnkle, Joint::LeftToe);
    if (!(leg_chain < height))
        throw Error("body.segments", "leg chain must be shorter than the body height");
}

void GaitParams::validate() const
{
    if (!(duration > 0.0))
        throw Error("gait.duration", "must be positive");
    if (!(sample_interval > 0.0))
        throw Error("gait.sample_interval", "must be positive");
    if (!(sample_interval < duration) || duration / sample_interval < 2.0)
        throw Error("gait.sample_interval", "must be at most half the duration");
}

std::size_t GaitParams::sample_count() const
{
    validate();
    return static_cast<std::size_t>(std::llround(duration / sample_interval));
}

double GaitParams::speed() const { return std::hypot(end.x - start.x, end.y - start.y) / duration; }

double GaitParams::relative_velocity(const BodyModel &body) const { return speed() / body.hip_height(); }

double GaitParams::cycle_period(const BodyModel &body) const
{
    const double rv = relative_velocity(body);
    if (rv <= 0.0)
        return std::numeric_limits<double>::infinity();
    const double relative_cycle_length = GaitConstants::kCycleLengthCoefficient * std::sqrt(rv);
    return relative_cycle_length / rv;
}

std::array<Vec3, kNumJoints> pose_at(const BodyModel &body, const GaitParams &gait, double t)
{
    gait.validate();
    const double duration = gait.duration;
    t = std::clamp(t, 0.0, duration);

    const double dx = gait.end.x - gait.start.x, dy = gait.end.y - gait.start.y;
    const double dist = std::hypot(dx, dy);
    const bool moving = dist > 0.0;
    const double ux = moving ? dx / dist : 1.0, uy = moving ? dy / dist : 0.0;

    const double hip_h = body.hip_height();
    const double period = gait.cycle_period(body);
    const double phase = moving ? 2.0 * kPi * t / period : 0.0;

    // Torso oscillations at twice the cycle frequency. The forward one gets a
    // linear correction so the endpoints land exactly on start and end; the
    // vertical one stays non-negative so the feet never go through the floor.
    double forward = 0.0, vertical = 0.0;
    if (moving)
    {
        const double rv = gait.relative_velocity(body);
        const double af = GaitConstants::kForwardAmplitude * hip_h;
        const double av = GaitConstants::kVerticalAmplitude * rv * hip_h;
        auto fwd = [&](double s) { return af * std::sin(4.0 * kPi * s / period); };
        auto vert = [&](double s) { return av * (1.0 - std::cos(4.0 * kPi * s / period)); };
        forward = fwd(t) - (t / duration) * fwd(duration);
        vertical = vert(t);
    }
    const double along = dist * (t / duration) + forward;

    // Body frame: x forward, y left, z up; origin at the spine origin.
    std::array<Vec3, kNumJoints> local{};
    auto set = [&](Joint j, const Vec3 &p) { local[index(j)] = p; };
    using F = BodyFractions;
    const double h = body.height;

    set(Joint::SpineOrigin, {0.0, 0.0, 0.0});
    const Vec3 neck{0.0, 0.0, body.length(Joint::SpineOrigin, Joint::Neck)};
    set(Joint::Neck, neck);
    set(Joint::Head, neck + Vec3{0.0, 0.0, body.length(Joint::Neck, Joint::Head)});

    for (int side = 0; side < 2; ++side)
    {
        const bool left = side == 0;
        const double lateral = left ? 1.0 : -1.0;
        const LimbAngles a = limb_angles(phase + (left ? 0.0 : kPi), moving);

        const Vec3 shoulder = neck + Vec3{0.0, lateral * h * F::shoulder_half_width, -h * F::shoulder_drop};
        const Vec3 elbow = shoulder + swing(body.length(left ? Joint::LeftShoulder : Joint::RightShoulder,
                                                        left ? Joint::LeftElbow : Joint::RightElbow),
                                            a.shoulder);
        const Vec3 wrist = elbow + swing(body.length(left ? Joint::LeftElbow : Joint::RightElbow,
                                                     left ? Joint::LeftWrist : Joint::RightWrist),
                                         a.shoulder + a.elbow);

        const Vec3 hip{0.0, lateral * body.length(Joint::SpineOrigin, left ? Joint::LeftHip : Joint::RightHip), 0.0};
        const Vec3 knee =
            hip + swing(body.length(left ? Joint::LeftHip : Joint::RightHip, left ? Joint::LeftKnee : Joint::RightKnee),
                        a.hip);
        const Vec3 ankle = knee + swing(body.length(left ? Joint::LeftKnee : Joint::RightKnee,
                                                    left ? Joint::LeftAnkle : Joint::RightAnkle),
                                        a.hip - a.knee);
        const double foot = body.length(left ? Joint::LeftAnkle : Joint::RightAnkle, left ? Joint::LeftToe : Joint::RightToe);
        const Vec3 toe = ankle + Vec3{foot * std::cos(a.foot_pitch), 0.0, foot * std::sin(a.foot_pitch)};

        set(left ? Joint::LeftShoulder : Joint::RightShoulder, shoulder);
        set(left ? Joint::LeftElbow : Joint::RightElbow, elbow);
        set(left ? Joint::LeftWrist : Joint::RightWrist, wrist);
        set(left ? Joint::LeftHip : Joint::RightHip, hip);
        set(left ? Joint::LeftKnee : Joint::RightKnee, knee);
        set(left ? Joint::LeftAnkle : Joint::RightAnkle, ankle);
        set(left ? Joint::LeftToe : Joint::RightToe, toe);
    }

    const Vec3 origin{gait.start.x + ux * along, gait.start.y + uy * along, hip_h + vertical};
    std::array<Vec3, kNumJoints> world{};
    for (std::size_t j = 0; j < kNumJoints; ++j)
    {
        const Vec3 &p = local[j];
        world[j] = origin + Vec3{ux * p.x - uy * p.y, uy * p.x + ux * p.y, p.z};
    }
    return world;
}

JointTrajectory build_walker(const BodyModel &body, const GaitParams &gait)
{
    const std::size_t n = gait.sample_count();
    std::vector<double> ts(n);
    for (std::size_t k = 0; k < n; ++k)
        ts[k] = gait.duration * static_cast<double>(k) / static_cast<double>(n - 1);
    ts.back() = gait.duration;
    return build_walker_at(body, gait, ts);
}

JointTrajectory build_walker_at(const BodyModel &body, const GaitParams &gait, std::span<const double> timestamps)
{
    body.validate();
    gait.validate();
    if (timestamps.empty())
        throw Error("timestamps", "at least one timestamp required");
    JointTrajectory traj;
    traj.timestamps.assign(timestamps.begin(), timestamps.end());
    traj.positions.reserve(timestamps.size());
    for (std::size_t k = 0; k < timestamps.size(); ++k)
    {
        if (k > 0 && !(timestamps[k] > timestamps[k - 1]))
            throw Error("timestamps", "must be strictly increasing");
        traj.positions.push_back(pose_at(body, gait, timestamps[k]));
    }
    return traj;
}

std::array<Vec3, kNumJoints> JointTrajectory::sample_at(double t) const
{
    if (timestamps.empty())
        throw Error("trajectory", "empty");
    const double tol = 1e-9 * std::max(1.0, std::abs(timestamps.back()));
    if (t < timestamps.front() - tol || t > timestamps.back() + tol)
        throw Error("trajectory", "timestamp " + std::to_string(t) + " s outside trajectory span");
    const auto it = std::lower_bound(timestamps.begin(), timestamps.end(), t);
    if (it == timestamps.end())
        return positions.back();
    const auto k = static_cast<std::size_t>(it - timestamps.begin());
    if (*it == t || k == 0)
        return positions[k];
    const double t0 = timestamps[k - 1], t1 = timestamps[k];
    const double w = (t - t0) / (t1 - t0);
    std::array<Vec3, kNumJoints> out{};
    for (std::size_t j = 0; j < kNumJoints; ++j)
        out[j] = positions[k - 1][j] + (positions[k][j] - positions[k - 1][j]) * w;
    return out;
}

std::vector<std::array<Vec3, kNumJoints>> joint_velocities(const JointTrajectory &traj)
{
    const std::size_t n = traj.size();
    if (n < 2)
        throw Error("trajectory", "velocity needs at least 2 samples");
    std::vector<std::array<Vec3, kNumJoints>> v(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        const std::size_t lo = k == 0 ? 0 : k - 1;
        const std::size_t hi = k + 1 == n ? n - 1 : k + 1;
        const double dt = traj.timestamps[hi] - traj.timestamps[lo];
        for (std::size_t j = 0; j < kNumJoints; ++j)
            v[k][j] = (traj.positions[hi][j] - traj.positions[lo][j]) * (1.0 / dt);
    }
    return v;
}

} // namespace wisense::kinematics
