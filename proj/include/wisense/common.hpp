#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace wisense {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kPi = std::numbers::pi;

// All contract violations surface as this type so callers (and the CLI) can
// report a single field-level message.
class Error : public std::runtime_error
{
public:
    explicit Error(const std::string &what) : std::runtime_error(what) {}
    Error(std::string field, const std::string &what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

    const std::string &field() const noexcept { return field_; }

private:
    std::string field_;
};

struct Vec3
{
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr bool operator==(const Vec3 &) const = default;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    constexpr double dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
};

struct Vec2
{
    double x = 0.0, y = 0.0;
    constexpr bool operator==(const Vec2 &) const = default;
};

// Azimuth in [0, 360) from +x in the horizontal plane, elevation in [0, 180]
// from zenith. Both in degrees.
struct Direction
{
    double azimuth = 0.0;
    double elevation = 90.0;
};

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// Wraps into [0, 360).
inline double wrap_360(double deg)
{
    double w = std::fmod(deg, 360.0);
    if (w < 0.0)
        w += 360.0;
    if (w >= 360.0)
        w = 0.0;
    return w;
}

// Wraps into (-180, 180].
inline double wrap_180(double deg)
{
    double w = wrap_360(deg);
    return w > 180.0 ? w - 360.0 : w;
}

// Wraps into [0, 2*pi).
inline double wrap_2pi(double rad)
{
    double w = std::fmod(rad, 2.0 * kPi);
    if (w < 0.0)
        w += 2.0 * kPi;
    if (w >= 2.0 * kPi)
        w = 0.0;
    return w;
}

// Direction of vector v (need not be unit length).
inline Direction direction_of(const Vec3 &v)
{
    const double r = v.norm();
    Direction d;
    d.azimuth = wrap_360(rad2deg(std::atan2(v.y, v.x)));
    d.elevation = rad2deg(std::acos(std::clamp(v.z / r, -1.0, 1.0)));
    return d;
}

inline Vec3 unit_vector(const Direction &d)
{
    const double az = deg2rad(d.azimuth), el = deg2rad(d.elevation);
    return {std::sin(el) * std::cos(az), std::sin(el) * std::sin(az), std::cos(el)};
}

inline double wavelength(double carrier_frequency_hz) { return kSpeedOfLight / carrier_frequency_hz; }

} // namespace wisense

namespace wisense {

// SplitMix64 finaliser; derives independent generator seeds from a base seed
// and per-stream indices.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0)
{
    auto step = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return step(step(step(seed) ^ a) ^ b);
}

} // namespace wisense
