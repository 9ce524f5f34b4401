#include "wisense/io.hpp"

#include <charconv>
#include <openssl/evp.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace wisense::io {

using nlohmann::json;

namespace {

constexpr char kStreamMagic[8] = {'W', 'S', 'C', 'I', 'R', 'S', '0', '1'};
constexpr char kCubeMagic[8] = {'W', 'S', 'C', 'U', 'B', 'E', '0', '1'};

class Writer
{
public:
    template <typename T>
    void put(const T &v)
    {
        const auto *p = reinterpret_cast<const char *>(&v);
        buf_.append(p, sizeof(T));
    }
    void raw(const char *p, std::size_t n) { buf_.append(p, n); }
    const std::string &str() const { return buf_; }

private:
    std::string buf_;
};

class Reader
{
public:
    explicit Reader(std::string data) : data_(std::move(data)) {}
    template <typename T>
    T get()
    {
        if (pos_ + sizeof(T) > data_.size())
            throw Error("artifact", "truncated file");
        T v;
        std::memcpy(&v, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    void expect_magic(const char (&magic)[8])
    {
        if (data_.size() < 8 || std::memcmp(data_.data(), magic, 8) != 0)
            throw Error("artifact", "bad magic");
        pos_ = 8;
    }
    bool done() const { return pos_ == data_.size(); }

private:
    std::string data_;
    std::size_t pos_ = 0;
};

std::string fmt(double v) { return format_number(v); }

} // namespace

std::string format_number(double v)
{
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string sha256_hex(std::string_view bytes)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
        throw Error("sha256", "digest failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i)
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return os.str();
}

std::string sha256_file(const fs::path &path) { return sha256_hex(read_file(path)); }

void write_file(const fs::path &path, std::string_view contents)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("output", "cannot write '" + path.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out)
        throw Error("output", "write failed for '" + path.string() + "'");
}

std::string read_file(const fs::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("input", "cannot open '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_cir_stream(const fs::path &path, const threshold::CirStream &stream)
{
    if (stream.empty())
        throw Error("artifact", "empty CIR stream");
    const auto grid = stream.front().second.grid();
    Writer w;
    w.raw(kStreamMagic, 8);
    w.put<std::uint64_t>(stream.size());
    w.put<std::uint64_t>(grid.n_taps);
    w.put(grid.t0);
    w.put(grid.spacing);
    for (const auto &[t, cir] : stream)
    {
        if (cir.grid() != grid)
            throw Error("artifact", "mixed tap grids in stream");
        w.put(t);
        for (const auto &tap : cir.taps)
        {
            w.put(tap.real());
            w.put(tap.imag());
        }
    }
    write_file(path, w.str());
}

threshold::CirStream read_cir_stream(const fs::path &path)
{
    Reader r(read_file(path));
    r.expect_magic(kStreamMagic);
    const auto n = r.get<std::uint64_t>(), taps = r.get<std::uint64_t>();
    const auto t0 = r.get<double>(), spacing = r.get<double>();
    threshold::CirStream out;
    out.reserve(n);
    for (std::uint64_t k = 0; k < n; ++k)
    {
        const double t = r.get<double>();
        channel::Cir c;
        c.t0 = t0;
        c.tap_spacing = spacing;
        c.taps.resize(taps);
        for (auto &tap : c.taps)
        {
            const double re = r.get<double>();
            tap = {re, r.get<double>()};
        }
        out.emplace_back(t, std::move(c));
    }
    if (!r.done())
        throw Error("artifact", "trailing bytes in '" + path.string() + "'");
    return out;
}

void write_cube(const fs::path &path, const sensing::RadarDataCube &cube)
{
    Writer w;
    w.raw(kCubeMagic, 8);
    w.put<std::uint64_t>(cube.n_directions);
    w.put<std::uint64_t>(cube.n_fast);
    w.put<std::uint64_t>(cube.n_slow);
    w.put(cube.pri);
    for (auto d : cube.direction_axis)
        w.put<std::uint64_t>(d);
    for (double v : cube.fast_axis)
        w.put(v);
    for (double v : cube.slow_axis)
        w.put(v);
    for (const auto &s : cube.samples)
    {
        w.put(s.real());
        w.put(s.imag());
    }
    write_file(path, w.str());
}

sensing::RadarDataCube read_cube(const fs::path &path)
{
    Reader r(read_file(path));
    r.expect_magic(kCubeMagic);
    sensing::RadarDataCube c;
    c.n_directions = r.get<std::uint64_t>();
    c.n_fast = r.get<std::uint64_t>();
    c.n_slow = r.get<std::uint64_t>();
    c.pri = r.get<double>();
    for (std::size_t i = 0; i < c.n_directions; ++i)
        c.direction_axis.push_back(r.get<std::uint64_t>());
    for (std::size_t i = 0; i < c.n_fast; ++i)
        c.fast_axis.push_back(r.get<double>());
    for (std::size_t i = 0; i < c.n_slow; ++i)
        c.slow_axis.push_back(r.get<double>());
    c.samples.resize(c.n_directions * c.n_fast * c.n_slow);
    for (auto &s : c.samples)
    {
        const double re = r.get<double>();
        s = {re, r.get<double>()};
    }
    if (!r.done())
        throw Error("artifact", "trailing bytes in '" + path.string() + "'");
    return c;
}

Heatmap spectrogram_heatmap(const sensing::Spectrogram &sg)
{
    return {"time_s", "doppler_hz", sg.frame_times, sg.doppler_axis, sg.magnitudes};
}

Heatmap range_doppler_heatmap(const sensing::RangeDopplerMap &rd)
{
    std::vector<double> delay_ns;
    for (double d : rd.range_axis)
        delay_ns.push_back(d * 1e9);
    return {"delay_ns", "doppler_hz", delay_ns, rd.doppler_axis, rd.magnitudes};
}

std::string heatmap_csv(const Heatmap &h)
{
    std::ostringstream os;
    os << h.row_label << "\\" << h.col_label;
    for (double c : h.col_axis)
        os << ',' << fmt(c);
    os << '\n';
    for (std::size_t r = 0; r < h.row_axis.size(); ++r)
    {
        os << fmt(h.row_axis[r]);
        for (std::size_t c = 0; c < h.col_axis.size(); ++c)
            os << ',' << fmt(h.values[r * h.col_axis.size() + c]);
        os << '\n';
    }
    return os.str();
}

Heatmap parse_heatmap_csv(const std::string &text)
{
    std::istringstream in(text);
    std::string line;
    Heatmap h;
    auto split = [](const std::string &s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ','))
            out.push_back(cell);
        return out;
    };
    auto number = [](const std::string &s) {
        try
        {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size())
                throw Error("csv", "bad number '" + s + "'");
            return v;
        }
        catch (const std::logic_error &)
        {
            throw Error("csv", "bad number '" + s + "'");
        }
    };
    if (!std::getline(in, line))
        throw Error("csv", "empty heatmap");
    auto header = split(line);
    if (header.size() < 2)
        throw Error("csv", "header needs at least one column");
    const auto slash = header[0].find('\\');
    h.row_label = header[0].substr(0, slash);
    h.col_label = slash == std::string::npos ? "" : header[0].substr(slash + 1);
    for (std::size_t i = 1; i < header.size(); ++i)
        h.col_axis.push_back(number(header[i]));
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        auto cells = split(line);
        if (cells.size() != header.size())
            throw Error("csv", "ragged row");
        h.row_axis.push_back(number(cells[0]));
        for (std::size_t i = 1; i < cells.size(); ++i)
            h.values.push_back(number(cells[i]));
    }
    return h;
}

json heatmap_axes(const Heatmap &h, const std::string &kind)
{
    return {{"kind", kind},
            {"rows", {{"label", h.row_label}, {"values", h.row_axis}}},
            {"cols", {{"label", h.col_label}, {"values", h.col_axis}}},
            {"scale", "linear magnitude"},
            {"pgm", {{"x", h.row_label}, {"y", h.col_label}, {"db_floor", kDbFloor}, {"normalisation", "per-image max"}}}};
}

std::string heatmap_pgm(const Heatmap &h)
{
    const std::size_t width = h.row_axis.size(), height = h.col_axis.size();
    if (width == 0 || height == 0)
        throw Error("pgm", "empty heatmap");
    const double peak = *std::max_element(h.values.begin(), h.values.end());
    std::ostringstream os;
    os << "P5\n" << width << ' ' << height << "\n255\n";
    std::string pixels(width * height, '\0');
    for (std::size_t y = 0; y < height; ++y)
    {
        const std::size_t col = height - 1 - y;
        for (std::size_t x = 0; x < width; ++x)
        {
            const double v = h.values[x * height + col];
            double db = kDbFloor;
            if (peak > 0.0 && v > 0.0)
                db = std::max(kDbFloor, 20.0 * std::log10(v / peak));
            const double level = std::round(255.0 * (db - kDbFloor) / -kDbFloor);
            pixels[y * width + x] = static_cast<char>(static_cast<unsigned char>(std::clamp(level, 0.0, 255.0)));
        }
    }
    os << pixels;
    return os.str();
}

std::string trajectory_csv(const kinematics::JointTrajectory &traj)
{
    std::ostringstream os;
    os << "t,joint,x,y,z\n";
    for (std::size_t k = 0; k < traj.size(); ++k)
        for (std::size_t j = 0; j < kinematics::kNumJoints; ++j)
        {
            const Vec3 &p = traj.positions[k][j];
            os << fmt(traj.timestamps[k]) << ',' << j << ',' << fmt(p.x) << ',' << fmt(p.y) << ',' << fmt(p.z) << '\n';
        }
    return os.str();
}

std::string rays_csv(const std::vector<channel::ChannelRealization> &reals)
{
    std::ostringstream os;
    os << "t,delay_ns,gain_db,phase_rad,aod_az,aod_el,aoa_az,aoa_el,n_refl,target_related\n";
    for (const auto &real : reals)
        for (const auto &r : real.rays)
            os << fmt(real.timestamp) << ',' << fmt(r.delay * 1e9) << ',' << fmt(20.0 * std::log10(r.gain)) << ','
               << fmt(r.phase) << ',' << fmt(r.aod.azimuth) << ',' << fmt(r.aod.elevation) << ','
               << fmt(r.aoa.azimuth) << ',' << fmt(r.aoa.elevation) << ',' << r.n_reflections << ','
               << (r.target_related ? 1 : 0) << '\n';
    return os.str();
}

json feedback_json(const threshold::FeedbackLog &log)
{
    json indices = json::array(), times = json::array();
    for (const auto &r : log.reported)
    {
        indices.push_back(r.packet_index);
        times.push_back(r.timestamp);
    }
    return {{"threshold", log.threshold},
            {"n_total", log.n_total},
            {"n_reported", log.reported.size()},
            {"reduction", log.reduction()},
            {"reported_indices", indices},
            {"reported_timestamps", times},
            {"variations", log.variations}};
}

json RunManifest::to_json() const
{
    return {{"config_hash", config_hash}, {"seed", seed}, {"software_version", version}, {"files", files}};
}

RunManifest RunManifest::from_json(const json &j)
{
    RunManifest m;
    try
    {
        m.config_hash = j.at("config_hash").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.version = j.at("software_version").get<std::string>();
        m.files = j.at("files").get<std::map<std::string, std::string>>();
    }
    catch (const json::exception &e)
    {
        throw Error("manifest", e.what());
    }
    return m;
}

void write_artifact(const fs::path &dir, const std::string &name, std::string_view contents, RunManifest &manifest)
{
    write_file(dir / name, contents);
    manifest.files[name] = sha256_hex(contents);
}

} // namespace wisense::io
