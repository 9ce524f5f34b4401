#include "wisense/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <set>

namespace wisense::scenario {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be rejected.
class ObjectReader
{
public:
    ObjectReader(const json &j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw Error(path_, "expected an object");
    }

    template <typename T>
    void get(const char *key, T &out)
    {
        seen_.insert(key);
        if (!j_.contains(key))
            return;
        try
        {
            out = j_.at(key).get<T>();
        }
        catch (const json::exception &)
        {
            throw Error(field(key), "wrong type");
        }
    }

    void get(const char *key, Vec3 &out)
    {
        std::vector<double> v{out.x, out.y, out.z};
        get(key, v);
        if (v.size() != 3)
            throw Error(field(key), "expected [x, y, z]");
        out = {v[0], v[1], v[2]};
    }

    void get(const char *key, Vec2 &out)
    {
        std::vector<double> v{out.x, out.y};
        get(key, v);
        if (v.size() != 2)
            throw Error(field(key), "expected [x, y]");
        out = {v[0], v[1]};
    }

    std::optional<ObjectReader> child(const char *key)
    {
        seen_.insert(key);
        if (!j_.contains(key))
            return std::nullopt;
        return ObjectReader(j_.at(key), field(key));
    }

    bool has(const char *key) const { return j_.contains(key); }
    const json &raw(const char *key)
    {
        seen_.insert(key);
        return j_.at(key);
    }

    std::string field(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const
    {
        for (const auto &[key, _] : j_.items())
            if (!seen_.contains(key))
                throw Error(field(key), "unknown key");
    }

private:
    const json &j_;
    std::string path_;
    std::set<std::string> seen_;
};

json vec(const Vec3 &v) { return json::array({v.x, v.y, v.z}); }
json vec(const Vec2 &v) { return json::array({v.x, v.y}); }

std::string collapse_name(sensing::RangeCollapse c) { return c == sensing::RangeCollapse::Max ? "max" : "sum"; }

} // namespace

phy::TrnConfig DirectionalConfig::trn() const
{
    return trn_mode == phy::TrnMode::RxTraining ? phy::TrnConfig::rx_training() : phy::TrnConfig::tx_training(p, m, n);
}

phy::ArrayMount DirectionalConfig::trained_mount() const
{
    return {trn_mode == phy::TrnMode::RxTraining ? rx_boresight_azimuth : tx_boresight_azimuth};
}

Vec3 ScenarioConfig::trained_node() const
{
    return directional.trn_mode == phy::TrnMode::RxTraining ? environment.rx : environment.tx;
}

kinematics::BodyModel ScenarioConfig::body() const { return kinematics::BodyModel::with_height(gait.height); }

kinematics::GaitParams ScenarioConfig::gait_params() const
{
    kinematics::GaitParams g;
    g.start = gait.start;
    g.end = gait.end;
    g.duration = gait.duration;
    g.sample_interval = 1.0 / schedule.prf;
    return g;
}

phy::SweepOptions ScenarioConfig::sweep_options() const
{
    phy::SweepOptions o;
    o.bandwidth = bandwidth;
    o.n_taps = n_taps;
    o.mount = directional.trained_mount();
    o.ddhc = ddhc;
    return o;
}

void ScenarioConfig::validate() const
{
    environment.validate();
    if (!(bandwidth > 0.0))
        throw Error("environment.bandwidth_hz", "must be positive");
    if (n_taps < 1)
        throw Error("environment.n_taps", "must be at least 1");
    if (!(gait.height > 0.0))
        throw Error("gait.height_m", "must be positive");
    body();
    schedule.validate();
    gait_params().validate();
    const double expected = gait.duration * schedule.prf;
    if (std::abs(static_cast<double>(schedule.n_packets) - expected) > 1.0)
        throw Error("schedule.n_packets", "inconsistent with gait duration x prf (" + std::to_string(expected) + ")");
    if (std::isnan(noise.snr_db))
        throw Error("noise.snr_db", "must be a number or null");
    if (ddhc)
        ddhc->validate();
    processing.window.validate();
    if (processing.cpi < 2)
        throw Error("processing.cpi", "must be at least 2");
    if (processing.cpi_nfft < processing.cpi)
        throw Error("processing.cpi_nfft", "must be at least the CPI length");
    for (double t : threshold_levels)
        if (!(t >= 0.0 && t <= 1.0))
            throw Error("threshold.levels", "levels must lie in [0, 1]");
    if (directional.enabled && directional.codebooks.empty())
        throw Error("directional.codebooks", "at least one codebook required");
    for (const auto &cb : directional.codebooks)
        resolve_codebook(cb);
    for (const auto &f : output_formats)
        if (f != "csv" && f != "json" && f != "pgm")
            throw Error("output.formats", "unknown format '" + f + "'");
}

json to_json(const ScenarioConfig &c)
{
    const auto &e = c.environment;
    json j;
    j["name"] = c.name;
    j["environment"] = {{"room", vec(e.room)},
                        {"tx", vec(e.tx)},
                        {"rx", vec(e.rx)},
                        {"carrier_frequency_hz", e.carrier_frequency},
                        {"wall_reflections", e.wall_reflections},
                        {"joint_scattering_loss_db", e.joint_scattering_loss_db},
                        {"bandwidth_hz", c.bandwidth},
                        {"n_taps", c.n_taps}};
    j["gait"] = {{"height_m", c.gait.height},
                 {"start", vec(c.gait.start)},
                 {"end", vec(c.gait.end)},
                 {"duration_s", c.gait.duration}};
    j["schedule"] = {{"prf_hz", c.schedule.prf}, {"n_packets", c.schedule.n_packets}, {"t_start_s", c.schedule.t_start}};
    j["noise"] = {{"snr_db", c.noise.enabled() ? json(c.noise.snr_db) : json(nullptr)}, {"seed", c.noise.seed}};
    j["phy"] = {{"mcs", c.mcs}, {"golay_length", c.golay_length}};
    const channel::DdhcParams d = c.ddhc.value_or(channel::DdhcParams{});
    j["ddhc"] = {{"enabled", c.ddhc.has_value()}, {"rho", d.rho}, {"t0_s", d.t0}, {"seed", d.generator_seed}};
    const auto &p = c.processing;
    j["processing"] = {{"window", sensing::to_string(p.window.kind)},
                       {"window_length", p.window.length},
                       {"overlap", p.window.overlap},
                       {"nfft", p.window.nfft},
                       {"collapse", collapse_name(p.collapse)},
                       {"cpi", p.cpi},
                       {"cpi_nfft", p.cpi_nfft}};
    j["threshold"] = {{"levels", c.threshold_levels}};
    const auto &dc = c.directional;
    j["directional"] = {{"enabled", dc.enabled},
                        {"codebooks", dc.codebooks},
                        {"trn_mode", phy::to_string(dc.trn_mode)},
                        {"p", dc.p},
                        {"m", dc.m},
                        {"n", dc.n},
                        {"tx_boresight_azimuth_deg", dc.tx_boresight_azimuth},
                        {"rx_boresight_azimuth_deg", dc.rx_boresight_azimuth}};
    j["output"] = {{"directory", c.output_directory}, {"formats", c.output_formats}};
    return j;
}

ScenarioConfig from_json(const json &j)
{
    ScenarioConfig c;
    ObjectReader root(j, "");
    root.get("name", c.name);

    if (auto r = root.child("environment"))
    {
        auto &e = c.environment;
        r->get("room", e.room);
        r->get("tx", e.tx);
        r->get("rx", e.rx);
        r->get("carrier_frequency_hz", e.carrier_frequency);
        r->get("wall_reflections", e.wall_reflections);
        r->get("joint_scattering_loss_db", e.joint_scattering_loss_db);
        r->get("bandwidth_hz", c.bandwidth);
        r->get("n_taps", c.n_taps);
        r->finish();
    }
    if (auto r = root.child("gait"))
    {
        r->get("height_m", c.gait.height);
        r->get("start", c.gait.start);
        r->get("end", c.gait.end);
        r->get("duration_s", c.gait.duration);
        r->finish();
    }
    if (auto r = root.child("schedule"))
    {
        r->get("prf_hz", c.schedule.prf);
        r->get("n_packets", c.schedule.n_packets);
        r->get("t_start_s", c.schedule.t_start);
        r->finish();
    }
    if (auto r = root.child("noise"))
    {
        if (r->has("snr_db"))
        {
            const json &v = r->raw("snr_db");
            if (v.is_null())
                c.noise.snr_db = std::numeric_limits<double>::infinity();
            else if (v.is_number())
                c.noise.snr_db = v.get<double>();
            else
                throw Error("noise.snr_db", "wrong type");
        }
        r->get("seed", c.noise.seed);
        r->finish();
    }
    if (auto r = root.child("phy"))
    {
        r->get("mcs", c.mcs);
        r->get("golay_length", c.golay_length);
        r->finish();
    }
    if (auto r = root.child("ddhc"))
    {
        bool enabled = false;
        channel::DdhcParams d;
        r->get("enabled", enabled);
        r->get("rho", d.rho);
        r->get("t0_s", d.t0);
        r->get("seed", d.generator_seed);
        r->finish();
        if (enabled)
            c.ddhc = d;
    }
    if (auto r = root.child("processing"))
    {
        auto &p = c.processing;
        std::string kind = sensing::to_string(p.window.kind), collapse = collapse_name(p.collapse);
        r->get("window", kind);
        try
        {
            p.window.kind = sensing::window_kind_from_string(kind);
        }
        catch (const Error &)
        {
            throw Error("processing.window", "unknown window kind '" + kind + "'");
        }
        r->get("window_length", p.window.length);
        r->get("overlap", p.window.overlap);
        r->get("nfft", p.window.nfft);
        r->get("collapse", collapse);
        if (collapse != "max" && collapse != "sum")
            throw Error("processing.collapse", "expected 'max' or 'sum'");
        p.collapse = collapse == "max" ? sensing::RangeCollapse::Max : sensing::RangeCollapse::Sum;
        r->get("cpi", p.cpi);
        r->get("cpi_nfft", p.cpi_nfft);
        r->finish();
    }
    if (auto r = root.child("threshold"))
    {
        r->get("levels", c.threshold_levels);
        r->finish();
    }
    if (auto r = root.child("directional"))
    {
        auto &d = c.directional;
        std::string mode = phy::to_string(d.trn_mode);
        r->get("enabled", d.enabled);
        r->get("codebooks", d.codebooks);
        r->get("trn_mode", mode);
        d.trn_mode = phy::trn_mode_from_string(mode);
        r->get("p", d.p);
        r->get("m", d.m);
        r->get("n", d.n);
        r->get("tx_boresight_azimuth_deg", d.tx_boresight_azimuth);
        r->get("rx_boresight_azimuth_deg", d.rx_boresight_azimuth);
        r->finish();
    }
    if (auto r = root.child("output"))
    {
        r->get("directory", c.output_directory);
        r->get("formats", c.output_formats);
        r->finish();
    }
    root.finish();
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("config", "cannot open '" + path + "'");
    json j;
    try
    {
        in >> j;
    }
    catch (const json::parse_error &e)
    {
        throw Error("config", std::string("parse error: ") + e.what());
    }
    return from_json(j);
}

std::vector<std::string> preset_names() { return {"paper-siso", "paper-directional"}; }

ScenarioConfig preset(const std::string &name)
{
    ScenarioConfig c;
    c.name = name;
    if (name == "paper-siso")
    {
        c.environment.tx = {4.0, 5.0, 1.5};
        c.environment.rx = {6.0, 3.0, 1.5};
        c.schedule = {590.0, 768, 0.0};
        c.noise = {20.0, 1};
        c.mcs = 12;
        c.gait.duration = 1.3;
        return c;
    }
    if (name == "paper-directional")
    {
        c.environment.tx = {3.0, 5.0, 1.5};
        c.environment.rx = {4.0, 7.0, 1.5};
        c.schedule = {590.0, 600, 0.0};
        c.noise = {40.0, 1};
        c.mcs = 2;
        c.gait.duration = 1.017;
        c.directional.enabled = true;
        c.directional.codebooks = phy::Codebook::preset_names();
        // Both arrays look at the middle of the walk.
        const Vec2 mid{(c.gait.start.x + c.gait.end.x) / 2.0, (c.gait.start.y + c.gait.end.y) / 2.0};
        auto aim = [&](const Vec3 &node) { return direction_of({mid.x - node.x, mid.y - node.y, 0.0}).azimuth; };
        c.directional.tx_boresight_azimuth = aim(c.environment.tx);
        c.directional.rx_boresight_azimuth = aim(c.environment.rx);
        return c;
    }
    throw Error("preset", "unknown preset '" + name + "'");
}

phy::Codebook resolve_codebook(const std::string &name_or_path)
{
    for (const auto &n : phy::Codebook::preset_names())
        if (n == name_or_path)
            return phy::Codebook::preset(n);
    std::ifstream in(name_or_path);
    if (!in)
        throw Error("directional.codebooks", "'" + name_or_path + "' is neither a preset nor a readable file");
    json j;
    try
    {
        in >> j;
    }
    catch (const json::parse_error &e)
    {
        throw Error("codebook", std::string("parse error: ") + e.what());
    }
    phy::Codebook cb;
    ObjectReader r(j, "codebook");
    r.get("name", cb.name);
    r.get("rows", cb.n_rows);
    r.get("cols", cb.n_cols);
    r.get("azimuths", cb.azimuths);
    r.get("elevations", cb.elevations);
    r.finish();
    cb.validate();
    return cb;
}

kinematics::JointTrajectory trajectory(const ScenarioConfig &c)
{
    auto ts = c.schedule.timestamps();
    std::vector<double> rel(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k)
        rel[k] = ts[k] - c.schedule.t_start;
    auto traj = kinematics::build_walker_at(c.body(), c.gait_params(), rel);
    traj.timestamps = std::move(ts);
    return traj;
}

threshold::CirStream run_siso(const ScenarioConfig &c)
{
    c.validate();
    return phy::siso_stream(c.environment, trajectory(c), c.schedule, c.noise, c.sweep_options());
}

sensing::RadarDataCube run_directional(const ScenarioConfig &c, const phy::Codebook &codebook)
{
    c.validate();
    return phy::trn_sweep(c.environment, trajectory(c), c.schedule, codebook, c.directional.trn(), c.noise,
                          c.sweep_options());
}

sensing::Spectrogram micro_doppler(const ScenarioConfig &c, const threshold::CirStream &stream,
                                   const sensing::WindowSpec &window)
{
    const auto m = sensing::clutter_removal(sensing::build_matrix(stream));
    return sensing::stft_micro_doppler(m, window, c.processing.collapse);
}

sensing::Spectrogram micro_doppler(const ScenarioConfig &c, const threshold::CirStream &stream)
{
    return micro_doppler(c, stream, c.processing.window);
}

sensing::RangeDopplerMap full_range_doppler(const ScenarioConfig &c, const threshold::CirStream &stream)
{
    const auto m = sensing::clutter_removal(sensing::build_matrix(stream));
    std::size_t nfft = 1;
    while (nfft < m.n_slow)
        nfft *= 2;
    sensing::WindowSpec w{c.processing.window.kind, m.n_slow, 0.0, std::max(nfft, c.processing.window.nfft)};
    if (m.n_slow < 2)
        throw Error("range_doppler", "need at least 2 packets");
    return sensing::range_doppler(m, w, 0);
}

std::vector<ThresholdPoint> threshold_sweep(const threshold::CirStream &stream, const std::vector<double> &levels)
{
    std::vector<ThresholdPoint> out;
    for (double t : levels)
    {
        const auto log = threshold::apply_policy(stream, t);
        out.push_back({t, log.reported.size(), log.n_total, log.reduction()});
    }
    return out;
}

AngleRun evaluate_angles(const ScenarioConfig &c, const phy::Codebook &codebook, const sensing::RadarDataCube &cube)
{
    AngleRun run;
    run.codebook = codebook.name;
    run.estimates = angles::estimate_angles(cube, codebook, {c.processing.cpi, c.processing.cpi_nfft});
    std::vector<double> mids;
    for (const auto &e : run.estimates)
        mids.push_back(e.cpi_time);
    run.truths = angles::ground_truth_angles(trajectory(c), c.trained_node(), c.directional.trained_mount(), mids);
    std::vector<double> est_az, est_el, tru_az, tru_el;
    for (std::size_t i = 0; i < run.estimates.size(); ++i)
    {
        est_az.push_back(run.estimates[i].azimuth);
        est_el.push_back(run.estimates[i].elevation);
        tru_az.push_back(run.truths[i].azimuth);
        tru_el.push_back(run.truths[i].elevation);
    }
    run.azimuth = angles::accuracy(est_az, tru_az);
    run.elevation = angles::accuracy(est_el, tru_el);
    return run;
}

} // namespace wisense::scenario
