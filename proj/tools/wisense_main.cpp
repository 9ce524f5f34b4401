#include "wisense/io.hpp"
#include "wisense/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

using namespace wisense;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonArgs
{
    std::string config_path;
    std::string preset_name;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> formats;
};

void add_common(CLI::App *cmd, CommonArgs &a)
{
    auto *src = cmd->add_option_group("source");
    src->add_option("--config", a.config_path, "Scenario config (JSON)");
    src->add_option("--preset", a.preset_name, "Built-in scenario preset");
    src->require_option(1);
    cmd->add_option("--out", a.out_dir, "Output directory (overrides config)");
    cmd->add_option("--seed", a.seed, "Noise seed (overrides config)");
    cmd->add_option("--format", a.formats, "Output formats: csv, json, pgm (repeatable)")
        ->check(CLI::IsMember({"csv", "json", "pgm"}));
}

scenario::ScenarioConfig resolve(const CommonArgs &a)
{
    auto c = a.preset_name.empty() ? scenario::load_config(a.config_path) : scenario::preset(a.preset_name);
    if (!a.out_dir.empty())
        c.output_directory = a.out_dir;
    if (a.seed)
        c.noise.seed = *a.seed;
    if (!a.formats.empty())
        c.output_formats = a.formats;
    c.validate();
    return c;
}

// Output location and formats do not change any computed product.
std::string config_hash(const scenario::ScenarioConfig &c)
{
    auto j = scenario::to_json(c);
    j.erase("output");
    return io::sha256_hex(j.dump());
}

bool wants(const scenario::ScenarioConfig &c, const std::string &fmt)
{
    return std::find(c.output_formats.begin(), c.output_formats.end(), fmt) != c.output_formats.end();
}

// Loads the manifest of a previous run of the same config, or starts a new one.
io::RunManifest open_manifest(const scenario::ScenarioConfig &c, bool require_existing)
{
    const fs::path path = fs::path(c.output_directory) / "manifest.json";
    const auto hash = config_hash(c);
    if (fs::exists(path))
    {
        auto m = io::RunManifest::from_json(json::parse(io::read_file(path)));
        if (m.config_hash == hash)
            return m;
        if (require_existing)
            throw Error("artifact", "'" + path.string() + "' was produced by a different config or seed");
    }
    else if (require_existing)
    {
        throw Error("artifact", "no manifest in '" + c.output_directory + "'; run simulate first");
    }
    io::RunManifest m;
    m.config_hash = hash;
    m.seed = c.noise.seed;
    return m;
}

void close_manifest(const scenario::ScenarioConfig &c, const io::RunManifest &m)
{
    io::write_file(fs::path(c.output_directory) / "manifest.json", m.to_json().dump(2) + "\n");
}

fs::path artifact_path(const scenario::ScenarioConfig &c, const io::RunManifest &m, const std::string &name)
{
    const fs::path p = fs::path(c.output_directory) / name;
    const auto it = m.files.find(name);
    if (it == m.files.end() || !fs::exists(p))
        throw Error("artifact", "missing '" + name + "'; run simulate first");
    if (io::sha256_file(p) != it->second)
        throw Error("artifact", "checksum mismatch for '" + name + "'");
    return p;
}

std::string cube_name(const std::string &codebook)
{
    std::string s = fs::path(codebook).stem().string();
    for (char &ch : s)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_')
            ch = '_';
    return "cube_" + s + ".bin";
}

void write_heatmap(const scenario::ScenarioConfig &c, io::RunManifest &m, const std::string &stem,
                   const std::string &kind, const io::Heatmap &h)
{
    const fs::path dir = c.output_directory;
    if (wants(c, "csv"))
        io::write_artifact(dir, stem + ".csv", io::heatmap_csv(h), m);
    if (wants(c, "pgm"))
        io::write_artifact(dir, stem + ".pgm", io::heatmap_pgm(h), m);
    io::write_artifact(dir, stem + ".axes.json", io::heatmap_axes(h, kind).dump(2) + "\n", m);
}

void cmd_presets(const std::string &show)
{
    if (show.empty())
    {
        for (const auto &n : scenario::preset_names())
            std::cout << n << "\n";
        return;
    }
    std::cout << scenario::to_json(scenario::preset(show)).dump(2) << "\n";
}

void cmd_simulate(const CommonArgs &a)
{
    const auto c = resolve(a);
    const fs::path dir = c.output_directory;
    auto m = open_manifest(c, false);
    m.files.clear();

    io::write_artifact(dir, "config.json", scenario::to_json(c).dump(2) + "\n", m);
    const auto traj = scenario::trajectory(c);
    io::write_artifact(dir, "trajectory.csv", io::trajectory_csv(traj), m);

    std::vector<channel::ChannelRealization> reals;
    reals.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k)
        reals.push_back(channel::trace_rays(c.environment, std::span<const Vec3>(traj.positions[k]),
                                            traj.timestamps[k]));
    io::write_artifact(dir, "rays.csv", io::rays_csv(reals), m);

    const auto stream = scenario::run_siso(c);
    io::write_cir_stream(dir / "cir_stream.bin", stream);
    m.files["cir_stream.bin"] = io::sha256_file(dir / "cir_stream.bin");

    if (c.directional.enabled)
        for (const auto &name : c.directional.codebooks)
        {
            const auto cb = scenario::resolve_codebook(name);
            const auto file = cube_name(name);
            io::write_cube(dir / file, scenario::run_directional(c, cb));
            m.files[file] = io::sha256_file(dir / file);
        }
    close_manifest(c, m);
}

void cmd_process(const CommonArgs &a)
{
    const auto c = resolve(a);
    auto m = open_manifest(c, true);
    const auto stream = io::read_cir_stream(artifact_path(c, m, "cir_stream.bin"));
    write_heatmap(c, m, "micro_doppler", "micro_doppler", io::spectrogram_heatmap(scenario::micro_doppler(c, stream)));
    write_heatmap(c, m, "range_doppler", "range_doppler",
                  io::range_doppler_heatmap(scenario::full_range_doppler(c, stream)));
    close_manifest(c, m);
}

void cmd_threshold(const CommonArgs &a)
{
    const auto c = resolve(a);
    auto m = open_manifest(c, true);
    const auto stream = io::read_cir_stream(artifact_path(c, m, "cir_stream.bin"));
    const fs::path dir = c.output_directory;

    std::ostringstream csv;
    csv << "threshold,reported,total,reduction\n";
    for (const auto &p : scenario::threshold_sweep(stream, c.threshold_levels))
        csv << io::format_number(p.threshold) << "," << p.reported << "," << p.total << ","
            << io::format_number(p.reduction) << "\n";
    io::write_artifact(dir, "threshold_sweep.csv", csv.str(), m);

    if (wants(c, "json"))
    {
        json logs = json::array();
        for (double t : c.threshold_levels)
            logs.push_back(io::feedback_json(threshold::apply_policy(stream, t)));
        io::write_artifact(dir, "feedback.json", logs.dump(2) + "\n", m);
    }
    // Micro-Doppler of each reconstructed stream, for comparison with the full-feedback one.
    for (std::size_t i = 0; i < c.threshold_levels.size(); ++i)
    {
        const auto rec = threshold::reconstruct(threshold::apply_policy(stream, c.threshold_levels[i]), c.schedule);
        write_heatmap(c, m, "micro_doppler_threshold_" + std::to_string(i), "micro_doppler",
                      io::spectrogram_heatmap(scenario::micro_doppler(c, rec)));
    }
    close_manifest(c, m);
}

void cmd_angles(const CommonArgs &a)
{
    const auto c = resolve(a);
    if (!c.directional.enabled)
        throw Error("directional.enabled", "angle estimation needs a directional scenario");
    auto m = open_manifest(c, true);
    const fs::path dir = c.output_directory;
    json summary = json::array();

    for (const auto &name : c.directional.codebooks)
    {
        const auto cb = scenario::resolve_codebook(name);
        const auto cube = io::read_cube(artifact_path(c, m, cube_name(name)));
        const auto run = scenario::evaluate_angles(c, cb, cube);
        const std::string stem = fs::path(cube_name(name)).stem().string().substr(5);

        std::ostringstream est;
        est << "cpi,time_s,azimuth_deg,elevation_deg,truth_azimuth_deg,truth_elevation_deg,azimuth_error_deg,"
               "elevation_error_deg\n";
        for (std::size_t i = 0; i < run.estimates.size(); ++i)
        {
            const auto &e = run.estimates[i];
            est << e.cpi_index;
            for (double v : {e.cpi_time, e.azimuth, e.elevation, run.truths[i].azimuth, run.truths[i].elevation,
                             run.azimuth.errors[i], run.elevation.errors[i]})
                est << "," << io::format_number(v);
            est << "\n";
        }
        io::write_artifact(dir, "angles_" + stem + ".csv", est.str(), m);

        std::ostringstream hist;
        hist << "bin_lower_deg,azimuth_count,elevation_count\n";
        for (std::size_t b = 0; b < run.azimuth.histogram.size(); ++b)
            hist << io::format_number(run.azimuth.bin_edges[b]) << "," << run.azimuth.histogram[b] << ","
                 << run.elevation.histogram[b] << "\n";
        io::write_artifact(dir, "accuracy_" + stem + ".csv", hist.str(), m);

        summary.push_back({{"codebook", cb.name},
                           {"estimates", run.estimates.size()},
                           {"azimuth_mae_deg", run.azimuth.mean_abs_error},
                           {"elevation_mae_deg", run.elevation.mean_abs_error}});
    }
    if (wants(c, "json"))
        io::write_artifact(dir, "angles_summary.json", summary.dump(2) + "\n", m);
    std::cout << summary.dump(2) << "\n";
    close_manifest(c, m);
}

void cmd_render(const std::string &in, std::string out)
{
    const auto h = io::parse_heatmap_csv(io::read_file(in));
    if (out.empty())
        out = fs::path(in).replace_extension(".pgm").string();
    io::write_file(out, io::heatmap_pgm(h));
}

int fail(const std::string &field, const std::string &message, int code)
{
    json j{{"error", message}};
    if (!field.empty())
        j["field"] = field;
    std::cerr << j.dump() << std::endl;
    return code;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"60 GHz bi-static Wi-Fi sensing simulator"};
    app.set_version_flag("--version", std::string(io::kVersion));
    app.require_subcommand(1);

    std::string show;
    auto *presets = app.add_subcommand("presets", "List presets, or print one as a config");
    presets->add_option("name", show, "Preset to print");

    CommonArgs sim_args, proc_args, thr_args, ang_args;
    auto *simulate = app.add_subcommand("simulate", "Trace the scenario and store CIR artifacts");
    add_common(simulate, sim_args);
    auto *process = app.add_subcommand("process", "Micro-Doppler and range-Doppler products");
    add_common(process, proc_args);
    auto *thresh = app.add_subcommand("threshold", "Feedback reduction sweep and reconstructions");
    add_common(thresh, thr_args);
    auto *angles_cmd = app.add_subcommand("angles", "Codebook angle estimation and accuracy");
    add_common(angles_cmd, ang_args);

    std::string render_in, render_out;
    auto *render = app.add_subcommand("render", "Render a heatmap CSV to PGM");
    render->add_option("input", render_in, "Heatmap CSV")->required()->check(CLI::ExistingFile);
    render->add_option("--out", render_out, "Output PGM path");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::Success &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        return fail("", e.what(), e.get_exit_code() == 0 ? 2 : e.get_exit_code());
    }

    try
    {
        if (*presets)
            cmd_presets(show);
        else if (*simulate)
            cmd_simulate(sim_args);
        else if (*process)
            cmd_process(proc_args);
        else if (*thresh)
            cmd_threshold(thr_args);
        else if (*angles_cmd)
            cmd_angles(ang_args);
        else if (*render)
            cmd_render(render_in, render_out);
    }
    catch (const Error &e)
    {
        return fail(e.field(), e.what(), 1);
    }
    catch (const std::exception &e)
    {
        return fail("", e.what(), 1);
    }
    return 0;
}
