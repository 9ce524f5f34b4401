#include "wisense/io.hpp"
#include "wisense/scenario.hpp"

#include <doctest.h>

#include <filesystem>

using namespace wisense;
using namespace wisense::scenario;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string &name)
{
    const fs::path p = fs::temp_directory_path() / ("wisense_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string error_field(const json &j)
{
    try
    {
        from_json(j);
    }
    catch (const Error &e)
    {
        return e.field();
    }
    return "";
}

} // namespace

TEST_SUITE("scenario")
{
    TEST_CASE("paper presets")
    {
        const auto siso = preset("paper-siso");
        CHECK(siso.environment.tx == Vec3{4.0, 5.0, 1.5});
        CHECK(siso.environment.rx == Vec3{6.0, 3.0, 1.5});
        CHECK(siso.environment.room == Vec3{19.0, 10.0, 3.0});
        CHECK(siso.environment.carrier_frequency == 60e9);
        CHECK(siso.schedule.n_packets == 768);
        CHECK(siso.schedule.prf == 590.0);
        CHECK(siso.noise.snr_db == 20.0);
        CHECK(siso.mcs == 12);
        CHECK(siso.bandwidth == 1.76e9);
        CHECK(siso.gait.height == 1.8);
        CHECK(siso.gait.start == Vec2{4.0, 4.0});
        CHECK(siso.gait.end == Vec2{5.0, 4.0});
        CHECK(siso.gait.duration == 1.3);
        CHECK(siso.processing.window.kind == sensing::WindowKind::BlackmanHarris);
        CHECK(siso.processing.window.length == 32);
        CHECK_NOTHROW(siso.validate());

        const auto dir = preset("paper-directional");
        CHECK(dir.environment.tx == Vec3{3.0, 5.0, 1.5});
        CHECK(dir.environment.rx == Vec3{4.0, 7.0, 1.5});
        CHECK(dir.schedule.n_packets == 600);
        CHECK(dir.noise.snr_db == 40.0);
        CHECK(dir.directional.enabled);
        CHECK(dir.directional.codebooks.size() == 3);
        CHECK(dir.directional.trn().p == 2);
        CHECK(dir.processing.cpi == 32);
        CHECK(dir.processing.cpi_nfft == 64);
        CHECK_NOTHROW(dir.validate());

        CHECK_THROWS_AS(preset("nope"), Error);
    }

    TEST_CASE("config round trip is the identity")
    {
        for (const auto &name : preset_names())
        {
            const auto c = preset(name);
            const json j = to_json(c);
            const auto back = from_json(j);
            CHECK(to_json(back) == j);
            CHECK(from_json(json::parse(j.dump())).schedule.n_packets == c.schedule.n_packets);
        }
        auto c = preset("paper-siso");
        c.noise.snr_db = std::numeric_limits<double>::infinity();
        c.ddhc = channel::DdhcParams{0.6, 0.1, 9};
        const json j = to_json(c);
        CHECK(j["noise"]["snr_db"].is_null());
        const auto back = from_json(j);
        CHECK(std::isinf(back.noise.snr_db));
        REQUIRE(back.ddhc.has_value());
        CHECK(back.ddhc->rho == 0.6);
        CHECK(to_json(back) == j);
    }

    TEST_CASE("unknown keys and bad values name the field")
    {
        json j = to_json(preset("paper-siso"));
        j["gait"]["speed"] = 1.0;
        CHECK(error_field(j) == "gait.speed");

        j = to_json(preset("paper-siso"));
        j["extra"] = 1;
        CHECK(error_field(j) == "extra");

        j = to_json(preset("paper-siso"));
        j["schedule"]["prf_hz"] = "fast";
        CHECK(error_field(j) == "schedule.prf_hz");

        j = to_json(preset("paper-siso"));
        j["processing"]["window"] = "kaiser";
        CHECK(error_field(j) == "processing.window");

        j = to_json(preset("paper-siso"));
        j["schedule"]["n_packets"] = 500;
        CHECK(error_field(j) == "schedule.n_packets");

        j = to_json(preset("paper-directional"));
        j["directional"]["codebooks"] = json::array({"3x3"});
        CHECK(error_field(j) == "directional.codebooks");

        j = to_json(preset("paper-siso"));
        j["environment"]["tx"] = json::array({40.0, 5.0, 1.5});
        CHECK(error_field(j).rfind("environment", 0) == 0);
    }

    TEST_CASE("codebooks load from files")
    {
        const auto dir = scratch_dir("codebook");
        const json cb = {{"name", "line"}, {"rows", 1}, {"cols", 4}, {"azimuths", {0, 30, 330}}, {"elevations", {90}}};
        io::write_file(dir / "line.json", cb.dump());
        const auto loaded = resolve_codebook((dir / "line.json").string());
        CHECK(loaded.name == "line");
        CHECK(loaded.n_cols == 4);
        CHECK(loaded.size() == 3);
        CHECK(resolve_codebook("8x8").size() == 289);
        CHECK_THROWS_AS(resolve_codebook((dir / "missing.json").string()), Error);
    }

    TEST_CASE("SISO runs are reproducible")
    {
        auto c = preset("paper-siso");
        c.schedule.n_packets = 128;
        c.gait.duration = 128.0 / 590.0;
        const auto a = run_siso(c);
        const auto b = run_siso(c);
        REQUIRE(a.size() == 128);
        for (std::size_t k = 0; k < a.size(); ++k)
            CHECK(a[k].second.taps == b[k].second.taps);
        c.noise.seed = 2;
        CHECK(run_siso(c)[5].second.taps != a[5].second.taps);
    }

    TEST_CASE("SHA-256 of known vectors")
    {
        CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
        CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    TEST_CASE("number formatting round-trips")
    {
        for (double v : {0.0, 0.025, 1.0 / 3.0, -1e-300, 6.02e23})
            CHECK(std::stod(io::format_number(v)) == v);
        CHECK(io::format_number(0.05) == "0.05");
    }

    TEST_CASE("binary artifacts round-trip")
    {
        const auto dir = scratch_dir("binary");
        auto c = preset("paper-directional");
        c.schedule.n_packets = 40;
        c.gait.duration = 40.0 / 590.0;
        const auto stream = run_siso(c);
        io::write_cir_stream(dir / "s.bin", stream);
        const auto back = io::read_cir_stream(dir / "s.bin");
        REQUIRE(back.size() == stream.size());
        for (std::size_t k = 0; k < stream.size(); ++k)
        {
            CHECK(back[k].first == stream[k].first);
            CHECK(back[k].second.taps == stream[k].second.taps);
            CHECK(back[k].second.t0 == stream[k].second.t0);
        }

        const auto cube = run_directional(c, phy::Codebook::preset("2x2"));
        io::write_cube(dir / "c.bin", cube);
        const auto cb = io::read_cube(dir / "c.bin");
        CHECK(cb.samples == cube.samples);
        CHECK(cb.slow_axis == cube.slow_axis);
        CHECK(cb.n_directions == 25);

        io::write_file(dir / "junk.bin", "not an artifact");
        CHECK_THROWS_AS(io::read_cube(dir / "junk.bin"), Error);
        CHECK_THROWS_AS(io::read_cir_stream(dir / "missing.bin"), Error);
    }

    TEST_CASE("heatmap CSV, axes and PGM")
    {
        io::Heatmap h;
        h.row_label = "time_s";
        h.col_label = "doppler_hz";
        h.row_axis = {0.0, 0.5, 1.0};
        h.col_axis = {-10.0, 0.0, 10.0, 20.0};
        h.values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 0};
        const auto csv = io::heatmap_csv(h);
        CHECK(csv.rfind("time_s\\doppler_hz,-10,0,10,20\n", 0) == 0);
        const auto back = io::parse_heatmap_csv(csv);
        CHECK(back.row_axis == h.row_axis);
        CHECK(back.col_axis == h.col_axis);
        CHECK(back.values == h.values);

        const auto axes = io::heatmap_axes(h, "micro_doppler");
        CHECK(axes["rows"]["values"].size() == 3);
        CHECK(axes["pgm"]["db_floor"] == -120.0);

        const auto pgm = io::heatmap_pgm(h);
        const std::string header = "P5\n3 4\n255\n";
        REQUIRE(pgm.rfind(header, 0) == 0);
        REQUIRE(pgm.size() == header.size() + 12);
        // Top-left pixel is row 0, last column; the maximum maps to 255, zero to the floor.
        const auto px = [&](std::size_t x, std::size_t y) {
            return static_cast<unsigned char>(pgm[header.size() + y * 3 + x]);
        };
        CHECK(px(2, 1) == 255);
        CHECK(px(2, 0) == 0);
        CHECK(px(0, 0) > 0);

        CHECK_THROWS_AS(io::parse_heatmap_csv("a,b\n1,2,3\n"), Error);
    }

    TEST_CASE("manifest serialisation")
    {
        io::RunManifest m;
        m.config_hash = "abc";
        m.seed = 18446744073709551615ull;
        m.files["x.csv"] = io::sha256_hex("x");
        const auto back = io::RunManifest::from_json(m.to_json());
        CHECK(back.config_hash == "abc");
        CHECK(back.seed == m.seed);
        CHECK(back.files == m.files);
        CHECK(back.version == io::kVersion);

        const auto dir = scratch_dir("manifest");
        io::RunManifest w;
        io::write_artifact(dir, "sub/a.txt", "hello", w);
        CHECK(w.files.at("sub/a.txt") == io::sha256_hex("hello"));
        CHECK(io::sha256_file(dir / "sub/a.txt") == io::sha256_hex("hello"));
    }

    TEST_CASE("trajectory and ray dumps")
    {
        auto c = preset("paper-siso");
        c.schedule.n_packets = 4;
        c.gait.duration = 4.0 / 590.0;
        const auto traj = trajectory(c);
        const auto csv = io::trajectory_csv(traj);
        CHECK(csv.rfind("t,joint,x,y,z\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 * 17);

        std::vector<channel::ChannelRealization> reals;
        reals.push_back(channel::trace_rays(c.environment, std::span<const Vec3>(traj.positions[0]), 0.0));
        const auto rays = io::rays_csv(reals);
        CHECK(rays.rfind("t,delay_ns,gain_db,phase_rad,aod_az,aod_el,aoa_az,aoa_el,n_refl,target_related\n", 0) == 0);
        CHECK(std::count(rays.begin(), rays.end(), '\n') == 1 + 18);
    }

    TEST_CASE("feedback log JSON")
    {
        auto c = preset("paper-siso");
        c.schedule.n_packets = 30;
        c.gait.duration = 30.0 / 590.0;
        const auto log = threshold::apply_policy(run_siso(c), 0.05);
        const auto j = io::feedback_json(log);
        CHECK(j["n_total"] == 30);
        CHECK(j["reported_indices"].size() == log.reported.size());
        CHECK(j["variations"].size() == 30);
        CHECK(j["reduction"].get<double>() == doctest::Approx(log.reduction()));
    }
}
