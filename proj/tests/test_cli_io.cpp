#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "vortexpacket/cli.hpp"
#include "vortexpacket/config.hpp"
#include "vortexpacket/io.hpp"

using namespace vortex;

namespace {
std::filesystem::path temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("vortexpacket_cli_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}
}  // namespace

TEST_SUITE("cli_io") {

TEST_CASE("minimal config gets defaults") {
    const RunConfig cfg = parse_config("field.type = \"free\"\npacket.l = 1\n");
    CHECK(cfg.units.hbar == 1.0);
    CHECK(cfg.units.charge == -1.0);
    CHECK(cfg.l == 1);
    CHECK(cfg.oam_model == "slaved");
    CHECK(cfg.method == "rk4");
    CHECK(cfg.seed == 12345);
}

TEST_CASE("type and key errors name the offender") {
    SUBCASE("fractional integer") {
        try {
            parse_config("packet.l = 1.5\n");
            FAIL("expected a validation error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("integer required at packet.l") != std::string::npos);
        }
    }
    SUBCASE("unknown key with line number") {
        try {
            parse_config("# comment\nfield.typ = \"free\"\n");
            FAIL("expected a validation error");
        } catch (const Error& e) {
            const std::string what = e.what();
            CHECK(what.find("unknown key 'field.typ'") != std::string::npos);
            CHECK(what.find("line 2") != std::string::npos);
        }
    }
    SUBCASE("duplicate keys rejected") {
        CHECK_THROWS_AS(parse_config("packet.l = 1\npacket.l = 2\n"), Error);
    }
    SUBCASE("malformed line carries its number") {
        try {
            parse_config("packet.l = 1\nnonsense line\n");
            FAIL("expected a parse error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("bad scenario key for the kind") {
        CHECK_THROWS_AS(
            parse_config("scenario.kind = \"berry_loop\"\nscenario.e0 = 0.1\n"), Error);
    }
    SUBCASE("out-of-range integrator tolerance") {
        CHECK_THROWS_AS(parse_config("integrator.rtol = 0.5\n"), Error);
    }
}

TEST_CASE("round trip over random valid configs") {
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto pick = [&](std::initializer_list<const char*> opts) {
        auto it = opts.begin();
        std::advance(it, static_cast<size_t>(u01(rng) * opts.size()) % opts.size());
        return std::string(*it);
    };
    for (int trial = 0; trial < 100; ++trial) {
        std::ostringstream text;
        text << "unit.hbar = " << 0.5 + u01(rng) << "\n";
        text << "unit.charge = " << (u01(rng) < 0.5 ? -1.0 : -2.5) << "\n";
        text << "field.type = \"" << pick({"free", "uniform_e", "uniform_b"}) << "\"\n";
        text << "field.vector = [" << u01(rng) << ", " << u01(rng) << ", " << u01(rng) << "]\n";
        text << "field.g_factor = " << 2.0 * u01(rng) << "\n";
        text << "packet.l = " << static_cast<int>(u01(rng) * 7) - 3 << "\n";
        text << "packet.m_radial = " << static_cast<int>(u01(rng) * 3) << "\n";
        text << "packet.p0 = [0, 0, " << 0.5 + u01(rng) << "]\n";
        text << "packet.oam_model = \"" << pick({"slaved", "precessing"}) << "\"\n";
        text << "integrator.method = \"" << pick({"rk4", "rkf45"}) << "\"\n";
        text << "integrator.t_final = " << 1.0 + 100.0 * u01(rng) << "\n";
        if (u01(rng) < 0.5) {
            text << "scenario.kind = \"fig2_hall_fan\"\n";
            text << "scenario.e0 = " << 0.01 + 0.1 * u01(rng) << "\n";
            text << "scenario.l_values = [0, 1, " << static_cast<int>(u01(rng) * 5) << "]\n";
        }
        text << "run.seed = " << static_cast<int>(u01(rng) * 100000) << "\n";

        const RunConfig c1 = parse_config(text.str());
        const RunConfig c2 = parse_config(serialize_config(c1));
        CHECK(c1 == c2);
    }
}

TEST_CASE("trajectory CSV") {
    const auto dir = temp_dir("traj");
    const std::string path = (dir / "t.csv").string();

    SUBCASE("empty trajectory writes the header only") {
        write_trajectory_csv({}, path);
        const std::string body = slurp(path);
        CHECK(body.find("t,r_x") == 0);
        CHECK(std::count(body.begin(), body.end(), '\n') == 1);
    }
    SUBCASE("rows have 16 columns and round trip exactly") {
        std::vector<TrajectoryPoint> points;
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int i = 0; i < 50; ++i) {
            TrajectoryPoint pt;
            pt.t = i * 0.1 + 1e-3 * u(rng);
            pt.r = {u(rng), u(rng), u(rng)};
            pt.p = {u(rng), u(rng), 1.0 + 0.1 * u(rng)};
            pt.l_vec = {u(rng), u(rng), u(rng)};
            pt.helicity = u(rng);
            pt.theta_dyn = 100.0 * u(rng);
            pt.theta_dirac = u(rng) * 1e-7;
            pt.theta_berry = u(rng);
            pt.energy = u(rng);
            pt.dos = 1.0 + 0.1 * u(rng);
            points.push_back(pt);
        }
        write_trajectory_csv(points, path);

        std::istringstream in(slurp(path));
        std::string line;
        std::getline(in, line);
        CHECK(std::count(line.begin(), line.end(), ',') == 15);
        while (std::getline(in, line))
            CHECK(std::count(line.begin(), line.end(), ',') == 15);

        const auto back = read_trajectory_csv(path);
        REQUIRE(back.size() == points.size());
        for (size_t i = 0; i < points.size(); ++i) {
            CHECK(back[i].t == points[i].t);  // bit-exact through %.17g
            CHECK(back[i].r == points[i].r);
            CHECK(back[i].p == points[i].p);
            CHECK(back[i].l_vec == points[i].l_vec);
            CHECK(back[i].helicity == points[i].helicity);
            CHECK(back[i].theta_dyn == points[i].theta_dyn);
            CHECK(back[i].theta_dirac == points[i].theta_dirac);
            CHECK(back[i].theta_berry == points[i].theta_berry);
            CHECK(back[i].energy == points[i].energy);
            CHECK(back[i].dos == points[i].dos);
        }
    }
}

TEST_CASE("VPGRID01 binary round trip") {
    const auto dir = temp_dir("grid");
    const std::string path = (dir / "g.bin").string();
    GridField g;
    g.grid_n = 32;
    g.extent = 12.5;
    g.tau = 0.75;
    g.values.resize(32 * 32);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : g.values) v = {u(rng), u(rng)};
    write_grid_binary(g, path);

    CHECK(std::filesystem::file_size(path) == 32 + 32 * 32 * 16);
    CHECK(slurp(path).substr(0, 8) == "VPGRID01");

    const GridField back = read_grid_binary(path);
    CHECK(back.grid_n == g.grid_n);
    CHECK(back.extent == g.extent);
    CHECK(back.tau == g.tau);
    CHECK(back.values == g.values);

    SUBCASE("magic is verified") {
        std::ofstream f(path, std::ios::binary);
        f << "NOTAGRID" << std::string(100, '\0');
        f.close();
        CHECK_THROWS_AS(read_grid_binary(path), Error);
    }
}

TEST_CASE("config hash is deterministic") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("vortex") == fnv1a64("vortex"));
    CHECK(fnv1a64("vortex") != fnv1a64("vortey"));
}

TEST_CASE("dispatch") {
    const auto dir = temp_dir("dispatch");

    SUBCASE("unknown subcommand exits 2") {
        CHECK(dispatch({"definitely_not_a_subcommand"}) == 2);
    }
    SUBCASE("missing required flag exits 2") {
        CHECK(dispatch({"berry"}) == 2);
    }
    SUBCASE("bad config exits 1 and names the key") {
        const std::string cfg_path = (dir / "bad.cfg").string();
        std::ofstream(cfg_path) << "packet.l = 1.5\n";
        CHECK(dispatch({"trace", "--config", cfg_path}) == 1);
    }
    SUBCASE("version flag exits 0") {
        CHECK(dispatch({"--version"}) == 0);
    }
    SUBCASE("scenario produces a manifest and per-l trajectory files") {
        const std::string cfg_path = (dir / "fan.cfg").string();
        std::ofstream(cfg_path) << "scenario.kind = \"fig2_hall_fan\"\n"
                                   "scenario.l_values = [-1, 0, 1]\n"
                                   "scenario.e0 = 0.05\n"
                                   "scenario.t_final = 20\n";
        const std::string out = (dir / "fan_out").string();
        CHECK(dispatch({"scenario", "fig2_hall_fan", "--config", cfg_path, "--out", out}) == 0);
        CHECK(std::filesystem::exists(std::filesystem::path(out) / "manifest"));
        int traces = 0;
        for (const auto& entry : std::filesystem::directory_iterator(out))
            if (entry.path().filename().string().rfind("trace_l", 0) == 0) ++traces;
        CHECK(traces >= 3);
        const std::string manifest = slurp((std::filesystem::path(out) / "manifest").string());
        CHECK(manifest.find("config_hash") != std::string::npos);
        CHECK(manifest.find("gauge") != std::string::npos);
        CHECK(manifest.find("version") != std::string::npos);
    }
    SUBCASE("modes then propagate round trips the binary format") {
        const std::string prefix = (dir / "mode").string();
        CHECK(dispatch({"modes", "--l", "2", "--grid-n", "64", "--out", prefix}) == 0);
        const std::string out_bin = (dir / "mode_out.bin").string();
        CHECK(dispatch({"propagate", "--in", prefix + ".bin", "--out", out_bin, "--dtau", "10",
                        "--steps", "4"}) == 0);
        const GridField g = read_grid_binary(out_bin);
        CHECK(g.tau == doctest::Approx(40.0));
    }
    SUBCASE("symplectic prints a table") {
        CHECK(dispatch({"symplectic", "--p", "0,0,1", "--l", "2"}) == 0);
    }
    SUBCASE("aborted trace exits 1 but writes the partial trajectory") {
        const std::string cfg_path = (dir / "abort.cfg").string();
        // decelerating field anti-parallel to p: |p| hits the momentum floor
        std::ofstream(cfg_path) << "field.type = \"uniform_e\"\n"
                                   "field.vector = [0, 0.5, 0]\n"
                                   "packet.l = 1\n"
                                   "packet.p0 = [0, 0.5, 0]\n"
                                   "integrator.step = 0.001\n"
                                   "integrator.t_final = 10\n"
                                   "integrator.output_stride = 10\n";
        const std::string out = (dir / "abort.csv").string();
        CHECK(dispatch({"trace", "--config", cfg_path, "--out", out}) == 1);
        CHECK(read_trajectory_csv(out).size() > 10);
    }
    SUBCASE("propagate refuses a grid that is not a power of two") {
        GridField g;
        g.grid_n = 48;
        g.extent = 10.0;
        g.values.resize(48 * 48, {0.1, 0.0});
        const std::string bad = (dir / "bad.bin").string();
        write_grid_binary(g, bad);
        CHECK(dispatch({"propagate", "--in", bad, "--out", bad + ".out", "--dtau", "1"}) == 1);
    }
    SUBCASE("berry reports open paths") {
        const std::string path = (dir / "open.csv").string();
        std::ofstream(path) << "1,0,0\n0,1,0.2\n-1,0,0.4\n";
        CHECK(dispatch({"berry", "--path", path, "--l", "1"}) == 0);
    }
}

}  // TEST_SUITE
