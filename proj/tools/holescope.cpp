// holescope: bifurcation sets of piecewise-linear maps with a hole.
// Subcommands: render, orbits, entropy, escape, tent-scan, verify.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "holescope/raster_io.hpp"
#include "holescope/tentlab.hpp"

using namespace holescope;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "holescope 1.0.0";

struct Manifest {
    json j;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    Manifest(const std::string& cmd, const json& params, const std::string& mode) {
        j["version"] = kVersion;
        j["command"] = cmd;
        j["parameters"] = params;
        j["mode"] = mode;
        j["outputs"] = json::array();
    }
    void add_output(const std::string& path, std::uint64_t digest) {
        char buf[20];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
        j["outputs"].push_back({{"path", path}, {"fnv1a64", std::string(buf)}});
    }
    void finish(const std::string& path) {
        auto dt = std::chrono::steady_clock::now() - t0;
        j["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(dt).count();
        if (!path.empty()) write_text(path, j.dump(2) + "\n");
    }
};

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

std::vector<long> parse_long_list(const std::string& s) {
    std::vector<long> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stol(tok));
    return out;
}

const char* class_name(StepClass c) {
    switch (c) {
        case StepClass::Isolated: return "isolated";
        case StepClass::IsolatedFromBelow: return "isolated_from_below";
        case StepClass::AccumulatedFromBelow: return "accumulated_from_below";
        case StepClass::Unclassified: return "unclassified";
    }
    return "unclassified";
}

int run(int argc, char** argv) {
    CLI::App app{"holescope: bifurcation sets of piecewise-linear maps with a hole"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string map_name, out_path, manifest_path, format = "pgm", mode = "exact";
    std::string hole_a, hole_b, horizons_str, deltas_str = "1e-2,1e-3,1e-4";
    long resolution = 512, horizon = 1000, pmax = 0, nmax = 12;
    long pre_pmax = 0, pre_depth = 0;
    double eps_diag = 0.0, s0 = 2.0;
    int threads = 1;
    std::uint64_t seed = 0;
    bool stairs_only = false, jitter = true;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--threads", threads, "worker threads (results are thread-count independent)");
        c->add_option("--seed", seed, "seed for sampling-based checks")->default_val(0);
        c->add_option("--mode", mode, "exact|float")->check(CLI::IsMember({"exact", "float"}));
        c->add_option("--manifest", manifest_path, "write a reproducibility manifest (JSON)");
    };

    auto* render = app.add_subcommand("render", "rasterize the bifurcation set to PGM/PNG");
    render->add_option("--map", map_name, "builtin name or config path")->required();
    render->add_option("--resolution", resolution)->check(CLI::Range(16L, 1L << 16));
    render->add_option("--horizon", horizon)->check(CLI::PositiveNumber);
    render->add_option("--pmax", pmax, "overlay exact stairs up to this period");
    render->add_option("--pre-pmax", pre_pmax, "critical-cycle preimage overlay: period cap");
    render->add_option("--pre-depth", pre_depth, "critical-cycle preimage overlay: tree depth");
    render->add_option("--eps-diag", eps_diag, "diagonal exclusion width (default 1/resolution)");
    render->add_option("--out", out_path, "output image path");
    render->add_option("--format", format)->check(CLI::IsMember({"pgm", "png"}));
    render->add_flag("--stairs-only", stairs_only, "draw only the stair overlay");
    render->add_flag("!--no-jitter", jitter, "center sampling instead of jittered samples");
    add_common(render);

    auto* orbits_cmd = app.add_subcommand("orbits", "enumerate periodic orbits and stairs");
    orbits_cmd->add_option("--map", map_name)->required();
    orbits_cmd->add_option("--pmax", pmax)->default_val(5);
    orbits_cmd->add_option("--out", out_path, "CSV output path (default stdout)");
    add_common(orbits_cmd);

    auto* entropy_cmd = app.add_subcommand("entropy", "entropy estimate from periodic counts");
    entropy_cmd->add_option("--map", map_name)->required();
    entropy_cmd->add_option("--nmax", nmax)->check(CLI::PositiveNumber);
    entropy_cmd->add_option("--out", out_path, "CSV output path (default stdout)");
    add_common(entropy_cmd);

    auto* escape_cmd = app.add_subcommand("escape", "exact escape-rate series for one hole");
    escape_cmd->add_option("--map", map_name)->required();
    escape_cmd->add_option("--hole-a", hole_a, "hole left endpoint (exact scalar)")->required();
    escape_cmd->add_option("--hole-b", hole_b, "hole right endpoint (exact scalar)")->required();
    escape_cmd->add_option("--horizons", horizons_str, "comma-separated horizons")->required();
    escape_cmd->add_option("--out", out_path, "CSV output path (default stdout)");
    add_common(escape_cmd);

    auto* tent_cmd = app.add_subcommand("tent-scan", "continuity scan of the tent family at s0");
    tent_cmd->add_option("--s0", s0)->required();
    tent_cmd->add_option("--deltas", deltas_str, "comma-separated parameter offsets");
    tent_cmd->add_option("--resolution", resolution);
    tent_cmd->add_option("--horizon", horizon)->default_val(2000);
    tent_cmd->add_option("--pmax", pmax)->default_val(5);
    tent_cmd->add_option("--out", out_path, "CSV output path (default stdout)");
    add_common(tent_cmd);

    auto* verify_cmd = app.add_subcommand("verify", "structure-theorem checks on a raster");
    verify_cmd->add_option("--map", map_name)->required();
    verify_cmd->add_option("--resolution", resolution);
    verify_cmd->add_option("--horizon", horizon);
    verify_cmd->add_option("--pmax", pmax)->default_val(5);
    add_common(verify_cmd);

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand(render)) {
        auto f = builtin(map_name);
        RasterOptions opts;
        opts.sampling = jitter ? Sampling::Jitter : Sampling::Center;
        opts.stairs_pmax = pmax;
        opts.pre_pmax = pre_pmax;
        opts.pre_depth = pre_depth;
        opts.eps_diag = eps_diag;
        opts.threads = threads;
        auto r = rasterize(f, resolution, horizon, opts);
        if (stairs_only) {
            for (auto& c : r.cells) c &= BifRaster::kExcluded | BifRaster::kStair;
        }
        if (out_path.empty()) out_path = "bifset." + format;
        auto bytes = format == "png" ? raster_to_png(r) : raster_to_pgm(r);
        write_bytes(out_path, bytes);
        Manifest m("render", {{"map", map_name}, {"resolution", resolution}, {"horizon", horizon},
                              {"pmax", pmax}, {"format", format}, {"sampling", r.mode},
                              {"eps_diag", r.eps_diag}, {"seed", seed}},
                   r.mode);
        m.add_output(out_path, digest_bytes(bytes));
        m.finish(manifest_path);
        std::cout << "wrote " << out_path << " (" << bytes.size() << " bytes, " << r.mode
                  << " sampling)\n";
        return 0;
    }

    if (app.got_subcommand(orbits_cmd)) {
        auto f = builtin(map_name);
        std::string csv;
        if (f.exact_ok) {
            auto ss = stairs_from_orbits<Rat>(f, pmax);
            csv = orbits_to_csv(ss.orbits);
            csv += "stairs\nlength,steps,classes\n";
            for (const auto& st : ss.stairs) {
                std::string corners, classes;
                for (const auto& step : st.steps) {
                    corners += "(" + format_rat(step.a) + ";" + format_rat(step.b) + ") ";
                    classes += std::string(class_name(step.cls)) + " ";
                }
                csv += std::to_string(st.length) + "," + corners + "," + classes + "\n";
            }
        } else {
            auto ss = stairs_from_orbits<double>(f, pmax);
            csv = "period,points\n";
            for (const auto& o : ss.orbits) {
                csv += std::to_string(o.minimal_period) + ",";
                for (double p : o.points) csv += std::to_string(p) + " ";
                csv += "\n";
            }
        }
        if (out_path.empty())
            std::cout << csv;
        else
            write_text(out_path, csv);
        Manifest m("orbits", {{"map", map_name}, {"pmax", pmax}}, f.exact_ok ? "exact" : "float");
        if (!out_path.empty()) m.add_output(out_path, digest_text(csv));
        m.finish(manifest_path);
        return 0;
    }

    if (app.got_subcommand(entropy_cmd)) {
        auto f = builtin(map_name);
        auto e = entropy_estimate(f, nmax);
        std::string csv = "n,count,estimate\n";
        for (std::size_t i = 0; i < e.ns.size(); ++i)
            csv += std::to_string(e.ns[i]) + "," + e.counts[i].str() + "," +
                   std::to_string(e.estimates[i]) + "\n";
        csv += "# reported (max of last three): " + std::to_string(e.reported) + "\n";
        if (!e.expanding)
            csv += "# warning: map is not piecewise uniformly expanding; counts reported anyway\n";
        if (out_path.empty())
            std::cout << csv;
        else
            write_text(out_path, csv);
        Manifest m("entropy", {{"map", map_name}, {"nmax", nmax}}, "exact");
        if (!out_path.empty()) m.add_output(out_path, digest_text(csv));
        m.finish(manifest_path);
        return 0;
    }

    if (app.got_subcommand(escape_cmd)) {
        auto f = builtin(map_name);
        auto pa = parse_scalar(hole_a), pb = parse_scalar(hole_b);
        if (!pa.exact || !pb.exact)
            throw UsageError("escape: hole endpoints must be exact scalars");
        Hole h = make_hole(f.space, pa.r, pb.r);
        auto series = escape_rate(f, h, parse_long_list(horizons_str));
        std::string csv = series.to_csv();
        csv += "# fitted_rate (LSQ over tail half): " + std::to_string(series.fitted_rate) + "\n";
        if (out_path.empty())
            std::cout << csv;
        else
            write_text(out_path, csv);
        Manifest m("escape", {{"map", map_name}, {"a", hole_a}, {"b", hole_b}}, "exact");
        if (!out_path.empty()) m.add_output(out_path, digest_text(csv));
        m.finish(manifest_path);
        return 0;
    }

    if (app.got_subcommand(tent_cmd)) {
        auto rep = continuity_scan(s0, parse_double_list(deltas_str), resolution, horizon, pmax);
        std::string csv = rep.to_csv();
        if (rep.probe_applicable)
            csv += std::string("# probe rectangle near b=") + std::to_string(rep.probe_b) +
                   (rep.probe_empty ? ": empty below s0 (discontinuity mechanism present)\n"
                                    : ": not empty\n");
        if (out_path.empty())
            std::cout << csv;
        else
            write_text(out_path, csv);
        Manifest m("tent-scan", {{"s0", s0}, {"deltas", deltas_str}, {"resolution", resolution},
                                 {"horizon", horizon}},
                   "float");
        if (!out_path.empty()) m.add_output(out_path, digest_text(csv));
        m.finish(manifest_path);
        return 0;
    }

    if (app.got_subcommand(verify_cmd)) {
        auto f = builtin(map_name);
        RasterOptions opts;
        opts.sampling = Sampling::Jitter;
        opts.stairs_pmax = pmax;
        opts.threads = threads;
        auto r = rasterize(f, resolution, horizon, opts);
        TheoremAReport rep = f.exact_ok ? theorem_a_checks<Rat>(f, r, pmax)
                                        : theorem_a_checks<double>(f, r, pmax);
        bool sym = f.space == Space::Circle ? offdiag_symmetry_ok(r) : true;
        auto line = [](const char* name, bool ok) {
            std::cout << (ok ? "pass" : "FAIL") << "  " << name << "\n";
            return ok;
        };
        bool all = true;
        all &= line("nonempty", rep.nonempty);
        all &= line("empty-interior proxy (no 3x3 in-set block)", rep.no_full_block);
        all &= line("segments reach the diagonal band", rep.runs_reach_diagonal);
        all &= line("stair cells connected through links", rep.stairs_connected);
        all &= line("stair corners on in-set cells", rep.stairs_on_inset);
        if (f.space == Space::Circle)
            all &= line("off-diagonal symmetry (circle)", sym);
        std::cout << "in-set cells: " << rep.inset_cells << " (" << rep.inset_fraction * 100
                  << "% of valid cells), stairs: " << rep.stair_count << "\n"
                  << rep.notes << "\n";
        Manifest m("verify", {{"map", map_name}, {"resolution", resolution}, {"horizon", horizon},
                              {"pmax", pmax}},
                   r.mode);
        m.finish(manifest_path);
        return all ? 0 : 2;
    }

    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const AssertionError& e) {
        std::cerr << "assertion failed: " << e.what() << "\n";
        return 2;
    } catch (const BudgetError& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return 3;
    } catch (const ResourceCapError& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
