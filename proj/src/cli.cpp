#include "midstar/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "midstar/oracles.hpp"
#include "midstar/semiclassics.hpp"
#include "midstar/starprod.hpp"
#include "midstar/verify.hpp"

namespace midstar::cli {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

double parse_num(const std::string& s) {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw ValidationError("malformed number: " + s);
    return v;
}

Point parse_point(const Space& space, const std::string& s) {
    auto parts = split(s, ',');
    if (space.kind() == SpaceKind::Euclidean2) {
        if (parts.size() != 2) throw ValidationError("planar points need two coordinates: " + s);
        return Point::r2(parse_num(parts[0]), parse_num(parts[1]));
    }
    if (parts.size() != 3) throw ValidationError("embedded points need three coordinates: " + s);
    return make_point(space, {parse_num(parts[0]), parse_num(parts[1]), parse_num(parts[2])});
}

std::vector<Point> parse_points(const Space& space, const std::string& s, std::size_t count,
                                const char* what) {
    auto parts = split(s, ';');
    if (parts.size() != count)
        throw ValidationError(std::string("expected ") + std::to_string(count) + " " + what);
    std::vector<Point> pts;
    for (const auto& p : parts) pts.push_back(parse_point(space, p));
    return pts;
}

// Field grammar:
//   gaussian:<center>:<width>
//   poly:i,j,k,coef|i,j,k,coef|...:<center>:<width>
//   oscexp:q11,q12,q22:b1,b2:c:<center>:<width>     (quadratic phase, planar)
ScalarField parse_field(const Space& space, const std::string& s) {
    auto parts = split(s, ':');
    if (parts.empty()) throw ValidationError("empty field spec");
    const std::string& fam = parts[0];
    if (fam == "gaussian") {
        if (parts.size() != 3) throw ValidationError("gaussian:<center>:<width>");
        return ScalarField::gaussian_bump(parse_point(space, parts[1]), parse_num(parts[2]));
    }
    if (fam == "poly") {
        if (parts.size() != 4) throw ValidationError("poly:<terms>:<center>:<width>");
        EmbeddingPoly poly;
        for (const auto& term : split(parts[1], '|')) {
            auto f = split(term, ',');
            if (f.size() != 4) throw ValidationError("poly term needs i,j,k,coef: " + term);
            poly.terms.push_back({int(parse_num(f[0])), int(parse_num(f[1])),
                                  int(parse_num(f[2])), parse_num(f[3])});
        }
        return ScalarField::damped_polynomial(poly, parse_point(space, parts[2]),
                                              parse_num(parts[3]));
    }
    if (fam == "oscexp") {
        if (parts.size() != 6)
            throw ValidationError("oscexp:q11,q12,q22:b1,b2:c:<center>:<width>");
        if (space.kind() != SpaceKind::Euclidean2)
            throw ValidationError("oscexp fields are planar");
        auto qv = split(parts[1], ',');
        auto bv = split(parts[2], ',');
        if (qv.size() != 3 || bv.size() != 2) throw ValidationError("malformed oscexp spec");
        double q11 = parse_num(qv[0]), q12 = parse_num(qv[1]), q22 = parse_num(qv[2]);
        double b1 = parse_num(bv[0]), b2 = parse_num(bv[1]);
        double c = parse_num(parts[3]);
        auto phase = [q11, q12, q22, b1, b2, c](const Point& p) {
            double x = p.x.x, y = p.x.y;
            return 0.5 * (q11 * x * x + 2 * q12 * x * y + q22 * y * y) + b1 * x + b2 * y + c;
        };
        return ScalarField::oscillatory_exp(phase, space.hbar(), parse_point(space, parts[4]),
                                            parse_num(parts[5]));
    }
    throw ValidationError("unknown field family: " + fam);
}

GeneratingFunction parse_generating(const std::string& s) {
    auto parts = split(s, ':');
    if (parts.empty()) throw ValidationError("empty generating-function spec");
    if (parts[0] == "linear") {
        if (parts.size() != 2) throw ValidationError("linear:a1,a2");
        auto a = split(parts[1], ',');
        if (a.size() != 2) throw ValidationError("linear:a1,a2");
        return GeneratingFunction::linear({parse_num(a[0]), parse_num(a[1])});
    }
    if (parts[0] == "quadratic") {
        if (parts.size() != 4) throw ValidationError("quadratic:q11,q12,q22:b1,b2:c");
        auto qv = split(parts[1], ',');
        auto bv = split(parts[2], ',');
        if (qv.size() != 3 || bv.size() != 2) throw ValidationError("malformed quadratic spec");
        Mat<2> q{{{parse_num(qv[0]), parse_num(qv[1])}, {parse_num(qv[1]), parse_num(qv[2])}}};
        return GeneratingFunction::quadratic(q, {parse_num(bv[0]), parse_num(bv[1])},
                                             parse_num(parts[3]));
    }
    throw ValidationError("unknown generating-function form: " + parts[0]);
}

struct CommonOpts {
    std::string space_name = "r2";
    std::optional<double> hbar;
    std::string config_path;

    Space space() const {
        double hb = hbar.value_or(space_name == "s2" ? 0.5 : 1.0);
        if (space_name == "r2") return Space::euclidean(hb);
        if (space_name == "h2") return Space::hyperbolic(hb);
        if (space_name == "s2") return Space::sphere(hb);
        throw ValidationError("unknown space: " + space_name);
    }
};

struct QuadOpts {
    QuadratureSpec spec;
    int threads = 1;
};

void add_quad_options(CLI::App* cmd, QuadOpts& q) {
    cmd->add_option("--resolution", q.spec.resolution, "coarsest per-axis node count");
    cmd->add_option("--levels", q.spec.refinement_levels, "dyadic refinement levels");
    cmd->add_option("--radius", q.spec.truncation_radius, "truncation radius (geodesic units)");
    cmd->add_option("--collar", q.spec.collar, "midpoint-form collar on 1 - det^2");
    cmd->add_option("--threads", q.threads, "worker threads (result independent of the count)");
    double bound = 0.0;
    auto* opt = cmd->add_option("--max-refine-error", bound,
                                "fail with exit 3 when the refinement difference exceeds this");
    cmd->callback([&q, opt, &bound]() mutable {
        if (opt->count()) q.spec.max_refine_error = bound;
    });
}

std::ostream& open_sink(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw ValidationError("cannot open output file: " + path);
    return file;
}

// A single JSON config document; command-line flags override file values.
void apply_config(const std::string& path, CommonOpts& common, QuadOpts& quad, json& extra) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    json cfg = json::parse(in, nullptr, false);
    if (cfg.is_discarded()) throw ValidationError("config file is not valid JSON");
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        const std::string& key = it.key();
        if (key == "space") common.space_name = it.value().get<std::string>();
        else if (key == "hbar") common.hbar = it.value().get<double>();
        else if (key == "quadrature") {
            for (auto qt = it.value().begin(); qt != it.value().end(); ++qt) {
                if (qt.key() == "resolution") quad.spec.resolution = qt.value().get<int>();
                else if (qt.key() == "levels") quad.spec.refinement_levels = qt.value().get<int>();
                else if (qt.key() == "radius") quad.spec.truncation_radius = qt.value().get<double>();
                else if (qt.key() == "collar") quad.spec.collar = qt.value().get<double>();
                else if (qt.key() == "threads") quad.threads = qt.value().get<int>();
                else if (qt.key() == "max_refine_error")
                    quad.spec.max_refine_error = qt.value().get<double>();
                else throw ValidationError("unknown quadrature config key: " + qt.key());
            }
        } else if (key == "f1" || key == "f2" || key == "g1" || key == "g2" || key == "at" ||
                   key == "seed" || key == "out" || key == "suite" || key == "form") {
            extra[key] = it.value();
        } else {
            throw ValidationError("unknown config key: " + key);
        }
    }
}

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"midpoint-triangle star products on R^2, H^2 and S^2"};
    app.require_subcommand(1);

    CommonOpts common;
    QuadOpts quad;
    json extra;
    std::string f1_spec, f2_spec, g1_spec, g2_spec, at_spec, corners_spec, midpoints_spec;
    std::string out_path, suite = "all", form = "chord";
    std::uint64_t seed = 0;
    bool no_timing = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--space", common.space_name, "r2, h2 or s2");
        cmd->add_option("--hbar", common.hbar, "deformation parameter");
        cmd->add_option("--config", common.config_path, "JSON config file (flags override)");
    };

    auto* c_area = app.add_subcommand("area", "oriented triangle area from corners");
    add_common(c_area);
    c_area->add_option("--corners", corners_spec, "a;b;c")->required();

    auto* c_mid = app.add_subcommand("midpoints", "side midpoints of a corner triple");
    add_common(c_mid);
    c_mid->add_option("--corners", corners_spec, "a;b;c")->required();

    auto* c_cor = app.add_subcommand("corners", "corner recovery from side midpoints");
    add_common(c_cor);
    c_cor->add_option("--midpoints", midpoints_spec, "alpha;beta;gamma")->required();

    auto* c_amp = app.add_subcommand("amplitude", "amplitude density A(alpha, beta, gamma)");
    add_common(c_amp);
    c_amp->add_option("--midpoints", midpoints_spec, "alpha;beta;gamma")->required();

    auto* c_star = app.add_subcommand("star", "deformed product of two fields at a point");
    add_common(c_star);
    c_star->add_option("--f1", f1_spec, "first field spec");
    c_star->add_option("--f2", f2_spec, "second field spec");
    c_star->add_option("--at", at_spec, "evaluation point");
    c_star->add_option("--form", form, "chord (production) or midpoint (validation)");
    c_star->add_option("--out", out_path, "write the JSON result here instead of stdout");
    add_quad_options(c_star, quad);

    auto* c_comp = app.add_subcommand("compose", "stationary-phase composition of generating functions");
    add_common(c_comp);
    c_comp->add_option("--g1", g1_spec, "first generating function");
    c_comp->add_option("--g2", g2_spec, "second generating function");
    c_comp->add_option("--at", at_spec, "evaluation point");
    c_comp->add_option("--out", out_path, "write the JSON result here instead of stdout");

    auto* c_ver = app.add_subcommand("verify", "seeded invariant suites with a CSV report");
    add_common(c_ver);
    c_ver->add_option("--suite", suite, "geometry, triangles, oracles, starprod, semiclassics, all");
    c_ver->add_option("--seed", seed, "RNG seed");
    c_ver->add_option("--out", out_path, "CSV output path (default stdout)");

    auto* c_conv = app.add_subcommand("convergence", "per-level refinement study of the product");
    add_common(c_conv);
    c_conv->add_option("--f1", f1_spec, "first field spec");
    c_conv->add_option("--f2", f2_spec, "second field spec");
    c_conv->add_option("--at", at_spec, "evaluation point");
    c_conv->add_option("--form", form, "chord or midpoint");
    c_conv->add_option("--out", out_path, "CSV output path (default stdout)");
    c_conv->add_flag("--no-timing", no_timing, "zero the wall_ms column for byte-stable output");
    add_quad_options(c_conv, quad);

    app.parse(argc, const_cast<char**>(argv));

    if (!common.config_path.empty()) {
        CommonOpts file_common;
        QuadOpts file_quad;
        apply_config(common.config_path, file_common, file_quad, extra);
        // Flags override config values.
        auto keep = [](const CLI::App* cmd, const char* name) {
            return cmd->count(name) > 0;
        };
        CLI::App* active = app.get_subcommands().front();
        if (!keep(active, "--space")) common.space_name = file_common.space_name;
        if (!keep(active, "--hbar") && file_common.hbar) common.hbar = file_common.hbar;
        auto merge_quad = [&](const char* flag, auto& dst, const auto& src) {
            if (!active->get_option_no_throw(flag) || !keep(active, flag)) dst = src;
        };
        merge_quad("--resolution", quad.spec.resolution, file_quad.spec.resolution);
        merge_quad("--levels", quad.spec.refinement_levels, file_quad.spec.refinement_levels);
        merge_quad("--radius", quad.spec.truncation_radius, file_quad.spec.truncation_radius);
        merge_quad("--collar", quad.spec.collar, file_quad.spec.collar);
        merge_quad("--threads", quad.threads, file_quad.threads);
        if (file_quad.spec.max_refine_error && !quad.spec.max_refine_error)
            quad.spec.max_refine_error = file_quad.spec.max_refine_error;
        if (extra.contains("f1") && f1_spec.empty()) f1_spec = extra["f1"].get<std::string>();
        if (extra.contains("f2") && f2_spec.empty()) f2_spec = extra["f2"].get<std::string>();
        if (extra.contains("g1") && g1_spec.empty()) g1_spec = extra["g1"].get<std::string>();
        if (extra.contains("g2") && g2_spec.empty()) g2_spec = extra["g2"].get<std::string>();
        if (extra.contains("at") && at_spec.empty()) at_spec = extra["at"].get<std::string>();
        if (extra.contains("out") && out_path.empty()) out_path = extra["out"].get<std::string>();
        if (extra.contains("suite") && c_ver->count("--suite") == 0)
            suite = extra["suite"].get<std::string>();
        if (extra.contains("form") && form == "chord") form = extra["form"].get<std::string>();
        if (extra.contains("seed") && c_ver->count("--seed") == 0)
            seed = extra["seed"].get<std::uint64_t>();
    }

    Space space = common.space();

    if (c_area->parsed()) {
        auto pts = parse_points(space, corners_spec, 3, "corners");
        double a = area_from_corners(space, {pts[0], pts[1], pts[2]});
        std::cout << fmt(a) << "\n";
        return 0;
    }
    if (c_mid->parsed()) {
        auto pts = parse_points(space, corners_spec, 3, "corners");
        MidpointTriple m = midpoints_from_corners(space, {pts[0], pts[1], pts[2]});
        auto one = [&](const Point& p) {
            if (space.kind() == SpaceKind::Euclidean2) return fmt(p.x.x) + "," + fmt(p.x.y);
            return fmt(p.x.x) + "," + fmt(p.x.y) + "," + fmt(p.x.z);
        };
        std::cout << one(m.alpha) << ";" << one(m.beta) << ";" << one(m.gamma) << "\n";
        return 0;
    }
    if (c_cor->parsed()) {
        auto pts = parse_points(space, midpoints_spec, 3, "midpoints");
        CornerTriple t = corners_from_midpoints(space, {pts[0], pts[1], pts[2]});
        auto one = [&](const Point& p) {
            if (space.kind() == SpaceKind::Euclidean2) return fmt(p.x.x) + "," + fmt(p.x.y);
            return fmt(p.x.x) + "," + fmt(p.x.y) + "," + fmt(p.x.z);
        };
        std::cout << one(t.a) << ";" << one(t.b) << ";" << one(t.c) << "\n";
        return 0;
    }
    if (c_amp->parsed()) {
        auto pts = parse_points(space, midpoints_spec, 3, "midpoints");
        std::cout << fmt(amplitude(space, pts[0], pts[1], pts[2])) << "\n";
        return 0;
    }
    if (c_star->parsed() || c_conv->parsed()) {
        if (f1_spec.empty() || f2_spec.empty() || at_spec.empty())
            throw ValidationError("star needs --f1, --f2 and --at (flags or config)");
        ScalarField f1 = parse_field(space, f1_spec);
        ScalarField f2 = parse_field(space, f2_spec);
        Point at = parse_point(space, at_spec);
        if (form != "chord" && form != "midpoint")
            throw ValidationError("--form must be chord or midpoint");

        if (c_star->parsed()) {
            StarResult r = form == "chord"
                               ? star(space, f1, f2, at, quad.spec, quad.threads)
                               : star_midpoint_form(space, f1, f2, at, quad.spec, quad.threads);
            json out = {
                {"space", space_name(space.kind())},
                {"hbar", space.hbar()},
                {"m", space.kind() == SpaceKind::Euclidean2
                          ? json::array({at.x.x, at.x.y})
                          : json::array({at.x.x, at.x.y, at.x.z})},
                {"value", {{"re", r.value.real()}, {"im", r.value.imag()}}},
                {"refine_error", r.refine_error},
                {"samples", r.samples_used},
                {"spec",
                 {{"resolution", quad.spec.resolution},
                  {"levels", quad.spec.refinement_levels},
                  {"radius", quad.spec.truncation_radius},
                  {"collar", quad.spec.collar},
                  {"threads", quad.threads},
                  {"form", form}}},
            };
            std::ofstream file;
            open_sink(out_path, file) << out.dump(2) << "\n";
            return 0;
        }

        // convergence: one CSV row per refinement level.
        StarResult r = form == "chord"
                           ? star(space, f1, f2, at, quad.spec, quad.threads)
                           : star_midpoint_form(space, f1, f2, at, quad.spec, quad.threads);
        std::ofstream file;
        std::ostream& os = open_sink(out_path, file);
        os << "level,value_re,value_im,refine_error,samples,wall_ms\n";
        for (std::size_t level = 0; level < r.levels.size(); ++level) {
            const LevelSample& s = r.levels[level];
            double ref_err =
                level == 0 ? 0.0 : std::abs(s.value - r.levels[level - 1].value);
            double ms = no_timing ? 0.0 : s.wall_ms;
            os << level << "," << fmt(s.value.real()) << "," << fmt(s.value.imag()) << ","
               << fmt(ref_err) << "," << s.samples << "," << fmt(ms) << "\n";
        }
        return 0;
    }
    if (c_comp->parsed()) {
        if (g1_spec.empty() || g2_spec.empty() || at_spec.empty())
            throw ValidationError("compose needs --g1, --g2 and --at (flags or config)");
        GeneratingFunction g1 = parse_generating(g1_spec);
        GeneratingFunction g2 = parse_generating(g2_spec);
        Point at = parse_point(space, at_spec);
        ComposeResult r = compose(space, g1, g2, at);
        Complex est = stationary_phase_estimate(space, g1, g2, at, space.hbar());
        json out = {
            {"space", space_name(space.kind())},
            {"hbar", space.hbar()},
            {"value", r.value},
            {"stationary_m12", json::array({r.stationary_m12.x.x, r.stationary_m12.x.y})},
            {"stationary_m23", json::array({r.stationary_m23.x.x, r.stationary_m23.x.y})},
            {"hessian_signature", r.hessian_signature},
            {"iterations", r.iterations},
            {"estimate", {{"re", est.real()}, {"im", est.imag()}}},
        };
        std::ofstream file;
        open_sink(out_path, file) << out.dump(2) << "\n";
        return 0;
    }
    if (c_ver->parsed()) {
        auto rows = run_suite(suite, seed);
        std::ofstream file;
        std::ostream& os = open_sink(out_path, file);
        os << "suite,case_id,quantity,expected,got,abs_err,pass\n";
        int passed = 0;
        for (const auto& r : rows) {
            os << r.suite << "," << r.case_id << "," << r.quantity << "," << fmt(r.expected)
               << "," << fmt(r.got) << "," << fmt(r.abs_err) << "," << (r.pass ? 1 : 0) << "\n";
            if (r.pass) ++passed;
        }
        std::cerr << "passed " << passed << "/" << rows.size() << "\n";
        return passed == static_cast<int>(rows.size()) ? 0 : 1;
    }
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    try {
        return dispatch(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0;  // --help
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
            case ErrorCode::Validation:
            case ErrorCode::Quantization:
                return 2;
            case ErrorCode::NonConvergent:
                return 3;
            default:
                return 4;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace midstar::cli
