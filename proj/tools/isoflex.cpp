#include "isoflex/core.hpp"
#include "isoflex/errors.hpp"
#include "isoflex/flexion.hpp"
#include "isoflex/io.hpp"
#include "isoflex/koenigs.hpp"
#include "isoflex/quadnet.hpp"
#include "isoflex/smooth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace isoflex;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitGenerationError = 2;

struct Tolerances {
    double base = kDefaultTol;
    std::map<std::string, double> overrides;

    double get(const std::string& check) const {
        auto it = overrides.find(check);
        return it == overrides.end() ? base : it->second;
    }
};

Tolerances load_tolerances(double flag_tol, const std::string& config_path) {
    Tolerances t;
    t.base = flag_tol;
    if (const char* env = std::getenv("ISOFLEX_TOL")) t.base = std::atof(env);
    if (flag_tol != kDefaultTol) t.base = flag_tol;  // explicit flag wins over env
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ParseError("cannot open config " + config_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            t.overrides[line.substr(0, eq)] = std::atof(line.c_str() + eq + 1);
        }
    }
    return t;
}

json grid_to_json(const Grid<double>& g) {
    json rows = json::array();
    for (std::size_t i = 0; i < g.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < g.cols(); ++j) row.push_back(g.at(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

int cmd_generate(const std::string& kind, const std::string& params_path, double t,
                 const std::string& out_path) {
    try {
        QuadNet net;
        json meta;
        meta["generator"] = kind;
        meta["t"] = t;
        if (kind == "example2x2") {
            net = gen_example_2x2(t);
        } else {
            if (params_path.empty()) {
                std::cerr << "generate: --params required for kind " << kind << "\n";
                return kExitInputError;
            }
            DeformationFamily fam = read_family(params_path);
            fam.kind = (kind == "cone-cylinder") ? FamilyKind::ConeCylinder
                                                 : FamilyKind::GeneralizedT;
            net = fam.frame(t);
            meta["params"] = params_path;
        }
        write_net(out_path, net, meta);
        std::cout << "wrote " << out_path << " (" << net.m() << "x" << net.n() << " net)\n";
        return kExitOk;
    } catch (const ParseError& e) {
        std::cerr << "generate: " << e.what() << "\n";
        return kExitInputError;
    } catch (const Error& e) {
        std::cerr << "generate: " << e.what() << "\n";
        return kExitGenerationError;
    }
}

int cmd_check(const std::string& net_path, const Tolerances& tols, bool as_json) {
    NetFile f;
    try {
        f = read_net(net_path);
    } catch (const Error& e) {
        std::cerr << "check: " << e.what() << "\n";
        return kExitInputError;
    }
    const QuadNet& net = f.net;
    json out;
    out["file"] = net_path;
    out["m"] = net.m();
    out["n"] = net.n();
    out["tol"] = tols.base;

    const ValidationReport rep = validate(net, tols.get("planarity"));
    out["valid"] = rep.valid();
    out["dual_convex"] = rep.dual_convex;
    double worst_planarity = 0.0;
    for (double r : rep.face_planarity.flat()) worst_planarity = std::max(worst_planarity, r);
    out["max_planarity_residual"] = worst_planarity;
    if (!rep.valid()) {
        if (as_json)
            std::cout << out.dump(2) << "\n";
        else
            std::cerr << "check: net fails validation (planarity residual " << worst_planarity
                      << ")\n";
        return kExitInputError;
    }

    if (rep.dual_convex) {
        out["omega"] = grid_to_json(curvature_grid(net, tols.get("curvature")).omega);

        const QuadNet dual = metric_dual_net(net);
        const ChristoffelResult ch = christoffel_dual_net(dual);
        out["koenigs_residual"] = ch.residual;
        out["koenigs"] = ch.residual <= tols.get("koenigs");

        const MotionSpace ms = motion_space(net, tols.get("motion"));
        out["motion_dimension"] = ms.dimension;
        out["trivial_dimension"] = ms.trivial_dimension;
        out["infinitesimally_flexible"] = is_infinitesimally_flexible(ms);

        try {
            const Classification cls = classify(net, tols.get("classify"));
            out["classification"] = {{"class_i_rows", cls.class_i_rows},
                                     {"class_i_cols", cls.class_i_cols},
                                     {"class_i", cls.class_i()},
                                     {"class_ii", cls.class_ii},
                                     {"residual_i_rows", cls.residual_i_rows},
                                     {"residual_i_cols", cls.residual_i_cols},
                                     {"residual_ii", cls.residual_ii},
                                     {"parallel_face_pairs", cls.parallel_face_pairs}};
        } catch (const Error& e) {
            out["classification"] = {{"error", e.what()}};
        }
    }

    if (as_json) {
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "net " << net.m() << "x" << net.n() << ": valid"
                  << (rep.dual_convex ? ", dual-convex" : ", not dual-convex") << "\n";
        if (rep.dual_convex) {
            std::cout << "  koenigs residual (dual): " << out["koenigs_residual"]
                      << (out["koenigs"].get<bool>() ? "  [koenigs]" : "") << "\n";
            std::cout << "  motion space: dim " << out["motion_dimension"] << " vs trivial "
                      << out["trivial_dimension"]
                      << (out["infinitesimally_flexible"].get<bool>() ? "  [flexible]"
                                                                      : "  [rigid]")
                      << "\n";
            if (out.contains("classification") && !out["classification"].contains("error"))
                std::cout << "  finite classes: (i) "
                          << (out["classification"]["class_i"].get<bool>() ? "yes" : "no")
                          << ", (ii) "
                          << (out["classification"]["class_ii"].get<bool>() ? "yes" : "no")
                          << "\n";
            std::cout << "  curvature grid: " << out["omega"].dump() << "\n";
        }
    }
    return kExitOk;
}

int cmd_dual(const std::string& net_path, const std::string& out_path) {
    try {
        const NetFile f = read_net(net_path);
        const QuadNet dual = metric_dual_net(f.net);
        json meta;
        meta["derived"] = "metric-dual";
        meta["source"] = net_path;
        write_net(out_path, dual, meta);
        std::cout << "wrote " << out_path << "\n";
        return kExitOk;
    } catch (const ParseError& e) {
        std::cerr << "dual: " << e.what() << "\n";
        return kExitInputError;
    } catch (const Error& e) {
        std::cerr << "dual: " << e.what() << "\n";
        return kExitInputError;
    }
}

json vertex_grid_to_net_json(const VertexGrid& g, const json& meta) {
    std::vector<Point3> pts(g.flat().begin(), g.flat().end());
    QuadNet net(static_cast<int>(g.rows()) - 1, static_cast<int>(g.cols()) - 1, std::move(pts));
    return net_to_json(net, meta);
}

int cmd_reciprocal(const std::string& net_path, const std::string& out_path,
                   const Tolerances& tols) {
    try {
        const NetFile f = read_net(net_path);
        const ReciprocalResult rec = reciprocal_parallel(f.net, tols.get("koenigs"));
        json meta;
        meta["derived"] = "reciprocal-parallel";
        meta["christoffel_residual"] = rec.residual;
        meta["parallelism_defect"] = rec.parallelism_defect;
        std::ofstream out(out_path);
        out << vertex_grid_to_net_json(rec.c, meta).dump(2) << "\n";
        std::cout << "wrote " << out_path << " (parallelism defect " << rec.parallelism_defect
                  << ")\n";
        return kExitOk;
    } catch (const ParseError& e) {
        std::cerr << "reciprocal: " << e.what() << "\n";
        return kExitInputError;
    } catch (const Error& e) {
        std::cerr << "reciprocal: " << e.what() << "\n";
        return kExitInputError;
    }
}

int cmd_christoffel(const std::string& net_path, const std::string& out_path,
                    const Tolerances& tols) {
    try {
        const NetFile f = read_net(net_path);
        const ChristoffelResult ch = christoffel_dual_net(f.net);
        json meta;
        meta["derived"] = "christoffel-dual";
        meta["residual"] = ch.residual;
        meta["koenigs"] = ch.residual <= tols.get("koenigs");
        std::ofstream out(out_path);
        out << vertex_grid_to_net_json(ch.dual, meta).dump(2) << "\n";
        std::cout << "wrote " << out_path << " (residual " << ch.residual
                  << (ch.residual > tols.get("koenigs") ? ", above tolerance — not a Koenigs net"
                                                        : "")
                  << ")\n";
        return kExitOk;
    } catch (const ParseError& e) {
        std::cerr << "christoffel: " << e.what() << "\n";
        return kExitInputError;
    } catch (const Error& e) {
        std::cerr << "christoffel: " << e.what() << "\n";
        return kExitInputError;
    }
}

int cmd_deform(const std::string& family_path, double t0, double t1, int frames,
               const std::string& outdir, bool parallel) {
    DeformationFamily fam;
    try {
        fam = read_family(family_path);
    } catch (const Error& e) {
        std::cerr << "deform: " << e.what() << "\n";
        return kExitInputError;
    }
    try {
        fs::create_directories(outdir);
        if (frames < 2) frames = 2;

        std::vector<double> ts(frames);
        for (int i = 0; i < frames; ++i) ts[i] = t0 + (t1 - t0) * i / (frames - 1);

        // Evaluate all frames (concurrently with --parallel), then truncate
        // the sequence at the first invalid parameter.
        std::vector<std::optional<QuadNet>> slots(frames);
        auto eval_frame = [&](int i) {
            try {
                QuadNet net = fam.frame(ts[i]);
                if (validate(net, 1e-7).valid()) slots[i] = std::move(net);
            } catch (const Error&) {
            }
        };
        if (parallel) {
            std::vector<std::thread> workers;
            for (int i = 0; i < frames; ++i) workers.emplace_back(eval_frame, i);
            for (auto& w : workers) w.join();
        } else {
            for (int i = 0; i < frames; ++i) eval_frame(i);
        }
        std::vector<QuadNet> nets;
        bool truncated = false;
        double invalid_t = 0.0;
        for (int i = 0; i < frames; ++i) {
            if (!slots[i]) {
                truncated = true;
                invalid_t = ts[i];
                break;
            }
            nets.push_back(std::move(*slots[i]));
        }
        if (nets.empty()) {
            std::cerr << "deform: no valid frames on [" << t0 << ", " << t1 << "]\n";
            return kExitGenerationError;
        }
        ts.resize(nets.size());

        auto write_frame = [&](int i) {
            char name[32];
            std::snprintf(name, sizeof(name), "frame_%04d.obj", i);
            write_obj((fs::path(outdir) / name).string(), nets[i]);
        };
        if (parallel) {
            std::vector<std::thread> workers;
            for (int i = 0; i < static_cast<int>(nets.size()); ++i)
                workers.emplace_back(write_frame, i);
            for (auto& w : workers) w.join();
        } else {
            for (int i = 0; i < static_cast<int>(nets.size()); ++i) write_frame(i);
        }

        json manifest;
        manifest["family"] = family_to_json(fam);
        manifest["truncated"] = truncated;
        if (truncated) manifest["first_invalid_t"] = invalid_t;
        json frame_list = json::array();
        for (int i = 0; i < static_cast<int>(nets.size()); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "frame_%04d.obj", i);
            json fr;
            fr["t"] = ts[i];
            fr["file"] = name;
            fr["omega"] = grid_to_json(curvature_grid(nets[i]).omega);
            frame_list.push_back(std::move(fr));
        }
        manifest["frames"] = std::move(frame_list);
        std::ofstream mf(fs::path(outdir) / "manifest.json");
        mf << manifest.dump(2) << "\n";

        std::cout << "wrote " << nets.size() << " frames to " << outdir;
        if (truncated) std::cout << " (truncated at t = " << invalid_t << ")";
        std::cout << "\n";
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "deform: " << e.what() << "\n";
        return kExitGenerationError;
    }
}

int cmd_extend(const std::string& lnet_path, const std::string& cls,
               const std::string& out_path, const Tolerances& tols) {
    try {
        const WideLShapedNet l = read_lnet(lnet_path);
        const LClass which = (cls == "ii") ? LClass::ClassII : LClass::ClassI;
        const LExtensionResult res = extend_L_shaped(l, which, tols.get("extend"));
        json meta;
        meta["derived"] = "l-extension";
        meta["class"] = cls;
        meta["newton_iterations_max"] = res.newton_iterations_max;
        write_net(out_path, res.net, meta);
        std::cout << "wrote " << out_path << "\n";
        return kExitOk;
    } catch (const ParseError& e) {
        std::cerr << "extend: " << e.what() << "\n";
        return kExitInputError;
    } catch (const Error& e) {
        std::cerr << "extend: " << e.what() << "\n";
        return kExitGenerationError;
    }
}

int cmd_smooth_sample(const std::string& a_path, const std::string& b_path,
                      const std::string& sigma_path, const std::string& surface, double t,
                      std::vector<double> domain, int mu, int nv, const std::string& out_path) {
    try {
        const CurveSamples as = read_curve_csv(a_path);
        const CurveSamples bs = read_curve_csv(b_path);
        const CurveSamples ss = read_curve_csv(sigma_path);
        if (as.columns != 3 || bs.columns != 3 || ss.columns != 1)
            throw ParseError("smooth-sample: a and b need x,y,z rows; sigma needs scalar rows");
        std::vector<Vec3> apts, bpts;
        for (const auto& v : as.values) apts.push_back({v[0], v[1], v[2]});
        for (const auto& v : bs.values) bpts.push_back({v[0], v[1], v[2]});
        std::vector<double> svals;
        for (const auto& v : ss.values) svals.push_back(v[0]);

        Domain2 dom;
        if (domain.size() == 4) {
            dom = {domain[0], domain[1], domain[2], domain[3]};
        } else {
            dom = {as.params.front(), as.params.back(), bs.params.front(), bs.params.back()};
        }
        SurfacePatch patch(SpaceCurve::spline(as.params, apts),
                           SpaceCurve::spline(bs.params, bpts),
                           ScalarCurve::spline(ss.params, svals), dom);

        std::function<Vec3(double, double)> f;
        if (surface == "t-surface") {
            f = [&](double u, double v) { return deform_T_surface(patch, u, v, t); };
        } else {
            f = [&](double u, double v) {
                return t == 0.0 ? eval_scale_translational(patch, u, v)
                                : deform_scale_translational(patch, u, v, t);
            };
        }
        const SampleResult res = sample_to_quadnet(f, dom, mu, nv);
        json meta;
        meta["derived"] = "smooth-sample";
        meta["surface"] = surface;
        meta["t"] = t;
        meta["max_planarization_displacement"] = res.max_displacement;
        meta["spline_sources"] = {{"a", a_path}, {"b", b_path}, {"sigma", sigma_path}};
        write_net(out_path, res.net, meta);
        std::cout << "wrote " << out_path << " (max displacement " << res.max_displacement
                  << ")\n";
        return kExitOk;
    } catch (const ParseError& e) {
        std::cerr << "smooth-sample: " << e.what() << "\n";
        return kExitInputError;
    } catch (const Error& e) {
        std::cerr << "smooth-sample: " << e.what() << "\n";
        return kExitGenerationError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"isoflex — flexible quad nets in isotropic 3-space"};
    app.require_subcommand(1);

    double tol = kDefaultTol;
    std::string config;
    bool as_json = false;
    app.add_option("--tol", tol, "default tolerance for all checks");
    app.add_option("--config", config, "key=value file with per-check tolerance overrides");
    app.add_flag("--json", as_json, "emit reports as JSON");

    auto* gen = app.add_subcommand("generate", "generate a net from a closed-form family");
    std::string kind = "example2x2", params, out = "net.json";
    double t = 0.0;
    gen->add_option("--kind", kind, "example2x2 | cone-cylinder | generalized-t");
    gen->add_option("--params", params, "family JSON with a, b, sigma");
    gen->add_option("--t", t, "deformation parameter");
    gen->add_option("--out", out, "output net file")->required();

    auto* chk = app.add_subcommand("check", "validate, classify and analyze a net");
    std::string chk_net;
    chk->add_option("net", chk_net, "net JSON file")->required();

    auto* dua = app.add_subcommand("dual", "metric dual net");
    std::string dua_net, dua_out = "dual.json";
    dua->add_option("net", dua_net)->required();
    dua->add_option("--out", dua_out)->required();

    auto* rec = app.add_subcommand("reciprocal", "reciprocal-parallel net");
    std::string rec_net, rec_out = "reciprocal.json";
    rec->add_option("net", rec_net)->required();
    rec->add_option("--out", rec_out)->required();

    auto* chr = app.add_subcommand("christoffel", "Christoffel dual with residual");
    std::string chr_net, chr_out = "christoffel.json";
    chr->add_option("net", chr_net)->required();
    chr->add_option("--out", chr_out)->required();

    auto* def = app.add_subcommand("deform", "export deformation frames as OBJ + manifest");
    std::string def_family, def_outdir = "frames";
    double def_t0 = 0.0, def_t1 = 1.0;
    int def_frames = 5;
    bool def_parallel = false;
    def->add_option("--family", def_family)->required();
    def->add_option("--t0", def_t0);
    def->add_option("--t1", def_t1);
    def->add_option("--frames", def_frames);
    def->add_option("--outdir", def_outdir)->required();
    def->add_flag("--parallel", def_parallel, "evaluate frames concurrently");

    auto* ext = app.add_subcommand("extend", "complete a wide L-shaped net");
    std::string ext_lnet, ext_class = "i", ext_out = "extended.json";
    ext->add_option("lnet", ext_lnet, "L-shaped net JSON (null at uncovered slots)")->required();
    ext->add_option("--class", ext_class, "i | ii");
    ext->add_option("--out", ext_out)->required();

    auto* smp = app.add_subcommand("smooth-sample", "sample a smooth surface to a net");
    std::string smp_a, smp_b, smp_sigma, smp_surface = "scale-translational",
                                         smp_out = "sampled.json";
    double smp_t = 0.0;
    std::vector<double> smp_domain;
    std::vector<int> smp_grid = {8, 8};
    smp->add_option("--a", smp_a, "curve CSV param,x,y,z")->required();
    smp->add_option("--b", smp_b, "curve CSV param,x,y,z")->required();
    smp->add_option("--sigma", smp_sigma, "scalar curve CSV param,s")->required();
    smp->add_option("--surface", smp_surface, "scale-translational | t-surface");
    smp->add_option("--t", smp_t);
    smp->add_option("--domain", smp_domain, "u0,u1,v0,v1")->expected(4);
    smp->add_option("--grid", smp_grid, "MU NV face counts")->expected(2);
    smp->add_option("--out", smp_out)->required();

    for (CLI::App* sub : {gen, chk, dua, rec, chr, def, ext, smp}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    Tolerances tols;
    try {
        tols = load_tolerances(tol, config);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kExitInputError;
    }

    if (gen->parsed()) return cmd_generate(kind, params, t, out);
    if (chk->parsed()) return cmd_check(chk_net, tols, as_json);
    if (dua->parsed()) return cmd_dual(dua_net, dua_out);
    if (rec->parsed()) return cmd_reciprocal(rec_net, rec_out, tols);
    if (chr->parsed()) return cmd_christoffel(chr_net, chr_out, tols);
    if (def->parsed())
        return cmd_deform(def_family, def_t0, def_t1, def_frames, def_outdir, def_parallel);
    if (ext->parsed()) return cmd_extend(ext_lnet, ext_class, ext_out, tols);
    if (smp->parsed())
        return cmd_smooth_sample(smp_a, smp_b, smp_sigma, smp_surface, smp_t, smp_domain,
                                 smp_grid[0], smp_grid[1], smp_out);
    return kExitOk;
}
