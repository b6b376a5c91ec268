#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gvfan/algebra.hpp"
#include "gvfan/cache.hpp"
#include "gvfan/geometry.hpp"
#include "gvfan/io.hpp"
#include "gvfan/quiver.hpp"
#include "gvfan/scatter.hpp"
#include "gvfan/seeds.hpp"
#include "json.hpp"

using namespace gvfan;
using nlohmann::json;

namespace {

struct Ctx {
    uint64_t seed = 0;
    int threads = 1;
    std::string cache_dir, output, format = "json";
    bool verify_cache = false;
};

// the output path is not embedded: where a report lands must not change its bytes
json base_config(const Ctx& ctx) {
    return json{{"seed", ctx.seed},
                {"threads", ctx.threads},
                {"cache_dir", ctx.cache_dir},
                {"verify_cache", ctx.verify_cache},
                {"format", ctx.format}};
}

void emit(const Ctx& ctx, const std::string& command, const json& config, const json& result) {
    json report{{"version", kVersion}, {"command", command}, {"config", config}, {"result", result}};
    std::string bytes = report.dump(2) + "\n";
    if (ctx.output.empty())
        std::cout << bytes;
    else
        atomic_write_file(ctx.output, bytes);
}

// cached layer over enumerate_seeds; --verify-cache recomputes and compares bytes
SeedSet seeds_with_cache(const Ctx& ctx, const ExchangeMatrix& B, int depth, size_t max_seeds) {
    if (ctx.cache_dir.empty()) return enumerate_seeds(B, depth, max_seeds);
    std::string key =
        cache_key(B, "seeds|depth=" + std::to_string(depth) + "|max=" + std::to_string(max_seeds));
    if (auto hit = cache_load(ctx.cache_dir, key)) {
        if (ctx.verify_cache && seedset_to_json(enumerate_seeds(B, depth, max_seeds)) != *hit)
            throw std::runtime_error("cache verification failed: stale or corrupt entry " + key);
        return parse_seedset(*hit);
    }
    SeedSet s = enumerate_seeds(B, depth, max_seeds);
    cache_store(ctx.cache_dir, key, seedset_to_json(s));
    return s;
}

MutationClassReport class_with_cache(const Ctx& ctx, const ExchangeMatrix& B, size_t max_nodes) {
    if (ctx.cache_dir.empty()) return mutation_class(B, max_nodes);
    std::string key = cache_key(B, "class|max=" + std::to_string(max_nodes));
    if (auto hit = cache_load(ctx.cache_dir, key)) {
        if (ctx.verify_cache && class_report_to_json(mutation_class(B, max_nodes)) != *hit)
            throw std::runtime_error("cache verification failed: stale or corrupt entry " + key);
        return parse_class_report(*hit);
    }
    MutationClassReport r = mutation_class(B, max_nodes);
    cache_store(ctx.cache_dir, key, class_report_to_json(r));
    return r;
}

Sampler pick_sampler(const std::string& name, int n) {
    if (name != "auto") return sampler_from_string(name);
    return n == 2 ? Sampler::grid : n == 3 ? Sampler::fibonacci : Sampler::halton;
}

IntVec parse_g_flag(const std::string& text) {
    try {
        return parse_int_vector(text);
    } catch (const std::invalid_argument& e) {
        throw CLI::ValidationError("--g", e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    Ctx ctx;
    CLI::App app{"exact g-vector fans, mutation classes, two-term complexes, and rank-2 scattering diagrams"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", ctx.seed, "master seed for all randomized subroutines");
    app.add_option("--threads", ctx.threads, "worker threads for coverage sampling")->check(CLI::PositiveNumber);
    app.add_option("--cache-dir", ctx.cache_dir, "directory for cached seed sets and mutation classes");
    app.add_option("--output", ctx.output, "write the report here instead of stdout (atomic)");
    app.add_option("--format", ctx.format, "report format")->check(CLI::IsMember({"json"}));
    app.add_flag("--verify-cache", ctx.verify_cache, "recompute on cache hits and require byte-identical bytes");

    // --- mutate ---
    auto* mutate = app.add_subcommand("mutate", "mutate a quiver at a sequence of vertices");
    mutate->fallthrough();
    std::string mutate_quiver_file;
    std::vector<int> mutate_at;
    mutate->add_option("--quiver", mutate_quiver_file, "quiver file")->required()->check(CLI::ExistingFile);
    mutate->add_option("--at", mutate_at, "vertex to mutate at, repeatable, applied left to right")->required();
    mutate->callback([&]() {
        ExchangeMatrix B = read_quiver_file(mutate_quiver_file);
        for (int k : mutate_at) {
            if (k < 0 || k >= B.n) throw std::invalid_argument("mutation vertex out of range: " + std::to_string(k));
            B = mutate_quiver(B, k);
        }
        json cfg = base_config(ctx);
        cfg["quiver"] = mutate_quiver_file;
        cfg["at"] = mutate_at;
        emit(ctx, "mutate", cfg, json::parse(quiver_to_json(B)));
    });

    // --- class ---
    auto* cls = app.add_subcommand("class", "explore the mutation class of a quiver");
    cls->fallthrough();
    std::string cls_quiver_file;
    size_t cls_max_nodes = 100000;
    cls->add_option("--quiver", cls_quiver_file, "quiver file")->required()->check(CLI::ExistingFile);
    cls->add_option("--max-nodes", cls_max_nodes, "BFS node budget")->check(CLI::PositiveNumber);
    cls->callback([&]() {
        ExchangeMatrix B = read_quiver_file(cls_quiver_file);
        MutationClassReport r = class_with_cache(ctx, B, cls_max_nodes);
        json cfg = base_config(ctx);
        cfg["quiver"] = cls_quiver_file;
        cfg["max_nodes"] = cls_max_nodes;
        emit(ctx, "class", cfg, json::parse(class_report_to_json(r)));
    });

    // --- classify ---
    auto* clf = app.add_subcommand("classify", "name the mutation class when it matches a known family");
    clf->fallthrough();
    std::string clf_quiver_file;
    size_t clf_max_nodes = 100000;
    clf->add_option("--quiver", clf_quiver_file, "quiver file")->required()->check(CLI::ExistingFile);
    clf->add_option("--max-nodes", clf_max_nodes, "BFS node budget")->check(CLI::PositiveNumber);
    clf->callback([&]() {
        ExchangeMatrix B = read_quiver_file(clf_quiver_file);
        json cfg = base_config(ctx);
        cfg["quiver"] = clf_quiver_file;
        cfg["max_nodes"] = clf_max_nodes;
        emit(ctx, "classify", cfg, json{{"label", classify(B, clf_max_nodes)}});
    });

    // --- fan ---
    auto* fan = app.add_subcommand("fan", "enumerate seeds and assemble the g-vector fan");
    fan->fallthrough();
    std::string fan_quiver_file, fan_sampler = "auto";
    int fan_depth = 0;
    size_t fan_max_seeds = 1000000, fan_samples = 10000, fan_validate_pairs = 20000;
    fan->add_option("--quiver", fan_quiver_file, "quiver file")->required()->check(CLI::ExistingFile);
    fan->add_option("--depth", fan_depth, "BFS radius")->required()->check(CLI::NonNegativeNumber);
    fan->add_option("--max-seeds", fan_max_seeds, "seed budget")->check(CLI::PositiveNumber);
    fan->add_option("--samples", fan_samples, "coverage sample count")->check(CLI::PositiveNumber);
    fan->add_option("--sampler", fan_sampler)->check(CLI::IsMember({"auto", "grid", "fibonacci", "halton"}));
    fan->add_option("--validate-pairs", fan_validate_pairs, "cap on pairwise fan validity checks");
    fan->callback([&]() {
        ExchangeMatrix B = read_quiver_file(fan_quiver_file);
        SeedSet s = seeds_with_cache(ctx, B, fan_depth, fan_max_seeds);
        Fan f = fan_from_seeds(s);
        FanValidity v = fan_is_valid(f, fan_validate_pairs);
        CoverageReport cov = coverage(f, fan_samples, pick_sampler(fan_sampler, f.ambient_dim), ctx.threads);
        cov.halfspace_normal = halfspace_detect(f);
        json cfg = base_config(ctx);
        cfg["quiver"] = fan_quiver_file;
        cfg["depth"] = fan_depth;
        cfg["max_seeds"] = fan_max_seeds;
        cfg["samples"] = fan_samples;
        cfg["sampler"] = fan_sampler;
        cfg["validate_pairs"] = fan_validate_pairs;
        json result{{"seed_count", s.seeds.size()},
                    {"complete", s.complete},
                    {"fan", json::parse(fan_to_json(f))},
                    {"rays", fan_rays(f)},
                    {"validity", json{{"valid", v.valid}, {"reason", v.reason}}},
                    {"coverage", json::parse(coverage_to_json(cov))}};
        emit(ctx, "fan", cfg, result);
    });

    // --- density ---
    auto* density = app.add_subcommand("density", "coverage fraction of the fan at a depth");
    density->fallthrough();
    std::string den_quiver_file, den_sampler = "auto";
    int den_depth = 0;
    size_t den_max_seeds = 1000000, den_samples = 0;
    density->add_option("--quiver", den_quiver_file, "quiver file")->required()->check(CLI::ExistingFile);
    density->add_option("--depth", den_depth, "BFS radius")->required()->check(CLI::NonNegativeNumber);
    density->add_option("--samples", den_samples, "sample count")->required()->check(CLI::PositiveNumber);
    density->add_option("--sampler", den_sampler)->check(CLI::IsMember({"auto", "grid", "fibonacci", "halton"}));
    density->add_option("--max-seeds", den_max_seeds, "seed budget")->check(CLI::PositiveNumber);
    density->callback([&]() {
        ExchangeMatrix B = read_quiver_file(den_quiver_file);
        SeedSet s = seeds_with_cache(ctx, B, den_depth, den_max_seeds);
        Fan f = fan_from_seeds(s);
        CoverageReport cov = coverage(f, den_samples, pick_sampler(den_sampler, f.ambient_dim), ctx.threads);
        json cfg = base_config(ctx);
        cfg["quiver"] = den_quiver_file;
        cfg["depth"] = den_depth;
        cfg["samples"] = den_samples;
        cfg["sampler"] = den_sampler;
        cfg["max_seeds"] = den_max_seeds;
        json result{{"seed_count", s.seeds.size()},
                    {"complete", s.complete},
                    {"cone_count", f.cones.size()},
                    {"ray_count", fan_rays(f).size()},
                    {"coverage", json::parse(coverage_to_json(cov))}};
        emit(ctx, "density", cfg, result);
    });

    // --- halfspace ---
    auto* half = app.add_subcommand("halfspace", "closed half-space containing every enumerated ray");
    half->fallthrough();
    std::string half_quiver_file;
    int half_depth = 0;
    size_t half_max_seeds = 1000000;
    half->add_option("--quiver", half_quiver_file, "quiver file")->required()->check(CLI::ExistingFile);
    half->add_option("--depth", half_depth, "BFS radius")->required()->check(CLI::NonNegativeNumber);
    half->add_option("--max-seeds", half_max_seeds, "seed budget")->check(CLI::PositiveNumber);
    half->callback([&]() {
        ExchangeMatrix B = read_quiver_file(half_quiver_file);
        SeedSet s = seeds_with_cache(ctx, B, half_depth, half_max_seeds);
        Fan f = fan_from_seeds(s);
        auto normal = halfspace_detect(f);
        json cfg = base_config(ctx);
        cfg["quiver"] = half_quiver_file;
        cfg["depth"] = half_depth;
        cfg["max_seeds"] = half_max_seeds;
        json result{{"found", normal.has_value()}, {"normal", normal ? json(*normal) : json(nullptr)},
                    {"ray_count", fan_rays(f).size()}};
        emit(ctx, "halfspace", cfg, result);
    });

    // --- alg ---
    auto* alg = app.add_subcommand("alg", "two-term complexes over a truncated path algebra");
    alg->require_subcommand(1);
    alg->fallthrough();

    auto* hom = alg->add_subcommand("hom", "Hom dimensions between two complexes at shifts 0 and 1");
    hom->fallthrough();
    std::string hom_alg_file, hom_x_file, hom_y_file;
    hom->add_option("--algebra", hom_alg_file)->required()->check(CLI::ExistingFile);
    hom->add_option("--x", hom_x_file)->required()->check(CLI::ExistingFile);
    hom->add_option("--y", hom_y_file)->required()->check(CLI::ExistingFile);
    hom->callback([&]() {
        Algebra a = make_algebra(read_algebra_file(hom_alg_file));
        TwoTermComplex x = read_complex_file(a, hom_x_file), y = read_complex_file(a, hom_y_file);
        json spaces = json::array();
        for (int shift : {0, 1}) {
            HomSpace h = hom_complexes(a, x, y, shift);
            spaces.push_back(json{{"shift", shift}, {"space_dim", h.space_dim}, {"dim", h.quotient_dim}});
        }
        json cfg = base_config(ctx);
        cfg["algebra"] = hom_alg_file;
        cfg["x"] = hom_x_file;
        cfg["y"] = hom_y_file;
        emit(ctx, "alg hom", cfg, json{{"g_x", g_vector(x)}, {"g_y", g_vector(y)}, {"hom", spaces}});
    });

    auto* presilt = alg->add_subcommand("presilt", "presilting test for a complex");
    presilt->fallthrough();
    std::string ps_alg_file, ps_x_file;
    presilt->add_option("--algebra", ps_alg_file)->required()->check(CLI::ExistingFile);
    presilt->add_option("--x", ps_x_file)->required()->check(CLI::ExistingFile);
    presilt->callback([&]() {
        Algebra a = make_algebra(read_algebra_file(ps_alg_file));
        TwoTermComplex x = read_complex_file(a, ps_x_file);
        json cfg = base_config(ctx);
        cfg["algebra"] = ps_alg_file;
        cfg["x"] = ps_x_file;
        emit(ctx, "alg presilt", cfg, json{{"presilting", is_presilting(a, x)}, {"g", g_vector(x)}});
    });

    auto* cyl = alg->add_subcommand("cyl", "iterated cylinder of a complex along another");
    cyl->fallthrough();
    std::string cyl_alg_file, cyl_u_file, cyl_h_file;
    int cyl_power = 1;
    cyl->add_option("--algebra", cyl_alg_file)->required()->check(CLI::ExistingFile);
    cyl->add_option("--u", cyl_u_file)->required()->check(CLI::ExistingFile);
    cyl->add_option("--along", cyl_h_file, "the complex H glued in at each step")->required()->check(CLI::ExistingFile);
    cyl->add_option("--power", cyl_power, "number of cylinder steps")->check(CLI::NonNegativeNumber);
    cyl->callback([&]() {
        Algebra a = make_algebra(read_algebra_file(cyl_alg_file));
        TwoTermComplex u = read_complex_file(a, cyl_u_file), h = read_complex_file(a, cyl_h_file);
        TwoTermComplex x = u;
        for (int i = 0; i < cyl_power; ++i) x = cylinder(a, x, h);
        json cfg = base_config(ctx);
        cfg["algebra"] = cyl_alg_file;
        cfg["u"] = cyl_u_file;
        cfg["h"] = cyl_h_file;
        cfg["power"] = cyl_power;
        emit(ctx, "alg cyl", cfg, json{{"g", g_vector(x)}, {"complex", json::parse(complex_to_json(a, x))}});
    });

    auto* gdec = alg->add_subcommand("gdecomp", "generic decomposition of a g-vector");
    gdec->fallthrough();
    std::string gd_alg_file, gd_g;
    size_t gd_trials = 5;
    long long gd_range = 10;
    gdec->add_option("--algebra", gd_alg_file)->required()->check(CLI::ExistingFile);
    gdec->add_option("--g", gd_g, "g-vector, comma separated")->required();
    gdec->add_option("--trials", gd_trials, "independent samples")->check(CLI::PositiveNumber);
    gdec->add_option("--coeff-range", gd_range, "coefficient range for random complexes")->check(CLI::PositiveNumber);
    gdec->callback([&]() {
        IntVec g = parse_g_flag(gd_g);
        Algebra a = make_algebra(read_algebra_file(gd_alg_file));
        if ((int)g.size() != a.pres.vertices) throw std::invalid_argument("--g length must match the vertex count");
        SplitRng rng(ctx.seed);
        GenericDecomposition d = generic_decomposition(a, g, gd_trials, gd_range, rng);
        json cfg = base_config(ctx);
        cfg["algebra"] = gd_alg_file;
        cfg["g"] = gd_g;
        cfg["trials"] = gd_trials;
        cfg["coeff_range"] = gd_range;
        emit(ctx, "alg gdecomp", cfg, json::parse(gdecomp_to_json(d)));
    });

    // --- scatter ---
    auto* scatter = app.add_subcommand("scatter", "rank-2 scattering diagrams in log coordinates");
    scatter->require_subcommand(1);
    scatter->fallthrough();

    auto* complete = scatter->add_subcommand("complete", "consistent completion of the initial walls");
    complete->fallthrough();
    std::string comp_form_file;
    int comp_order = 0;
    complete->add_option("--form", comp_form_file, "form matrix or quiver file")->required()->check(CLI::ExistingFile);
    complete->add_option("--order", comp_order, "truncation order")->required()->check(CLI::Range(1, 12));
    complete->callback([&]() {
        ScatterLattice l = make_lattice(read_form_file(comp_form_file));
        auto walls = complete_rank2(l, comp_order);
        json cfg = base_config(ctx);
        cfg["form"] = comp_form_file;
        cfg["order"] = comp_order;
        emit(ctx, "scatter complete", cfg, json{{"walls", json::parse(walls_to_json(walls))}});
    });

    auto* attach = scatter->add_subcommand("attach", "dilog wall functions on the facets of a fan");
    attach->fallthrough();
    std::string att_fan_file, att_form_file;
    int att_order = 0;
    attach->add_option("--fan", att_fan_file, "fan file")->required()->check(CLI::ExistingFile);
    attach->add_option("--form", att_form_file, "form matrix or quiver file")->required()->check(CLI::ExistingFile);
    attach->add_option("--order", att_order, "truncation order")->required()->check(CLI::Range(1, 12));
    attach->callback([&]() {
        ScatterLattice l = make_lattice(read_form_file(att_form_file));
        Fan f = read_fan_file(att_fan_file);
        std::vector<std::string> warnings;
        auto walls = attach_fan_functions(f, l, att_order, &warnings);
        json cfg = base_config(ctx);
        cfg["fan"] = att_fan_file;
        cfg["form"] = att_form_file;
        cfg["order"] = att_order;
        emit(ctx, "scatter attach", cfg, json{{"walls", json::parse(walls_to_json(walls))}, {"warnings", warnings}});
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cout << json{{"version", kVersion}, {"error", e.what()}}.dump(2) << "\n";
        return 1;
    }
    return 0;
}
