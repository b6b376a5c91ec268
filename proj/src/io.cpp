#include "gvfan/io.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace gvfan {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void atomic_write_file(const std::string& path, const std::string& bytes) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write file: " + tmp);
        out << bytes;
        if (!out.good()) throw std::runtime_error("short write: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

namespace {

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument("malformed " + what + " JSON: " + e.what());
    }
}

IntVec to_intvec(const json& j, const std::string& what) {
    if (!j.is_array()) throw std::invalid_argument(what + ": expected an array of integers");
    IntVec v;
    for (const auto& x : j) {
        if (!x.is_number_integer()) throw std::invalid_argument(what + ": expected an integer entry");
        v.push_back(x.get<long long>());
    }
    return v;
}

IntMat to_intmat(const json& j, const std::string& what) {
    if (!j.is_array()) throw std::invalid_argument(what + ": expected an array of rows");
    IntMat m;
    for (const auto& row : j) m.push_back(to_intvec(row, what));
    return m;
}

Rat coeff_from_json(const json& j) {
    if (j.is_number_integer()) return rat(j.get<long long>());
    if (j.is_string()) return rat_from_string(j.get<std::string>());
    throw std::invalid_argument("coefficient must be an integer or a \"p/q\" string");
}

json quiver_json_obj(const ExchangeMatrix& B) {
    json arrows = json::array();
    for (int i = 0; i < B.n; ++i)
        for (int j = 0; j < B.n; ++j)
            if (B.b[i][j] > 0) arrows.push_back({i, j, B.b[i][j]});
    return json{{"n", B.n}, {"arrows", arrows}, {"b", B.b}};
}

ExchangeMatrix quiver_from_json(const json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("arrows"))
        throw std::invalid_argument("quiver JSON needs \"n\" and \"arrows\"");
    int n = j.at("n").get<int>();
    std::vector<std::array<long long, 3>> arrows;
    for (const auto& a : j.at("arrows")) {
        IntVec t = to_intvec(a, "arrow");
        if (t.size() != 3) throw std::invalid_argument("arrow entries are [i, j, w] triples");
        arrows.push_back({t[0], t[1], t[2]});
    }
    return exchange_from_arrows(n, arrows);
}

json rat_pair(const Rat& r) { return json{{"num", r.get_num().get_str()}, {"den", r.get_den().get_str()}}; }

}  // namespace

ExchangeMatrix parse_quiver(const std::string& text) {
    size_t i = text.find_first_not_of(" \t\r\n");
    if (i == std::string::npos) throw std::invalid_argument("empty quiver file");
    if (text[i] == '{') return quiver_from_json(parse_json(text, "quiver"));
    std::istringstream in(text);
    long long n = 0;
    if (!(in >> n)) throw std::invalid_argument("quiver text: missing vertex count");
    std::vector<std::array<long long, 3>> arrows;
    long long a, b, w;
    while (in >> a) {
        if (!(in >> b >> w)) throw std::invalid_argument("quiver text: arrow lines are \"i j w\"");
        arrows.push_back({a, b, w});
    }
    return exchange_from_arrows((int)n, arrows);
}

ExchangeMatrix read_quiver_file(const std::string& path) { return parse_quiver(read_text_file(path)); }

std::string quiver_to_json(const ExchangeMatrix& B) { return quiver_json_obj(B).dump(2) + "\n"; }

std::string seedset_to_json(const SeedSet& s) {
    json seeds = json::array();
    for (const GSeed& g : s.seeds) {
        json cols = json::array();
        for (int c = 0; c < g.n; ++c) {
            IntVec col(g.n);
            for (int r = 0; r < g.n; ++r) col[r] = g.gmat[r][c];
            cols.push_back(col);
        }
        IntMat bm(g.btilde.begin(), g.btilde.begin() + g.n);
        seeds.push_back(json{{"g_columns", cols}, {"b_mutable", bm}, {"c_matrix", c_matrix(g)}, {"trail", g.trail}});
    }
    return json{{"depth", s.depth}, {"complete", s.complete}, {"seeds", seeds}}.dump(2) + "\n";
}

SeedSet parse_seedset(const std::string& text) {
    json j = parse_json(text, "seed set");
    SeedSet out;
    out.depth = j.at("depth").get<int>();
    out.complete = j.at("complete").get<bool>();
    IntMat b0;
    for (const auto& js : j.at("seeds")) {
        GSeed g;
        IntMat cols = to_intmat(js.at("g_columns"), "g_columns");
        g.n = (int)cols.size();
        g.gmat.assign(g.n, IntVec(g.n, 0));
        for (int c = 0; c < g.n; ++c)
            for (int r = 0; r < g.n; ++r) g.gmat[r][c] = cols[c][r];
        IntMat bm = to_intmat(js.at("b_mutable"), "b_mutable");
        IntMat cm = to_intmat(js.at("c_matrix"), "c_matrix");
        g.btilde = bm;
        g.btilde.insert(g.btilde.end(), cm.begin(), cm.end());
        for (const auto& t : js.at("trail")) g.trail.push_back(t.get<int>());
        if (g.trail.empty()) b0 = bm;
        out.seeds.push_back(std::move(g));
    }
    if (b0.empty() && !out.seeds.empty()) b0 = IntMat(out.seeds[0].btilde.begin(), out.seeds[0].btilde.begin() + out.seeds[0].n);
    for (GSeed& g : out.seeds) g.b0 = b0;
    return out;
}

std::string fan_to_json(const Fan& f) {
    json cones = json::array();
    for (const SimplicialCone& c : f.cones) cones.push_back(c.rays);
    return json{{"ambient_dim", f.ambient_dim}, {"maximal_cones", cones}}.dump(2) + "\n";
}

Fan parse_fan(const std::string& text) {
    json j = parse_json(text, "fan");
    Fan f;
    f.ambient_dim = j.at("ambient_dim").get<int>();
    for (const auto& jc : j.at("maximal_cones")) {
        IntMat rays = to_intmat(jc, "cone rays");
        for (const IntVec& r : rays)
            if ((int)r.size() != f.ambient_dim) throw std::invalid_argument("fan: ray dimension != ambient_dim");
        f.cones.push_back(make_cone(rays));
    }
    return f;
}

Fan read_fan_file(const std::string& path) { return parse_fan(read_text_file(path)); }

std::string coverage_to_json(const CoverageReport& r) {
    json j{{"fraction", rat_pair(r.fraction)}, {"value", r.fraction.get_d()},       {"samples", r.samples},
           {"covered", r.covered},             {"method", r.method}};
    j["halfspace_normal"] = r.halfspace_normal ? json(*r.halfspace_normal) : json(nullptr);
    return j.dump(2) + "\n";
}

std::string class_report_to_json(const MutationClassReport& r) {
    const char* verdict = r.verdict == ClassVerdict::finite     ? "finite"
                          : r.verdict == ClassVerdict::infinite ? "infinite"
                                                                : "budget-exhausted";
    json j{{"verdict", verdict},
           {"class_size", r.class_size},
           {"explored", r.explored},
           {"exact_up_to_iso", r.exact_up_to_iso},
           {"witness", r.witness}};
    j["witness_matrix"] = r.verdict == ClassVerdict::infinite ? quiver_json_obj(r.witness_matrix) : json(nullptr);
    return j.dump(2) + "\n";
}

MutationClassReport parse_class_report(const std::string& text) {
    json j = parse_json(text, "class report");
    MutationClassReport r;
    std::string v = j.at("verdict").get<std::string>();
    r.verdict = v == "finite" ? ClassVerdict::finite : v == "infinite" ? ClassVerdict::infinite : ClassVerdict::budget_exhausted;
    r.class_size = j.at("class_size").get<size_t>();
    r.explored = j.at("explored").get<size_t>();
    r.exact_up_to_iso = j.at("exact_up_to_iso").get<bool>();
    for (const auto& t : j.at("witness")) r.witness.push_back(t.get<int>());
    if (!j.at("witness_matrix").is_null()) r.witness_matrix = quiver_from_json(j.at("witness_matrix"));
    return r;
}

AlgebraPresentation parse_algebra(const std::string& text) {
    json j = parse_json(text, "algebra");
    AlgebraPresentation p;
    p.vertices = j.at("vertices").get<int>();
    std::map<std::string, int> by_name;
    for (const auto& ja : j.at("arrows")) {
        Arrow a;
        a.name = ja.at("name").get<std::string>();
        a.source = ja.at("source").get<int>();
        a.target = ja.at("target").get<int>();
        if (!by_name.emplace(a.name, (int)p.arrows.size()).second)
            throw std::invalid_argument("duplicate arrow name: " + a.name);
        p.arrows.push_back(a);
    }
    for (const auto& jr : j.value("relations", json::array())) {
        Relation rel;
        for (const auto& jt : jr) {
            RelationTerm t;
            t.coeff = coeff_from_json(jt.at("coefficient"));
            for (const auto& nm : jt.at("path")) {
                auto it = by_name.find(nm.get<std::string>());
                if (it == by_name.end()) throw std::invalid_argument("relation uses unknown arrow: " + nm.get<std::string>());
                t.arrows.push_back(it->second);
            }
            rel.push_back(std::move(t));
        }
        p.relations.push_back(std::move(rel));
    }
    p.nilpotency_bound = j.at("nilpotency_bound").get<int>();
    return p;
}

AlgebraPresentation read_algebra_file(const std::string& path) { return parse_algebra(read_text_file(path)); }

std::string algebra_to_json(const AlgebraPresentation& p) {
    json arrows = json::array();
    for (const Arrow& a : p.arrows)
        arrows.push_back(json{{"name", a.name}, {"source", a.source}, {"target", a.target}});
    json rels = json::array();
    for (const Relation& r : p.relations) {
        json jr = json::array();
        for (const RelationTerm& t : r) {
            json names = json::array();
            for (int idx : t.arrows) names.push_back(p.arrows[idx].name);
            jr.push_back(json{{"coefficient", rat_to_string(t.coeff)}, {"path", names}});
        }
        rels.push_back(jr);
    }
    return json{{"vertices", p.vertices}, {"arrows", arrows}, {"relations", rels}, {"nilpotency_bound", p.nilpotency_bound}}
               .dump(2) +
           "\n";
}

namespace {

json elt_to_terms(const Algebra& a, const AlgElt& e) {
    json terms = json::array();
    for (const auto& [id, c] : e) {
        if (c == 0) continue;
        json names = json::array();
        for (int idx : a.path_arrows[id]) names.push_back(a.pres.arrows[idx].name);
        terms.push_back(json{{"coefficient", rat_to_string(c)}, {"path", names}});
    }
    return terms;
}

AlgElt elt_from_terms(const Algebra& a, const json& terms, int src, int tgt) {
    std::map<std::string, int> by_name;
    for (size_t i = 0; i < a.pres.arrows.size(); ++i) by_name[a.pres.arrows[i].name] = (int)i;
    AlgElt out;
    for (const auto& jt : terms) {
        Rat coeff = coeff_from_json(jt.at("coefficient"));
        std::vector<int> path;
        for (const auto& nm : jt.at("path")) {
            auto it = by_name.find(nm.get<std::string>());
            if (it == by_name.end()) throw std::invalid_argument("unknown arrow in path: " + nm.get<std::string>());
            path.push_back(it->second);
        }
        AlgElt elt;
        if (path.empty()) {
            if (src != tgt) throw std::invalid_argument("unit term in a block between different vertices");
            elt[a.unit[src]] = 1;
        } else {
            int at = src;
            for (int idx : path) {
                if (a.pres.arrows[idx].source != at)
                    throw std::invalid_argument("path does not compose from the block's source vertex");
                at = a.pres.arrows[idx].target;
            }
            if (at != tgt) throw std::invalid_argument("path does not end at the block's target vertex");
            elt[a.unit[src]] = 1;
            for (int idx : path) elt = alg_mul(a, a.arrow_elt[idx], elt);
        }
        for (const auto& [id, c] : elt) out[id] += coeff * c;
    }
    for (auto it = out.begin(); it != out.end();) it = (it->second == 0) ? out.erase(it) : std::next(it);
    return out;
}

}  // namespace

std::string complex_to_json(const Algebra& a, const TwoTermComplex& x) {
    json blocks = json::array();
    for (const auto& row : x.f) {
        json jr = json::array();
        for (const AlgElt& e : row) jr.push_back(elt_to_terms(a, e));
        blocks.push_back(jr);
    }
    return json{{"m_minus", x.m_minus}, {"m_plus", x.m_plus}, {"blocks", blocks}}.dump(2) + "\n";
}

TwoTermComplex parse_complex(const Algebra& a, const std::string& text) {
    json j = parse_json(text, "complex");
    TwoTermComplex x;
    x.m_minus = to_intvec(j.at("m_minus"), "m_minus");
    x.m_plus = to_intvec(j.at("m_plus"), "m_plus");
    int n = a.pres.vertices;
    if ((int)x.m_minus.size() != n || (int)x.m_plus.size() != n)
        throw std::invalid_argument("complex: m_minus and m_plus must have one entry per vertex");
    for (long long v : x.m_minus)
        if (v < 0) throw std::invalid_argument("complex: negative multiplicity");
    for (long long v : x.m_plus)
        if (v < 0) throw std::invalid_argument("complex: negative multiplicity");
    std::vector<int> minus_v = summand_vertices(x.m_minus), plus_v = summand_vertices(x.m_plus);
    x.f.assign(plus_v.size(), std::vector<AlgElt>(minus_v.size()));
    const json& blocks = j.value("blocks", json::array());
    if (!blocks.empty()) {
        if (blocks.size() != plus_v.size()) throw std::invalid_argument("complex: blocks row count != plus summands");
        for (size_t r = 0; r < plus_v.size(); ++r) {
            if (blocks[r].size() != minus_v.size())
                throw std::invalid_argument("complex: blocks column count != minus summands");
            for (size_t c = 0; c < minus_v.size(); ++c)
                x.f[r][c] = elt_from_terms(a, blocks[r][c], minus_v[c], plus_v[r]);
        }
    }
    return x;
}

TwoTermComplex read_complex_file(const Algebra& a, const std::string& path) {
    return parse_complex(a, read_text_file(path));
}

std::string gdecomp_to_json(const GenericDecomposition& d) {
    json summands = json::array();
    for (const GenericSummand& s : d.summands)
        summands.push_back(json{{"g", s.g}, {"multiplicity", s.multiplicity}, {"kind", s.kind}});
    return json{{"stable", d.stable}, {"summands", summands}, {"observed", d.observed}}.dump(2) + "\n";
}

std::string summands_to_json(const Algebra& a, const std::vector<Summand>& s) {
    json out = json::array();
    for (const Summand& m : s)
        out.push_back(json{{"g", g_vector(m.cx)},
                           {"status", m.status},
                           {"end_dim", m.end_dim},
                           {"local_dim", m.local_dim},
                           {"complex", json::parse(complex_to_json(a, m.cx))}});
    return out.dump(2) + "\n";
}

std::string walls_to_json(const std::vector<Wall>& walls) {
    json out = json::array();
    for (const Wall& w : walls) {
        json fn = json::array();
        for (const auto& [d, c] : w.log_fn.coeffs) {
            json e = rat_pair(c);
            e["d"] = d;
            fn.push_back(e);
        }
        out.push_back(json{{"d0", w.d0}, {"support_rays", w.support_rays}, {"log_fn", fn}});
    }
    return out.dump(2) + "\n";
}

IntMat parse_form(const std::string& text) {
    size_t i = text.find_first_not_of(" \t\r\n");
    if (i == std::string::npos) throw std::invalid_argument("empty form file");
    IntMat form;
    if (text[i] == '[') {
        form = to_intmat(parse_json(text, "form"), "form");
    } else if (text[i] == '{') {
        json j = parse_json(text, "form");
        if (j.contains("form")) {
            form = to_intmat(j.at("form"), "form");
        } else {
            ExchangeMatrix B = quiver_from_json(j);
            form.assign(B.n, IntVec(B.n, 0));
            for (int r = 0; r < B.n; ++r)
                for (int c = 0; c < B.n; ++c) form[r][c] = B.b[c][r];
        }
    } else {
        ExchangeMatrix B = parse_quiver(text);
        form.assign(B.n, IntVec(B.n, 0));
        for (int r = 0; r < B.n; ++r)
            for (int c = 0; c < B.n; ++c) form[r][c] = B.b[c][r];
    }
    for (const IntVec& row : form)
        if (row.size() != form.size()) throw std::invalid_argument("form matrix must be square");
    return form;
}

IntMat read_form_file(const std::string& path) { return parse_form(read_text_file(path)); }

IntVec parse_int_vector(const std::string& text) {
    IntVec out;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, ',')) {
        size_t pos = 0;
        long long v;
        try {
            v = std::stoll(cur, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad integer list: " + text);
        }
        while (pos < cur.size() && std::isspace((unsigned char)cur[pos])) pos++;
        if (pos != cur.size()) throw std::invalid_argument("bad integer list: " + text);
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty integer list");
    return out;
}

}  // namespace gvfan
