#include "fusionchain/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#ifndef FC_VERSION
#define FC_VERSION "0.0.0"
#endif

using json = nlohmann::ordered_json;
using namespace fc;

namespace {

struct run_config {
    std::string category = "fibonacci";
    std::string objects;
    int window = 3;
    double tol = 1e-8;
    std::uint64_t seed = 0;
    std::string emit;
    std::string out = ".";
    int jobs = 0;
    bool all = false;
    std::string conditions;
};

json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    double r = std::strtod(buf, nullptr);
    if (r == 0) r = 0;
    if (std::abs(r) < 9e15 && r == std::floor(r)) return static_cast<long long>(r);
    return r;
}

json cnum(cplx z) { return json{{"re", num(z.real())}, {"im", num(z.imag())}}; }

json cmatrix(const cmat& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array(), c = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            r.push_back(num(m(i, j).real()));
            c.push_back(num(m(i, j).imag()));
        }
        re.push_back(r);
        im.push_back(c);
    }
    return json{{"re", re}, {"im", im}};
}

// Nonzero entries per block: [row, col, re, im].
json sparse(const morphism& f) {
    json blocks = json::array();
    for (size_t Y = 0; Y < f.blk.size(); ++Y) {
        const cmat& b = f.blk[Y];
        if (b.size() == 0) continue;
        json e = json::array();
        for (Eigen::Index j = 0; j < b.cols(); ++j)
            for (Eigen::Index i = 0; i < b.rows(); ++i)
                if (std::abs(b(i, j)) > 1e-13) e.push_back(json::array({i, j, num(b(i, j).real()), num(b(i, j).imag())}));
        blocks.push_back(json{{"root", Y}, {"rows", b.rows()}, {"cols", b.cols()}, {"entries", e}});
    }
    return blocks;
}

json versions() {
    return json{{"fusionchain", FC_VERSION},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)},
                {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                      "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                {"cli11", CLI11_VERSION}};
}

json header(const std::string& sub, const category& cat, const run_config& cfg, const chain_spec* ch) {
    json h;
    h["subcommand"] = sub;
    h["category"] = cat.name;
    h["window"] = cfg.window;
    h["seed"] = cfg.seed;
    h["tol"] = num(cfg.tol);
    if (ch) {
        json pat = json::array();
        for (const auto& x : ch->pattern) pat.push_back(object_name(cat, x));
        h["site_pattern"] = pat;
    }
    return h;
}

class table {
public:
    explicit table(std::vector<std::string> head) : rows_{std::move(head)} {}
    void add(std::vector<std::string> r) { rows_.push_back(std::move(r)); }
    void print(std::ostream& os) const {
        std::vector<size_t> w;
        for (const auto& r : rows_)
            for (size_t i = 0; i < r.size(); ++i) {
                if (w.size() <= i) w.push_back(0);
                w[i] = std::max(w[i], r[i].size());
            }
        for (size_t k = 0; k < rows_.size(); ++k) {
            for (size_t i = 0; i < rows_[k].size(); ++i) {
                os << rows_[k][i];
                if (i + 1 < rows_[k].size()) os << std::string(w[i] - rows_[k][i].size() + 2, ' ');
            }
            os << "\n";
            if (k == 0) {
                size_t tot = 0;
                for (size_t i = 0; i < w.size(); ++i) tot += w[i] + (i + 1 < w.size() ? 2 : 0);
                os << std::string(tot, '-') << "\n";
            }
        }
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::set<std::string> emit_set(const std::string& s, const std::set<std::string>& dflt, const std::set<std::string>& known) {
    if (s.empty()) return dflt;
    std::set<std::string> out;
    std::stringstream ss(s);
    std::string t;
    while (std::getline(ss, t, ',')) {
        if (t == "all") return known;
        if (!known.count(t)) throw input_error("unknown artifact for --emit: " + t);
        out.insert(t);
    }
    return out;
}

void write_artifact(const run_config& cfg, const std::string& sub, const std::string& cat, const json& j) {
    std::filesystem::path dir(cfg.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::string stem = cat;
    for (auto& c : stem)
        if (c == '/' || c == ' ') c = '_';
    auto path = dir / (sub + "-" + stem + "-k" + std::to_string(cfg.window) + ".json");
    std::ofstream f(path);
    if (!f) throw input_error("cannot write " + path.string());
    f << j.dump(2) << "\n";
    std::cout << "wrote " << path.string() << "\n";
}

chain_spec chain_of(const category& cat, const run_config& cfg) {
    std::vector<object> pat;
    if (!cfg.objects.empty()) pat = parse_objects(cat, cfg.objects);
    return make_chain(cat, cfg.window, pat);
}

// validate

json validate_json(const category& cat, const run_config& cfg, bool& ok) {
    auto r = validate_category(cat, cfg.tol);
    ok = r.pass;
    json j = header("validate", cat, cfg, nullptr);
    json labels = json::array();
    for (int a = 0; a < cat.rank(); ++a)
        labels.push_back(json{{"name", cat.labels[a].name}, {"dual", cat.labels[cat.dual(a)].name}, {"dim", num(cat.dim(a))}});
    j["rank"] = cat.rank();
    j["labels"] = labels;
    j["multiplicity_free"] = cat.max_mult() == 1;
    j["defects"] = json{{"pentagon", num(r.pentagon)},
                        {"unitarity", num(r.unitarity)},
                        {"dimension", num(r.dimension)},
                        {"unit", num(r.unit)},
                        {"fusion", num(r.fusion)}};
    j["verdict"] = r.pass ? "pass" : "fail";
    j["versions"] = versions();
    return j;
}

int cmd_validate(const run_config& cfg) {
    category cat = load_category(cfg.category);
    bool ok = false;
    json j = validate_json(cat, cfg, ok);
    table t({"check", "defect"});
    for (auto& [k, v] : j["defects"].items()) t.add({k, v.dump()});
    std::cout << "category " << cat.name << " (rank " << cat.rank() << ")\n";
    t.print(std::cout);
    std::cout << "verdict " << j["verdict"].get<std::string>() << "\n";
    write_artifact(cfg, "validate", cat.name, j);
    return ok ? 0 : 1;
}

// chain

json chain_json(const category& cat, const run_config& cfg, rng_t& rng, bool& ok) {
    chain_spec ch = chain_of(cat, cfg);
    json j = header("chain", cat, cfg, &ch);
    json sites = json::array();
    for (int n = ch.lo(); n <= ch.hi(); ++n) sites.push_back(object_name(cat, ch.site(n)));
    j["sites"] = sites;
    // Interval algebras by path counting, checked against the fusion tree enumeration.
    json intervals = json::array();
    bool dims_ok = true;
    for (int len = 1; len <= 2 * ch.k + 1; ++len) {
        int a = ch.lo(), b = a + len - 1;
        auto alg = make_interval_algebra(ch, a, b);
        auto tb = basis_of(cat, alg.w);
        long trees = 0;
        for (int Y = 0; Y < cat.rank(); ++Y) trees += static_cast<long>(tb->dim(Y)) * tb->dim(Y);
        dims_ok = dims_ok && trees == alg.dim;
        intervals.push_back(json{{"interval", json::array({a, b})}, {"multiplicities", alg.m}, {"dim", alg.dim}, {"tree_count", trees}});
    }
    j["intervals"] = intervals;
    auto hl = half_line_algebras(ch);
    cut_frame f = window_frame(ch);
    auto idx = watatani_index(f, rng);
    j["algebras"] = json{{"dim_A", hl.window.dim},
                         {"dim_A_minus", hl.minus.dim},
                         {"dim_A_plus", hl.plus.dim},
                         {"dim_B0", hl.b0_dim},
                         {"dim_B1", b1_dimension(f)},
                         {"dim_B1_numeric", b1_dimension_numeric(f)}};
    j["index"] = json{{"value", num(idx.index)},
                      {"scalar_defect", num(idx.scalar_defect)},
                      {"reconstruction", num(idx.reconstruction)},
                      {"pimsner_popa", num(idx.pp_constant)},
                      {"pimsner_popa_defect", num(idx.pp_defect)},
                      {"sum_dim_sq", num(idx.sum_dim_sq)}};
    ok = dims_ok && idx.scalar_defect <= cfg.tol && idx.reconstruction <= cfg.tol && b1_dimension(f) == b1_dimension_numeric(f);
    j["dimension_oracle"] = dims_ok ? "pass" : "fail";
    j["verdict"] = ok ? "pass" : "fail";
    j["versions"] = versions();
    return j;
}

int cmd_chain(const run_config& cfg) {
    category cat = load_category(cfg.category);
    rng_t rng(cfg.seed);
    bool ok = false;
    json j = chain_json(cat, cfg, rng, ok);
    table t({"quantity", "value"});
    for (auto& [k, v] : j["algebras"].items()) t.add({k, v.dump()});
    for (auto& [k, v] : j["index"].items()) t.add({"index." + k, v.dump()});
    t.add({"dimension_oracle", j["dimension_oracle"].get<std::string>()});
    t.print(std::cout);
    write_artifact(cfg, "chain", cat.name, j);
    return ok ? 0 : 1;
}

// center

json center_json(const category& cat, const run_config& cfg, bool& ok) {
    rng_t rng(cfg.seed);
    auto tube = make_tube_algebra(cat, rng);
    auto simples = center_simples(tube, rng);
    json j = header("center", cat, cfg, nullptr);
    center_object Z = regular_center_object(cat);
    json arr = json::array();
    double hb = 0;
    long triv_checked = 0, triv_bad = 0;
    for (const auto& s : simples) {
        rng_t r2(cfg.seed + 1 + static_cast<std::uint64_t>(s.id));
        auto v = verify_half_braiding(s.obj, r2, cfg.tol);
        hb = std::max({hb, v.unitarity, v.naturality, v.hexagon});
        bool unit_only = s.mult[0] == static_cast<int>(s.obj.z.size());
        morphism mono = monodromy(Z, s.obj);
        bool trivial = distance(mono, morphism::identity(cat, mono.src)) < 1e-8;
        ++triv_checked;
        if (trivial && !unit_only) ++triv_bad;
        arr.push_back(json{{"id", s.id},
                           {"name", s.obj.name},
                           {"multiplicities", s.mult},
                           {"qdim", num(s.qdim)},
                           {"twist_re", num(s.twist.real())},
                           {"twist_im", num(s.twist.imag())},
                           {"unit_underlying", unit_only},
                           {"trivial_monodromy_with_Zreg", trivial}});
    }
    j["simples"] = arr;
    rng_t r3(cfg.seed);
    auto zr = verify_half_braiding(Z, r3, cfg.tol);
    auto dec = decompose(Z, simples);
    cmat S = tube_s_matrix(simples), T = tube_t_matrix(simples);
    auto mc = check_modular(S, T);
    double total = 0;
    for (const auto& s : simples) total += s.qdim * s.qdim;
    j["defects"] = json{{"tube_closure", num(tube.closure_residual)},
                        {"tube_adjoint", num(tube.adjoint_residual)},
                        {"tube_dim", static_cast<long>(tube.alg.dim())},
                        {"tube_dim_count", tube.dim_count},
                        {"half_braiding_max", num(hb)},
                        {"zreg_unitarity", num(zr.unitarity)},
                        {"zreg_naturality", num(zr.naturality)},
                        {"zreg_hexagon", num(zr.hexagon)},
                        {"zreg_unit_multiplicity", dec.empty() ? 0 : dec[0]},
                        {"sum_qdim_sq", num(total)},
                        {"total_dim_sq_squared", num(cat.total_dim_sq() * cat.total_dim_sq())},
                        {"s_unitarity", num(mc.s_unitarity)},
                        {"s_symmetry", num(mc.s_symmetry)},
                        {"st_relation", num(mc.st_relation)},
                        {"trivial_monodromy_checked", triv_checked},
                        {"trivial_monodromy_violations", triv_bad}};
    j["smatrix"] = cmatrix(S);
    j["tmatrix"] = cmatrix(T);
    j["modular"] = mc.modular;
    ok = hb <= cfg.tol && zr.pass && !dec.empty() && dec[0] == 1 && triv_bad == 0 &&
         static_cast<long>(tube.alg.dim()) == tube.dim_count && mc.modular;
    j["verdict"] = ok ? "pass" : "fail";
    j["versions"] = versions();
    return j;
}

int cmd_center(const run_config& cfg) {
    category cat = load_category(cfg.category);
    bool ok = false;
    json j = center_json(cat, cfg, ok);
    table t({"id", "name", "mult", "qdim", "twist"});
    for (const auto& s : j["simples"]) {
        std::string m;
        for (const auto& v : s["multiplicities"]) m += (m.empty() ? "" : ",") + v.dump();
        t.add({s["id"].dump(), s["name"].get<std::string>(), m, s["qdim"].dump(),
               s["twist_re"].dump() + (s["twist_im"].get<double>() < 0 ? "" : "+") + s["twist_im"].dump() + "i"});
    }
    t.print(std::cout);
    std::cout << "verdict " << j["verdict"].get<std::string>() << "\n";
    write_artifact(cfg, "center", cat.name, j);
    return ok ? 0 : 1;
}

// dhr

json basis_json(const dhr_module& M, const projective_basis& B, rng_t& rng, bool coeffs, double& worst) {
    auto rep = check_basis(M, B, rng);
    worst = std::max({worst, rep.reconstruction, rep.completeness, rep.locality});
    json j{{"interval", json::array({B.a, B.b})},
           {"size", B.size()},
           {"reconstruction", num(rep.reconstruction)},
           {"completeness", num(rep.completeness)},
           {"locality", num(rep.locality)}};
    if (coeffs) {
        json v = json::array();
        for (const auto& x : B.xi) v.push_back(sparse(x));
        j["coefficients"] = v;
    }
    return j;
}

int cmd_dhr(const run_config& cfg) {
    category cat = load_category(cfg.category);
    chain_spec ch = chain_of(cat, cfg);
    auto em = emit_set(cfg.emit, {"smatrix", "monodromy", "transporters"}, {"smatrix", "monodromy", "transporters", "bases", "braiding"});
    rng_t rng(cfg.seed);
    auto tube = make_tube_algebra(cat, rng);
    auto simples = center_simples(tube, rng);
    std::vector<dhr_sector> sectors;
    try {
        sectors = dhr_sectors(simples, ch);
    } catch (const std::exception& e) {
        throw input_error(std::string("dhr: ") + e.what());
    }
    json j = header("dhr", cat, cfg, &ch);
    json arr = json::array();
    double basis_worst = 0, transport_worst = 0;
    table t({"sector", "qdim", "dim F", "basis", "transporter defect", "r-Ind"});
    for (size_t i = 0; i < sectors.size(); ++i) {
        const auto& s = sectors[i];
        json e{{"id", simples[i].id}, {"name", simples[i].obj.name}, {"qdim", num(simples[i].qdim)}, {"dim_F", s.M.dim()}};
        if (s.M.dim() == 0) {
            e["visible"] = false;
            arr.push_back(e);
            t.add({simples[i].obj.name, fmt(simples[i].qdim), "0", "-", "-", "-"});
            continue;
        }
        e["visible"] = true;
        const bool coeffs = em.count("bases") > 0;
        e["bases"] = json{{"left", basis_json(s.M, s.left, rng, coeffs, basis_worst)},
                          {"mid", basis_json(s.M, s.mid, rng, coeffs, basis_worst)},
                          {"right", basis_json(s.M, s.right, rng, coeffs, basis_worst)}};
        auto tr = charge_transporters(s.M, s.left, s.right);
        transport_worst = std::max(transport_worst, tr.max_defect());
        json tj{{"tt_star", num(tr.tt_star)},        {"p1_t", num(tr.p1t)},
                {"t_star_t", num(tr.t_star_t)},      {"t_p2", num(tr.tp2)},
                {"base_change", num(tr.base_change)}, {"adjoint_change", num(tr.adjoint_change)},
                {"b0_distance", num(b0_distance(ch, tr))}};
        if (em.count("transporters")) {
            json mats = json::array();
            for (const auto& row : tr.t) {
                json r = json::array();
                for (const auto& x : row) r.push_back(sparse(x));
                mats.push_back(r);
            }
            tj["matrices"] = mats;
        }
        e["transporters"] = tj;
        auto ri = right_index(s.M, s.left);
        e["right_index"] = json{{"value", num(ri.value)}, {"scalar_defect", num(ri.scalar_defect)}};
        arr.push_back(e);
        t.add({simples[i].obj.name, fmt(simples[i].qdim), std::to_string(s.M.dim()), std::to_string(s.left.size()),
               fmt(tr.max_defect()), fmt(ri.value)});
    }
    j["sectors"] = arr;
    double mono_worst = 0;
    if (em.count("monodromy") || em.count("braiding")) {
        json pairs = json::array();
        for (size_t a = 0; a < sectors.size(); ++a)
            for (size_t b = 0; b < sectors.size(); ++b) {
                if (sectors[a].M.dim() == 0 || sectors[b].M.dim() == 0) continue;
                auto mr = dhr_monodromy(sectors[a].M, sectors[b].M, sectors[a].left, sectors[b].mid, sectors[a].right);
                mono_worst = std::max(mono_worst, mr.agreement);
                json p{{"x", simples[a].obj.name}, {"y", simples[b].obj.name}, {"agreement", num(mr.agreement)}};
                if (em.count("braiding")) {
                    morphism B = braiding(sectors[a].M, sectors[b].M, sectors[a].left, sectors[b].right);
                    morphism ref = id_tensor(ch.window(), half_braiding_site(sectors[a].M.Z(), sectors[b].M.Z().z));
                    p["braiding_vs_center"] = num(distance(B, ref));
                    p["braiding"] = sparse(B);
                    p["monodromy"] = sparse(mr.composed);
                }
                pairs.push_back(p);
            }
        j["monodromy"] = pairs;
    }
    bool mod_ok = true;
    if (em.count("smatrix")) {
        auto md = dhr_modular_data(sectors, simples);
        j["modular"] = json{{"S", cmatrix(md.S)},
                            {"T", cmatrix(md.T)},
                            {"s_unitarity", num(md.s_unitarity)},
                            {"s_symmetry", num(md.s_symmetry)},
                            {"st_relation", num(md.st_relation)},
                            {"tube_distance", num(md.tube_distance)},
                            {"monodromy_agreement", num(md.monodromy_agreement)},
                            {"visible", md.visible},
                            {"modular", md.modular}};
        mod_ok = md.visible && md.modular && md.tube_distance <= 1e-6;
        std::cout << "S matrix (unitarity defect " << fmt(md.s_unitarity) << ", distance to tube " << fmt(md.tube_distance) << ")\n";
        for (Eigen::Index r = 0; r < md.S.rows(); ++r) {
            for (Eigen::Index c = 0; c < md.S.cols(); ++c) {
                cplx z = md.S(r, c);
                std::cout << "  " << fmt(std::abs(z.real()) < 1e-12 ? 0.0 : z.real());
                if (std::abs(z.imag()) > 1e-12) std::cout << (z.imag() < 0 ? "" : "+") << fmt(z.imag()) << "i";
            }
            std::cout << "\n";
        }
    }
    j["defects"] = json{{"basis", num(basis_worst)}, {"transporters", num(transport_worst)}, {"monodromy", num(mono_worst)}};
    bool ok = basis_worst <= cfg.tol && transport_worst <= cfg.tol && mono_worst <= cfg.tol && mod_ok;
    j["verdict"] = ok ? "pass" : "fail";
    j["versions"] = versions();
    t.print(std::cout);
    write_artifact(cfg, "dhr", cat.name, j);
    return ok ? 0 : 1;
}

// check

json check_json(const category& cat, const run_config& cfg, bool& ok) {
    chain_spec ch = chain_of(cat, cfg);
    std::vector<condition> which;
    if (cfg.all || cfg.conditions.empty()) {
        which = all_conditions();
    } else {
        std::stringstream ss(cfg.conditions);
        std::string t;
        while (std::getline(ss, t, ',')) which.push_back(parse_condition(t));
    }
    auto rep = check_conditions(ch, which, cfg.seed, cfg.tol, cfg.jobs);
    ok = rep.all_pass();
    json j = header("check", cat, cfg, &ch);
    json conds = json::array();
    for (const auto& e : rep.conditions) {
        json c;
        for (const auto& [k, v] : e.constants) c[k] = num(v);
        json ce{{"name", e.name}, {"verdict", verdict_name(e.result)}, {"constants", c}, {"max_defect", num(e.max_defect)}, {"windows", e.windows}};
        if (!e.note.empty()) ce["note"] = e.note;
        conds.push_back(ce);
    }
    j["conditions"] = conds;
    j["verdict"] = ok ? "pass" : "fail";
    j["versions"] = versions();
    return j;
}

void print_conditions(const json& j) {
    table t({"condition", "verdict", "max defect", "windows"});
    for (const auto& c : j["conditions"]) {
        std::string w;
        for (const auto& v : c["windows"]) w += (w.empty() ? "" : ",") + v.dump();
        t.add({c["name"].get<std::string>(), c["verdict"].get<std::string>(), c["max_defect"].dump(), w});
    }
    t.print(std::cout);
}

int cmd_check(const run_config& cfg) {
    category cat = load_category(cfg.category);
    bool ok = false;
    json j = check_json(cat, cfg, ok);
    print_conditions(j);
    write_artifact(cfg, "check", cat.name, j);
    return ok ? 0 : 1;
}

// report

int cmd_report(const run_config& cfg) {
    category cat = load_category(cfg.category);
    bool v = false, c = false, z = false, k = false;
    json j = header("report", cat, cfg, nullptr);
    j["validate"] = validate_json(cat, cfg, v);
    rng_t rng(cfg.seed);
    j["chain"] = chain_json(cat, cfg, rng, c);
    j["center"] = center_json(cat, cfg, z);
    j["check"] = check_json(cat, cfg, k);
    for (const char* key : {"validate", "chain", "center", "check"}) j[key].erase("versions");
    bool ok = v && c && z && k;
    j["verdict"] = ok ? "pass" : "fail";
    j["versions"] = versions();
    table t({"section", "verdict"});
    for (const char* key : {"validate", "chain", "center", "check"}) t.add({key, j[key]["verdict"].get<std::string>()});
    t.print(std::cout);
    print_conditions(j["check"]);
    write_artifact(cfg, "report", cat.name, j);
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fusion spin chains: local algebras, center sectors, DHR bimodules and condition checks"};
    app.require_subcommand(1);
    run_config cfg;
    cfg.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    auto common = [&](CLI::App* s) {
        s->add_option("--category", cfg.category, "builtin name or path to a category file")->capture_default_str();
        s->add_option("--objects", cfg.objects, "site object label, or a comma list repeated along the chain");
        s->add_option("--window", cfg.window, "window half-width k; sites -k..k")->check(CLI::PositiveNumber)->capture_default_str();
        s->add_option("--tol", cfg.tol, "tolerance")->check(CLI::PositiveNumber)->capture_default_str();
        s->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
        s->add_option("--emit", cfg.emit, "artifact set, comma separated");
        s->add_option("--out", cfg.out, "output directory")->capture_default_str();
        s->add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::PositiveNumber);
    };
    auto* v = app.add_subcommand("validate", "pentagon, unitarity and dimension checks of the category data");
    auto* ch = app.add_subcommand("chain", "interval algebras, half-line algebras, index and basic construction");
    auto* ce = app.add_subcommand("center", "tube algebra, center simples, regular half-braiding, S and T");
    auto* dh = app.add_subcommand("dhr", "DHR bimodules, localized bases, transporters, monodromy, modular data");
    auto* ck = app.add_subcommand("check", "condition report at windows k and k+1");
    auto* rp = app.add_subcommand("report", "validate, chain, center and check in one artifact");
    for (auto* s : {v, ch, ce, dh, ck, rp}) common(s);
    ck->add_flag("--all", cfg.all, "run every condition");
    ck->add_option("--conditions", cfg.conditions, "comma list of condition names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (*v) return cmd_validate(cfg);
        if (*ch) return cmd_chain(cfg);
        if (*ce) return cmd_center(cfg);
        if (*dh) return cmd_dhr(cfg);
        if (*ck) return cmd_check(cfg);
        if (*rp) return cmd_report(cfg);
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
