#include "fusionchain/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <unistd.h>

#ifndef FC_CLI_PATH
#define FC_CLI_PATH "fusionchain"
#endif

using namespace fc;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string g(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void run(int id, const std::string& title, const std::function<outcome()>& body) {
    auto t0 = clock_type::now();
    outcome r;
    try {
        r = body();
    } catch (const std::exception& e) {
        r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.pass) ++failures;
    std::printf("[%s] %2d %-32s %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", id, title.c_str(), r.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
}

std::vector<center_simple> simples_of(const category& cat, std::uint64_t seed = 0) {
    rng_t rng(seed);
    auto tube = make_tube_algebra(cat, rng);
    return center_simples(tube, rng);
}

// Tensor multiplicities by dynamic programming over fusion rules.
std::vector<long> dp_multiplicities(const category& cat, const word& w) {
    const int n = cat.rank();
    std::vector<long> v(n, 0);
    v[0] = 1;
    for (const auto& x : w) {
        std::vector<long> nv(n, 0);
        for (int a = 0; a < n; ++a) {
            if (!v[a]) continue;
            for (int b : x)
                for (int c = 0; c < n; ++c) nv[c] += v[a] * cat.N(a, b, c);
        }
        v = nv;
    }
    return v;
}

long square_sum(const std::vector<long>& m) {
    return std::accumulate(m.begin(), m.end(), 0L, [](long s, long x) { return s + x * x; });
}

// Best match of S against target under simultaneous relabeling and a global phase.
double relabeled_distance(const cmat& S, const cmat& target) {
    const int n = static_cast<int>(S.rows());
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    double best = 1e300;
    do {
        cmat P(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) P(i, j) = S(p[i], p[j]);
        cplx ph = P(0, 0) / std::abs(P(0, 0));
        best = std::min(best, (P / ph - target).cwiseAbs().maxCoeff());
    } while (std::next_permutation(p.begin(), p.end()));
    return best;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

int main() {
    const auto names = builtin_names();

    run(1, "category validation", [&] {
        outcome r{true, ""};
        double worst_p = 0, worst_u = 0, worst_t = 0;
        for (const auto& n : names) {
            auto t0 = clock_type::now();
            category cat = load_category(n);
            auto v = validate_category(cat, 1e-9);
            double t = seconds_since(t0);
            worst_p = std::max(worst_p, v.pentagon);
            worst_u = std::max(worst_u, v.unitarity);
            worst_t = std::max(worst_t, t);
            if (!(v.pentagon <= 1e-9 && v.unitarity <= 1e-9 && t < 5)) r.pass = false;
        }
        r.detail = std::to_string(names.size()) + " builtins, pentagon " + g(worst_p) + ", unitarity " + g(worst_u) +
                   ", slowest " + g(worst_t) + "s";
        return r;
    });

    run(2, "dimension oracles", [&] {
        category fib = load_category("fibonacci");
        int tau = fib.label_of("tau");
        auto alg = make_interval_algebra(make_chain(fib, 2, {{tau}}), -2, 1);
        long d4 = alg.dim;
        bool ok = d4 == 13 && square_sum(dp_multiplicities(fib, alg.w)) == 13;
        long words = 0, bad = 0;
        for (const auto& n : names) {
            category cat = load_category(n);
            chain_spec ch = make_chain(cat, 4);
            for (int a = ch.lo(); a <= ch.hi(); ++a)
                for (int b = a; b <= ch.hi(); ++b) {
                    ++words;
                    auto ia = make_interval_algebra(ch, a, b);
                    auto tb = basis_of(cat, ia.w);
                    long trees = 0;
                    for (int Y = 0; Y < cat.rank(); ++Y) trees += static_cast<long>(tb->dim(Y)) * tb->dim(Y);
                    if (ia.dim != square_sum(dp_multiplicities(cat, ia.w)) || trees != ia.dim) ++bad;
                }
        }
        return outcome{ok && bad == 0, "dim End(tau^4) = " + std::to_string(d4) + ", " + std::to_string(words - bad) + "/" +
                                           std::to_string(words) + " window words match"};
    });

    run(3, "transporter identities", [&] {
        auto t0 = clock_type::now();
        double worst = 0;
        long pairs = 0, sectors = 0, hidden = 0;
        for (const auto& n : names) {
            category cat = load_category(n);
            chain_spec ch = make_chain(cat, 4);
            auto simples = simples_of(cat);
            auto secs = dhr_sectors(simples, ch);
            for (const auto& s : secs) {
                ++sectors;
                if (s.M.dim() == 0) {
                    ++hidden;
                    continue;
                }
                const projective_basis* bs[3] = {&s.left, &s.mid, &s.right};
                for (int i = 0; i < 3; ++i)
                    for (int j = i + 1; j < 3; ++j) {
                        worst = std::max(worst, charge_transporters(s.M, *bs[i], *bs[j]).max_defect());
                        ++pairs;
                    }
            }
        }
        double t = seconds_since(t0);
        std::string d = std::to_string(sectors) + " sectors, " + std::to_string(pairs) + " localization pairs, max defect " + g(worst) +
                        ", " + g(t) + "s";
        if (hidden) d += ", " + std::to_string(hidden) + " sectors with F = 0";
        return outcome{worst <= 1e-9 && pairs >= 2 && t < 120, d};
    });

    run(4, "monodromy formula", [&] {
        double worst = 0;
        long pairs = 0;
        for (const char* n : {"vec_z2", "fibonacci"}) {
            category cat = load_category(n);
            chain_spec ch = make_chain(cat, 4);
            auto secs = dhr_sectors(simples_of(cat), ch);
            for (const auto& X : secs)
                for (const auto& Y : secs) {
                    auto m = dhr_monodromy(X.M, Y.M, X.left, Y.mid, X.right);
                    worst = std::max(worst, m.agreement);
                    ++pairs;
                }
        }
        return outcome{worst <= 1e-9, std::to_string(pairs) + " sector pairs, max entry difference " + g(worst)};
    });

    run(5, "regular half-braiding", [&] {
        bool ok = true;
        double worst = 0;
        long simples_checked = 0, trivial = 0, violations = 0;
        for (const auto& n : names) {
            category cat = load_category(n);
            center_object Z = regular_center_object(cat);
            rng_t rng(1);
            auto v = verify_half_braiding(Z, rng, 1e-8);
            worst = std::max({worst, v.unitarity, v.naturality, v.hexagon});
            ok = ok && v.pass;
            for (const auto& s : simples_of(cat)) {
                ++simples_checked;
                morphism m = monodromy(Z, s.obj);
                if (distance(m, morphism::identity(cat, m.src)) < 1e-8) {
                    ++trivial;
                    if (s.mult[0] != static_cast<int>(s.obj.z.size())) ++violations;
                }
            }
        }
        return outcome{ok && worst <= 1e-8 && violations == 0,
                       "max defect " + g(worst) + ", " + std::to_string(trivial) + "/" + std::to_string(simples_checked) +
                           " simples trivial against Zreg, " + std::to_string(violations) + " without unit underlying object"};
    });

    run(6, "modularity", [&] {
        auto t0 = clock_type::now();
        bool ok = true;
        std::string d;
        for (const char* n : {"vec_z2", "fibonacci"}) {
            category cat = load_category(n);
            auto simples = simples_of(cat);
            auto secs = dhr_sectors(simples, make_chain(cat, 4));
            auto md = dhr_modular_data(secs, simples);
            ok = ok && secs.size() == 4 && md.s_unitarity <= 1e-6 && md.tube_distance <= 1e-8;
            d += std::string(n) + " unitarity " + g(md.s_unitarity) + " tube " + g(md.tube_distance) + "; ";
            if (std::string(n) == "vec_z2") {
                cmat toric(4, 4);
                toric << 1, 1, 1, 1, 1, 1, -1, -1, 1, -1, 1, -1, 1, -1, -1, 1;
                toric *= 0.5;
                double e = relabeled_distance(md.S, toric);
                ok = ok && e <= 1e-8;
                d += "toric S distance " + g(e) + "; ";
            }
        }
        double t = seconds_since(t0);
        return outcome{ok && t < 300, d + g(t) + "s"};
    });

    run(7, "haag duality", [&] {
        bool ok = true;
        long points = 0;
        for (const auto& n : names) {
            category cat = load_category(n);
            for (int k : {4, 5}) {
                auto h = haag_duality(make_chain(cat, k));
                ok = ok && h.R == 0;
                for (const auto& p : h.points) {
                    ++points;
                    ok = ok && p.commutant_dim == p.local_dim;
                }
            }
        }
        return outcome{ok, std::to_string(points) + " intervals with commutant dim = local dim, R = 0"};
    });

    run(8, "local alignment", [&] {
        bool ok = true;
        std::string d;
        for (const char* n : {"vec_z2", "fibonacci"}) {
            category cat = load_category(n);
            rng_t rng(0);
            auto a = local_alignment(make_chain(cat, 3), rng);
            double def = std::max(a.centrality, a.isometry);
            ok = ok && def <= 1e-8 && a.b1_dim == a.f_dim && a.image_dim == a.f_dim && a.table_match;
            d += std::string(n) + " B1 " + std::to_string(a.b1_dim) + " F " + std::to_string(a.f_dim) + " image " +
                 std::to_string(a.image_dim) + " defect " + g(def) + "; ";
        }
        return outcome{ok, d};
    });

    run(9, "charge-transporter generation", [&] {
        bool ok = true;
        std::string d;
        for (const auto& n : names) {
            category cat = load_category(n);
            chain_spec ch = make_chain(cat, 3);
            auto simples = simples_of(cat);
            auto full = charge_transporter_generation(ch, simples);
            auto unit = charge_transporter_generation(ch, {simples[0]});
            ok = ok && full.span_dim == full.full_dim;
            // With a single center simple the unit already generates everything.
            if (simples.size() > 1) ok = ok && unit.span_dim < unit.full_dim;
            d += n + " " + std::to_string(full.span_dim) + "/" + std::to_string(full.full_dim) + " unit " + std::to_string(unit.span_dim) +
                 "; ";
        }
        return outcome{ok, d};
    });

    run(10, "LR recognition", [&] {
        bool ok = true;
        std::string d;
        category fib = load_category("fibonacci"), z2 = load_category("vec_z2");
        int tau = fib.label_of("tau"), gl = z2.label_of("g");
        struct probe {
            const category* cat;
            word Y;
            std::string name;
        };
        std::vector<probe> probes{{&fib, {{tau}}, "tau"}, {&fib, {{tau}, {tau}}, "tau tau"}, {&z2, {{gl}}, "g"}};
        for (const auto& p : probes)
            for (int k : {3, 4}) {
                auto r = lr_recognition(make_chain(*p.cat, k), p.Y);
                ok = ok && r.relative_commutant == r.end_dim;
                d += p.name + "@k" + std::to_string(k) + " " + std::to_string(r.relative_commutant) + "=" + std::to_string(r.end_dim) + "; ";
            }
        return outcome{ok, d};
    });

    run(11, "jones relation", [&] {
        bool ok = true;
        std::string d;
        for (const char* n : {"fibonacci", "vec_z2"}) {
            category cat = load_category(n);
            cut_frame f = window_frame(make_chain(cat, 3));
            rng_t rng(0);
            auto idx = watatani_index(f, rng);
            auto j = jones_basic_construction(f, rng);
            double ind_err = std::abs(j.index - idx.index);
            ok = ok && j.spanning && j.relation_defect <= 1e-10 && j.dual_defect <= 1e-8 && ind_err <= 1e-8 && idx.scalar_defect <= 1e-8;
            d += std::string(n) + " relation " + g(j.relation_defect) + " over " + std::to_string(j.spanning_checked) + (j.spanning ? "" : " sampled") +
                 ", dual " + g(j.dual_defect) + ", Ind " + g(idx.index) + "; ";
        }
        return outcome{ok, d};
    });

    run(12, "determinism", [&] {
        auto base = std::filesystem::temp_directory_path() / ("fc_acceptance_" + std::to_string(::getpid()));
        std::string file = "check-fibonacci-k3.json";
        std::string out[2];
        for (int i = 0; i < 2; ++i) {
            auto dir = base / std::to_string(i);
            std::filesystem::create_directories(dir);
            std::string cmd = std::string("\"") + FC_CLI_PATH + "\" check --all --category fibonacci --window 3 --seed 0 --out \"" +
                              dir.string() + "\" > /dev/null 2>&1";
            int rc = std::system(cmd.c_str());
            if (rc == -1) return outcome{false, "cannot run " + std::string(FC_CLI_PATH)};
            out[i] = slurp(dir / file);
        }
        std::filesystem::remove_all(base);
        bool ok = !out[0].empty() && out[0] == out[1];
        return outcome{ok, std::to_string(out[0].size()) + " bytes, " + (ok ? "identical" : "different")};
    });

    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
