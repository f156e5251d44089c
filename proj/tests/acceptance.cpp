// Acceptance run: one PASS/FAIL line per criterion. The q = 16 quintic scan
// only runs with --extended.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "cremona/bundle.hpp"
#include "cremona/classical_involutions.hpp"
#include "cremona/cli.hpp"
#include "cremona/error.hpp"
#include "cremona/linear_parity.hpp"
#include "cremona/quintic_scan.hpp"
#include "cremona/realization.hpp"

using namespace cremona;

namespace {

struct Check {
    bool ok = true;
    std::string note;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            note += (note.empty() ? "" : "; ") + what;
        }
    }
    void info(const std::string& what) { note += (note.empty() ? "" : "; ") + what; }
};

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1fs", s);
    return buf;
}

Check scan_criterion(std::uint64_t q, std::uint64_t expected, double limit_seconds) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    ScanOptions o;
    o.jobs = std::max(1u, std::thread::hardware_concurrency());
    const auto r = run_scan(make_field_of_order(q), o);
    const double s = seconds_since(start);
    c.expect(r.complete, "scan incomplete");
    c.expect(r.total.processed == expected, "processed " + std::to_string(r.total.processed));
    c.expect(r.total.odd == 0, std::to_string(r.total.odd) + " odd");
    c.expect(s < limit_seconds, "over the time target");
    c.info("q=" + std::to_string(q) + ": " + std::to_string(r.total.processed) + " processed, " +
           std::to_string(r.total.even) + " even, " + std::to_string(r.total.odd) + " odd, " +
           std::to_string(r.total.discard_kernel) + " kernel discards, " + fmt_seconds(s));
    return c;
}

Check criterion1() { return scan_criterion(4, 5797, 60); }

Check criterion2(bool extended) {
    Check c = scan_criterion(8, 304265, 30 * 60);
    if (extended) {
        const Check c16 = scan_criterion(16, 17965585, 1e9);
        c.ok = c.ok && c16.ok;
        c.info(c16.note);
    } else {
        c.info("q=16 skipped (pass --extended)");
    }
    return c;
}

Check criterion3() {
    Check c;
    for (std::uint64_t q : {3u, 5u, 7u, 9u}) {
        const auto f = make_field_of_order(q);
        const auto r = build_realization(f);
        const std::string tag = "q=" + std::to_string(q) + " ";
        c.expect(r.permutation.size() == q * q + q + 1, tag + "not a bijection of the plane");
        c.expect(r.fixed_points == q * q, tag + "fixed count");
        c.expect(r.c0_cycle_type == CycleType{{q + 1, 1}}, tag + "C0 not a (q+1)-cycle");
        c.expect(r.cycle_type == CycleType{{1, q * q}, {q + 1, 1}}, tag + "cycle type");
        c.expect(r.sign == -1, tag + "sign");
        c.expect(r.collinearity.has_value(), tag + "no witness");
    }
    return c;
}

Check criterion4() {
    Check c;
    const auto r2 = build_realization(make_field(2, 1));
    c.expect(r2.permutation.size() == 7, "q=2 not a bijection of 7 points");
    c.expect(r2.sign == -1, "q=2 sign");
    c.expect(r2.collinearity.has_value(), "q=2 no witness");
    for (std::uint64_t q : {4u, 8u}) {
        const auto f = make_field_of_order(q);
        const auto r = build_realization(f);
        c.expect(r.permutation.size() == q * q + q + 1, "q=" + std::to_string(q) + " not a bijection");
        c.expect(r.collinearity.has_value(), "q=" + std::to_string(q) + " no witness");
        const auto g = build_global_swap_realization(f);
        c.info("q=" + std::to_string(q) + " fiberwise swap " + cycle_type_string(r.cycle_type) +
               (g.collinearity ? "" : ", literal global swap gives a collineation"));
    }
    return c;
}

Check criterion5() {
    Check c;
    auto generators_even = [&](unsigned n, std::uint64_t q) {
        const auto f = make_field_of_order(q);
        const PointTable table(f, n);
        const auto [a, b] = waterhouse_generators(n, f);
        const std::string tag = "(n,q)=(" + std::to_string(n) + "," + std::to_string(q) + ") ";
        c.expect(linear_permutation(a, table).second.sign == 1, tag + "A_n odd");
        c.expect(linear_permutation(b, table).second.sign == 1, tag + "B_n odd");
        const auto t = linear_permutation(transvection_factor(n, f), table).second.counts;
        std::uint64_t qn = 1;
        for (unsigned i = 0; i < n; ++i) qn *= q;
        c.expect(t.count(2) && t.at(2) == qn / 2, tag + "T_n transposition count");
    };
    for (std::uint64_t q : {4u, 8u, 16u})
        for (unsigned n : {1u, 2u}) generators_even(n, q);
    generators_even(3, 4);
    const auto ex = pgl_exhaustive_parity(1, make_field(2, 3));
    c.expect(ex.examined == 504 && ex.all_even(), "PGL_2(F_8) exhaustive");
    const auto s = pgl_sample_parity(2, make_field(2, 2), 1000, 2024);
    c.expect(s.examined == 1000 && s.all_even(), "PGL_3(F_4) samples");
    c.info("PGL_2(F_8) " + std::to_string(ex.examined) + " even, 1000 samples of PGL_3(F_4) even");
    return c;
}

Check criterion6() {
    Check c;
    for (auto [n, q] : {std::pair<unsigned, std::uint64_t>{1, 4}, {1, 8}, {3, 4}}) {
        const auto b = bn_cycle_census(n, make_field_of_order(q));
        c.expect(b.match, "(n,q)=(" + std::to_string(n) + "," + std::to_string(q) + ") census mismatch");
        c.info("(" + std::to_string(n) + "," + std::to_string(q) + ") " + cycle_type_string(b.observed.counts));
    }
    return c;
}

Check criterion7() {
    Check c;
    for (std::uint64_t q : {4u, 8u, 16u}) {
        const auto f = make_field_of_order(q);
        std::size_t n = 0;
        for (const auto& m : enumerate_pgl(1, f)) {
            c.expect(cycle_constraint_check(m), "q=" + std::to_string(q) + " constraint fails");
            ++n;
        }
        c.info("q=" + std::to_string(q) + ": " + std::to_string(n) + " elements");
    }
    return c;
}

Check criterion8() {
    Check c;
    for (std::uint64_t q : {4u, 8u}) {
        const auto b = geiser_batch(make_field_of_order(q), 50, 1);
        const std::string tag = "GF(" + std::to_string(q) + ") ";
        c.expect(b.instances == 50 && b.involutions == 50, tag + "involution");
        c.expect(b.fixed_one_mod4 == 50, tag + "fixed count mod 4");
        c.expect(b.even == 50, tag + "parity");
        c.expect(b.count_one_mod_q == 50, tag + "point count mod q");
    }
    return c;
}

Check criterion9() {
    Check c;
    const auto b = bertini_batch(make_field(2, 2), 50, 1);
    c.expect(b.instances == 50 && b.involutions == 50, "involution");
    c.expect(b.base_point_fixed == 50, "base point");
    c.expect(b.fixed_one_mod4 == 50, "fixed count mod 4");
    c.expect(b.even == 50, "parity");
    c.info("deck map w -> w + a1 z + a3");
    return c;
}

Check criterion10() {
    Check c;
    struct Want {
        std::uint64_t q;
        std::size_t transpositions;
        int sign;
    };
    for (const auto& w : {Want{2, 3, -1}, Want{4, 10, 1}, Want{8, 36, 1}}) {
        const auto t = quadratic_transformation(make_field_of_order(w.q));
        const auto ct = t.census.permutation.cycle_type();
        const std::string tag = "q=" + std::to_string(w.q) + " ";
        c.expect(t.census.fixed == 1, tag + "fixed count");
        c.expect(ct == CycleType{{1, 1}, {2, w.transpositions}}, tag + "cycle type " + cycle_type_string(ct));
        c.expect(t.census.sign == w.sign, tag + "sign");
    }
    return c;
}

Check criterion11() {
    Check c;
    std::mt19937_64 rng(11);
    for (unsigned m : {2u, 3u}) {
        const auto f = make_field(2, m);
        std::size_t matched = 0;
        for (int i = 0; i < 1000; ++i) matched += bundle_total_permutation(random_bundle(f, rng), f).parity_match;
        c.expect(matched == 1000, "GF(" + std::to_string(f->cardinality()) + ") parity mismatch");
    }
    const auto cx = bundle_total_permutation(binary_counterexample_bundle(), make_field(2, 1));
    c.expect(cx.base_sign == 1 && cx.total_sign == -1, "GF(2) counterexample");

    const auto ell = elliptic_involution_bundle();
    const auto r = bundle_total_permutation(ell.bundle, ell.field);
    c.expect(r.total_sign == -1, "elliptic total not odd");
    // block k = the k-th point of every fiber
    const std::size_t fiber = r.fiber_offsets[1] - r.fiber_offsets[0];
    for (std::size_t k = 0; k < fiber; ++k) {
        std::size_t swaps = 0;
        for (std::size_t i = 0; i + 1 < r.fiber_offsets.size(); ++i) {
            const std::size_t x = r.fiber_offsets[i] + k;
            const std::size_t y = r.total(x);
            swaps += y != x && r.total(y) == x && (y - k) % fiber == 0 && x < y;
        }
        c.expect(swaps == 3, "block " + std::to_string(k) + " has " + std::to_string(swaps) + " transpositions");
    }
    return c;
}

Check criterion12() {
    Check c;
    std::size_t failures = 0, cases = 0;
    for (std::uint64_t q : {2u, 3u, 4u, 5u}) {
        const auto f = make_field_of_order(q);
        const PointTable line(f, 1);
        std::vector<std::pair<Point, Point>> pairs;
        for (std::size_t k = 0; k < 5; ++k)
            pairs.emplace_back(line.point_vec(k % line.size()), line.point_vec((3 * k + 1) % line.size()));
        for (unsigned n : {1u, 2u}) {
            const PointTable table(f, n);
            for (std::size_t i = 0; i < table.size(); ++i) {
                for (const auto& [p1, p2] : pairs) {
                    ++cases;
                    const auto h = interpolation_map(n, f, table.point(i), p1, p2);
                    for (std::size_t j = 0; j < table.size(); ++j) {
                        const auto v = h.evaluate(table.point(j));
                        failures += !v || *v != (i == j ? p1 : p2);
                    }
                }
            }
        }
    }
    c.expect(failures == 0, std::to_string(failures) + " failures");
    c.info(std::to_string(cases) + " interpolation maps");
    return c;
}

Check criterion13() {
    Check c;
    for (std::uint64_t q : {3u, 5u, 7u}) {
        const auto f = make_field_of_order(q);
        const Elem t = first_nonsquare(*f);
        std::size_t checked = 0;
        for (std::uint32_t a = 0; a < q; ++a) {
            for (std::uint32_t b = 0; b < q; ++b) {
                const Elem A{a}, B{b};
                if (f->sub(f->mul(A, A), f->mul(t, f->mul(B, B))) != f->one() || A == f->one()) continue;
                c.expect(multiplier_action_check(f, A, B), "q=" + std::to_string(q) + " mismatch");
                ++checked;
            }
        }
        c.expect(checked == q, "q=" + std::to_string(q) + " parameter count");
    }
    return c;
}

Check criterion14() {
    Check c;
    auto scan = [](std::vector<std::string> extra) {
        std::vector<std::string> args{"quintic", "scan", "--q", "4", "--block-size", "200", "--no-timing"};
        args.insert(args.end(), extra.begin(), extra.end());
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return std::make_pair(code, out.str());
    };
    const auto one = scan({"--jobs", "1"});
    const auto four = scan({"--jobs", "4"});
    c.expect(one.first == kExitOk, "scan failed");
    c.expect(one.second == four.second, "1 vs 4 workers differ");

    const auto path = (std::filesystem::temp_directory_path() / "cremona_acceptance.jsonl").string();
    ScanOptions part;
    part.block_size = 200;
    part.checkpoint = path;
    part.max_blocks = 11;
    const auto interrupted = run_scan(make_field(2, 2), part);
    c.expect(!interrupted.complete, "interrupted run finished");
    const auto resumed = scan({"--jobs", "4", "--checkpoint", path, "--resume"});
    c.expect(resumed.second == one.second, "resumed report differs");
    std::filesystem::remove(path);
    c.info("report " + std::to_string(one.second.size()) + " bytes");
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    bool extended = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--extended") == 0) {
            extended = true;
        } else {
            std::fprintf(stderr, "usage: %s [--extended]\n", argv[0]);
            return 2;
        }
    }
    const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
        {"quintic scan q=4", criterion1},
        {"quintic scan q=8", [extended] { return criterion2(extended); }},
        {"realization, odd q", criterion3},
        {"realization, characteristic 2", criterion4},
        {"PGL parity", criterion5},
        {"B_n cycle census", criterion6},
        {"2-power cycle constraint", criterion7},
        {"Geiser census", criterion8},
        {"Bertini census", criterion9},
        {"quadratic transformation", criterion10},
        {"bundle parity", criterion11},
        {"interpolation", criterion12},
        {"multiplier action", criterion13},
        {"determinism", criterion14},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        try {
            c = criteria[i].second();
        } catch (const std::exception& e) {
            c.ok = false;
            c.note = std::string("exception: ") + e.what();
        }
        failed += !c.ok;
        std::printf("%s %2zu %s%s%s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    c.note.empty() ? "" : ": ", c.note.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed ? 1 : 0;
}
