#include "cremona/cli.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "cremona/bundle.hpp"
#include "cremona/classical_involutions.hpp"
#include "cremona/error.hpp"
#include "cremona/linear_parity.hpp"
#include "cremona/quintic_scan.hpp"
#include "cremona/realization.hpp"

namespace cremona {

namespace {

using json = nlohmann::ordered_json;

struct Options {
    std::uint32_t p = 2;
    unsigned m = 1;
    std::uint64_t q = 0;
    unsigned n = 1;
    std::uint64_t sample = 0;
    std::uint64_t seed = 0;
    bool exhaustive = false;
    bool global_swap = false;
    std::uint64_t samples = 50;
    std::uint64_t trials = 1000;
    std::vector<unsigned> patterns;
    std::uint64_t block_size = 512;
    unsigned jobs = 1;
    std::string checkpoint;
    bool resume = false;
    std::string out;
    bool no_timing = false;
};

struct Result {
    json field = nullptr;
    json config = json::object();
    json tallies = json::object();
    std::vector<std::string> violations;
    std::optional<std::uint64_t> digest;  // replaces the hash of config
    std::string summary;

    void require(bool ok, const std::string& what) {
        if (!ok) violations.push_back(what);
    }
};

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

json field_json(const Field& f) {
    return {{"p", f.characteristic()}, {"m", f.degree()}, {"q", f.cardinality()}, {"modulus", f.modulus()}};
}

json cycles_json(const CycleType& ct) {
    json a = json::array();
    for (const auto& [len, count] : ct) a.push_back({len, count});
    return a;
}

json point_json(std::span<const Elem> p) {
    json a = json::array();
    for (const Elem x : p) a.push_back(x.v);
    return a;
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c).v);
        rows.push_back(row);
    }
    return rows;
}

bool even_q_at_least_4(const Field& f) { return f.characteristic() == 2 && f.cardinality() >= 4; }

Result field_info(const Options& o) {
    Result r;
    const auto f = make_field(o.p, o.m);
    r.config = {{"p", o.p}, {"m", o.m}};
    r.field = field_json(*f);
    json factors = json::array();
    for (const auto& pp : f->factored_order()) factors.push_back({pp.prime, pp.exponent});
    r.tallies = {{"conway_modulus", f->conway_modulus()},
                 {"primitive_element", f->primitive_element().v},
                 {"primitive_element_poly", f->to_string(f->primitive_element())},
                 {"order_factorization", factors}};
    r.summary = f->describe();
    return r;
}

Result realize(const Options& o) {
    Result r;
    const auto f = make_field_of_order(o.q);
    r.config = {{"q", o.q}, {"global_swap", o.global_swap}};
    r.field = field_json(*f);
    const bool odd = f->characteristic() != 2;
    if (odd && o.global_swap) fail(ErrorCode::InvalidParameters, "--global-swap applies to characteristic 2");
    const auto rep = o.global_swap ? build_global_swap_realization(f) : build_realization(f);
    const PointTable plane(f, 2);
    const std::uint64_t q = o.q;

    json witness = nullptr;
    if (rep.collinearity) {
        json pts = json::array(), imgs = json::array();
        for (unsigned i = 0; i < 3; ++i) {
            pts.push_back(point_json(plane.point(rep.collinearity->points[i])));
            imgs.push_back(point_json(plane.point(rep.collinearity->images[i])));
        }
        witness = {{"points", pts}, {"images", imgs}};
    }
    r.tallies = {{"construction", odd ? "multiplier" : (o.global_swap ? "global_swap" : "fiberwise_swap")},
                 {"points", plane.size()},
                 {"bijection", rep.permutation.size() == plane.size()},
                 {"sign", rep.sign},
                 {"fixed_points", rep.fixed_points},
                 {"cycle_type", cycles_json(rep.cycle_type)},
                 {"c0_points", rep.c0_points.size()},
                 {"c0_cycle_type", cycles_json(rep.c0_cycle_type)},
                 {"collinearity_witness", witness}};
    if (odd) {
        r.tallies["alpha"] = rep.alpha.v;
        r.tallies["beta"] = rep.beta.v;
        r.require(rep.fixed_points == q * q, "fixed point count differs from q^2");
        r.require(rep.c0_cycle_type == CycleType{{q + 1, 1}}, "image of C0 is not a single (q+1)-cycle");
        r.require(rep.sign == -1, "sign is not -1");
    } else if (q == 2) {
        r.require(rep.sign == -1, "sign is not -1 over GF(2)");
    }
    r.require(rep.collinearity.has_value(), "no collinearity witness: the map acts as a collineation");
    r.summary = "realize q=" + std::to_string(q) + ": sign " + std::to_string(rep.sign) + ", cycle type " +
                cycle_type_string(rep.cycle_type);
    return r;
}

Result pgl_parity(const Options& o) {
    Result r;
    const auto f = make_field_of_order(o.q);
    r.field = field_json(*f);
    const bool asserted = even_q_at_least_4(*f);
    if (o.exhaustive) {
        r.config = {{"q", o.q}, {"n", o.n}, {"mode", "exhaustive"}};
        const PointTable table(f, o.n);
        std::size_t examined = 0, odd = 0;
        json odd_elements = json::array();
        for (const auto& m : enumerate_pgl(o.n, f)) {
            ++examined;
            if (linear_permutation(m, table).second.sign < 0) {
                ++odd;
                if (odd_elements.size() < 64) odd_elements.push_back(matrix_json(m.matrix));
            }
        }
        r.tallies = {{"examined", examined}, {"odd", odd}, {"odd_elements", odd_elements}};
        if (asserted) r.require(odd == 0, std::to_string(odd) + " odd elements");
        r.summary = "PGL exhaustive: " + std::to_string(examined) + " elements, " + std::to_string(odd) + " odd";
    } else {
        r.config = {{"q", o.q}, {"n", o.n}, {"mode", "sample"}, {"sample", o.sample}, {"seed", o.seed}};
        const auto v = pgl_sample_parity(o.n, f, o.sample, o.seed);
        r.tallies = {{"examined", v.examined},
                     {"odd", v.odd},
                     {"first_odd", v.first_odd ? matrix_json(*v.first_odd) : json(nullptr)}};
        if (asserted) r.require(v.all_even(), std::to_string(v.odd) + " odd samples");
        r.summary = "PGL sample: " + std::to_string(v.examined) + " elements, " + std::to_string(v.odd) + " odd";
    }
    r.tallies["contract_asserted"] = asserted;
    return r;
}

Result bn_census(const Options& o) {
    Result r;
    const auto f = make_field_of_order(o.q);
    r.config = {{"q", o.q}, {"n", o.n}};
    r.field = field_json(*f);
    const auto c = bn_cycle_census(o.n, f);
    r.tallies = {{"odd_part", c.odd_part},
                 {"two_adic", c.two_adic},
                 {"observed", cycles_json(c.observed.counts)},
                 {"predicted", cycles_json(c.predicted.counts)},
                 {"observed_sign", c.observed.sign},
                 {"match", c.match}};
    r.require(c.match, "observed census differs from the prediction");
    r.summary = "B_n census: observed " + cycle_type_string(c.observed.counts) + ", predicted " +
                cycle_type_string(c.predicted.counts);
    return r;
}

Result quadratic(const Options& o) {
    Result r;
    const auto f = make_field_of_order(o.q);
    r.config = {{"q", o.q}};
    r.field = field_json(*f);
    const auto t = quadratic_transformation(f);
    const auto& ct = t.census.permutation.cycle_type();
    const std::size_t transpositions = ct.count(2) ? ct.at(2) : 0;
    json comps = json::array();
    for (const auto& c : t.map.components()) comps.push_back(c.to_string());
    json base = json::array();
    for (const auto& b : t.base_points) base.push_back(point_json(b));
    r.tallies = {{"components", comps},
                 {"base_points", base},
                 {"fixed_point", point_json(t.fixed_point)},
                 {"points", t.census.points},
                 {"fixed", t.census.fixed},
                 {"transpositions", transpositions},
                 {"cycle_type", cycles_json(ct)},
                 {"sign", t.census.sign},
                 {"involution", t.census.involution}};
    const std::uint64_t q = o.q;
    r.require(t.census.involution, "not an involution");
    r.require(t.census.fixed == 1, "fixed point count is not 1");
    r.require(transpositions == (q * q + q) / 2, "transposition count is not (q^2+q)/2");
    r.require(t.census.sign == (q == 2 ? -1 : 1), "unexpected sign");
    r.summary = "quadratic q=" + std::to_string(q) + ": " + std::to_string(transpositions) + " transpositions, sign " +
                std::to_string(t.census.sign);
    return r;
}

Result involution_batch(const Options& o, bool bertini) {
    Result r;
    const auto f = make_field_of_order(o.q);
    r.config = {{"q", o.q}, {"samples", o.samples}, {"seed", o.seed}};
    r.field = field_json(*f);
    const auto b = bertini ? bertini_batch(f, o.samples, o.seed) : geiser_batch(f, o.samples, o.seed);
    std::map<std::size_t, std::size_t> fixed_hist, points_hist;
    for (const auto& c : b.censuses) {
        ++fixed_hist[c.fixed];
        ++points_hist[c.points];
    }
    json fh = json::array(), ph = json::array();
    for (const auto& [k, v] : fixed_hist) fh.push_back({k, v});
    for (const auto& [k, v] : points_hist) ph.push_back({k, v});
    r.tallies = {{"instances", b.instances},
                 {"involutions", b.involutions},
                 {"fixed_one_mod4", b.fixed_one_mod4},
                 {"even", b.even},
                 {"count_one_mod_q", b.count_one_mod_q},
                 {"fixed_histogram", fh},
                 {"point_count_histogram", ph}};
    if (bertini) r.tallies["base_point_fixed"] = b.base_point_fixed;
    r.require(b.involutions == b.instances, "an instance failed the involution check");
    if (even_q_at_least_4(*f)) {
        r.require(b.fixed_one_mod4 == b.instances, "fixed count not 1 mod 4");
        r.require(b.even == b.instances, "odd involution");
        r.require(b.count_one_mod_q == b.instances, "point count not 1 mod q");
        if (bertini) r.require(b.base_point_fixed == b.instances, "base point moved");
    }
    r.tallies["contract_asserted"] = even_q_at_least_4(*f);
    r.summary = std::string(bertini ? "bertini" : "geiser") + ": " + std::to_string(b.even) + "/" +
                std::to_string(b.instances) + " even";
    return r;
}

Result bundles(const Options& o) {
    Result r;
    const auto f = make_field_of_order(o.q);
    r.config = {{"q", o.q}, {"trials", o.trials}, {"seed", o.seed}};
    r.field = field_json(*f);
    std::mt19937_64 rng(o.seed);
    std::size_t matched = 0, odd_base = 0;
    for (std::uint64_t i = 0; i < o.trials; ++i) {
        const auto rep = bundle_total_permutation(random_bundle(f, rng), f);
        matched += rep.parity_match;
        odd_base += rep.base_sign < 0;
    }
    const auto cx = bundle_total_permutation(binary_counterexample_bundle(), make_field(2, 1));
    const auto ell = elliptic_involution_bundle();
    const auto er = bundle_total_permutation(ell.bundle, ell.field);
    r.tallies = {{"trials", o.trials},
                 {"parity_match", matched},
                 {"odd_base", odd_base},
                 {"binary_counterexample", {{"base_sign", cx.base_sign}, {"total_sign", cx.total_sign}}},
                 {"elliptic_example",
                  {{"curve_points", ell.curve_points.size()},
                   {"base_cycle_type", cycles_json(ell.bundle.base.cycle_type())},
                   {"total_cycle_type", cycles_json(er.total.cycle_type())},
                   {"total_sign", er.total_sign}}}};
    if (even_q_at_least_4(*f)) r.require(matched == o.trials, "a bundle changed parity");
    r.require(cx.base_sign == 1 && cx.total_sign == -1, "GF(2) counterexample did not reproduce");
    r.require(er.total_sign == -1, "elliptic example is not odd");
    r.tallies["contract_asserted"] = even_q_at_least_4(*f);
    r.summary = "bundles: " + std::to_string(matched) + "/" + std::to_string(o.trials) + " parity matches";
    return r;
}

json tally_json(const PatternTally& t) {
    return {{"pattern", t.pattern},
            {"expected", t.expected},
            {"processed", t.processed},
            {"even", t.even},
            {"odd", t.odd},
            {"discard_degree", t.discard_degree},
            {"discard_kernel", t.discard_kernel},
            {"discard_base", t.discard_base},
            {"discard_noninjective", t.discard_noninjective}};
}

Result quintic_scan(const Options& o) {
    Result r;
    const auto f = make_field_of_order(o.q);
    r.field = field_json(*f);
    ScanOptions so;
    so.patterns = o.patterns;
    so.block_size = o.block_size;
    so.jobs = o.jobs;
    so.checkpoint = o.checkpoint;
    so.resume = o.resume;
    const auto rep = run_scan(f, so);
    r.config = {{"q", o.q}, {"patterns", rep.patterns}, {"block_size", rep.block_size}};
    r.digest = rep.config_digest;
    json per = json::array();
    for (const auto& t : rep.tallies) per.push_back(tally_json(t));
    json total = tally_json(rep.total);
    total.erase("pattern");
    r.tallies = {{"total", total},
                 {"patterns", per},
                 {"blocks_total", rep.blocks_total},
                 {"blocks_done", rep.blocks_done},
                 {"complete", rep.complete},
                 {"cursor", rep.cursor ? json{{"pattern", rep.cursor->first}, {"offset", rep.cursor->second}}
                                       : json(nullptr)}};
    if (even_q_at_least_4(*f)) r.require(rep.total.odd == 0, std::to_string(rep.total.odd) + " odd quintic transformations");
    for (const auto& t : rep.tallies)
        if (rep.complete) r.require(t.processed == t.expected, "pattern " + std::to_string(t.pattern) + " incomplete");
    r.summary = "quintic scan q=" + std::to_string(o.q) + ": " + std::to_string(rep.total.processed) + " processed, " +
                std::to_string(rep.total.even) + " even, " + std::to_string(rep.total.odd) + " odd" +
                (rep.resumed_blocks ? ", " + std::to_string(rep.resumed_blocks) + " blocks from checkpoint" : "");
    return r;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Finite-field Cremona transformation workbench"};
    app.require_subcommand(1);
    app.fallthrough();  // --out and --no-timing may follow the subcommand
    app.add_option("--out", o.out, "Write the JSON report to this file");
    app.add_flag("--no-timing", o.no_timing, "Report runtime_ms as null (byte-stable output)");

    std::string command;
    std::function<Result(const Options&)> handler;
    auto bind = [&](CLI::App* sub, std::string name, std::function<Result(const Options&)> h) {
        sub->callback([&command, &handler, name = std::move(name), h = std::move(h)] {
            command = name;
            handler = h;
        });
    };

    auto* field = app.add_subcommand("field", "Field descriptors")->require_subcommand(1);
    auto* info = field->add_subcommand("info", "Describe GF(p^m)");
    info->add_option("--p", o.p, "Characteristic")->required();
    info->add_option("--m", o.m, "Degree")->required();
    bind(info, "field info", field_info);

    auto* realize_cmd = app.add_subcommand("realize", "Odd-permutation realization through the quadric");
    realize_cmd->add_option("--q", o.q, "Field order")->required();
    realize_cmd->add_flag("--global-swap", o.global_swap, "Characteristic 2: swap the rulings on the whole quadric");
    bind(realize_cmd, "realize", realize);

    auto* pgl = app.add_subcommand("pgl", "Projective linear group")->require_subcommand(1);
    auto* parity = pgl->add_subcommand("parity", "Sign of PGL elements on P^n");
    parity->add_option("--q", o.q, "Field order")->required();
    parity->add_option("--n", o.n, "Dimension")->required();
    auto* sample_opt = parity->add_option("--sample", o.sample, "Number of random elements");
    parity->add_option("--seed", o.seed, "Sampling seed");
    auto* exh = parity->add_flag("--exhaustive", o.exhaustive, "Enumerate the whole group");
    sample_opt->excludes(exh);
    parity->callback([&] {
        if (!o.exhaustive && o.sample == 0) throw CLI::ValidationError("pgl parity", "give --sample C or --exhaustive");
        command = "pgl parity";
        handler = pgl_parity;
    });

    auto* bn = app.add_subcommand("bn", "Coordinate cycle census")->require_subcommand(1);
    auto* census = bn->add_subcommand("census", "Census of B_n against the prediction");
    census->add_option("--q", o.q, "Field order")->required();
    census->add_option("--n", o.n, "Dimension")->required();
    bind(census, "bn census", bn_census);

    auto* quad = app.add_subcommand("quadratic", "Quadratic transformation with a degree-3 base orbit");
    quad->add_option("--q", o.q, "Field order")->required();
    bind(quad, "quadratic", quadratic);

    for (const bool bertini : {false, true}) {
        auto* sub = app.add_subcommand(bertini ? "bertini" : "geiser",
                                       bertini ? "Bertini involutions on degree 1 surfaces"
                                               : "Geiser involutions on degree 2 surfaces");
        sub->add_option("--q", o.q, "Field order")->required();
        sub->add_option("--samples", o.samples, "Number of random surfaces");
        sub->add_option("--seed", o.seed, "Sampling seed");
        bind(sub, bertini ? "bertini" : "geiser", [bertini](const Options& opt) { return involution_batch(opt, bertini); });
    }

    auto* bund = app.add_subcommand("bundles", "Parity of random bundles over finite sets");
    bund->add_option("--q", o.q, "Field order")->required();
    bund->add_option("--trials", o.trials, "Number of random bundles");
    bund->add_option("--seed", o.seed, "Sampling seed");
    bind(bund, "bundles", bundles);

    auto* quintic = app.add_subcommand("quintic", "Quintic transformations")->require_subcommand(1);
    auto* scan = quintic->add_subcommand("scan", "Enumerate degree-6 base orbits and tally signs");
    scan->add_option("--q", o.q, "Field order (2^m)")->required();
    scan->add_option("--patterns", o.patterns, "Echelon patterns 1..10")->delimiter(',');
    scan->add_option("--block-size", o.block_size, "Candidates per work unit");
    scan->add_option("--jobs", o.jobs, "Worker threads")->envname("CREMONA_LAB_JOBS");
    scan->add_option("--checkpoint", o.checkpoint, "JSONL checkpoint file");
    scan->add_flag("--resume", o.resume, "Continue from the checkpoint");
    bind(scan, "quintic scan", quintic_scan);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    Result res;
    try {
        res = handler(o);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::InvariantViolation ? kExitViolation : kExitUsage;
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    json config = json{{"command", command}};
    config.update(res.config);
    json report = {{"schema", 1},
                   {"command", command},
                   {"field", res.field},
                   {"config", config},
                   {"tallies", res.tallies},
                   {"verdict", res.violations.empty() ? "pass" : "violation"},
                   {"violations", res.violations},
                   {"runtime_ms", o.no_timing ? json(nullptr) : json(static_cast<std::int64_t>(ms))},
                   {"config_digest", digest_hex(res.digest ? *res.digest : fnv1a(config.dump()))}};
    const std::string text = report.dump(2) + "\n";
    if (o.out.empty()) {
        out << text;
    } else {
        std::ofstream f(o.out);
        if (!f) {
            err << "error: cannot write " << o.out << '\n';
            return kExitUsage;
        }
        f << text;
    }
    err << res.summary << (res.violations.empty() ? "" : " [violation]") << '\n';
    return res.violations.empty() ? kExitOk : kExitViolation;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"cremona-lab"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace cremona
