#include "cremona/quintic_scan.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "cremona/error.hpp"
#include "cremona/linalg.hpp"

namespace cremona {

ScanBasis::ScanBasis(FieldPtr base) : base_(std::move(base)) {
    if (base_->characteristic() != 2) fail(ErrorCode::OddCharacteristic, "the quintic scan is for q = 2^m");
    ext_ = make_field(2, kScanDegree * base_->degree());
    emb_ = std::make_unique<SubfieldEmbedding>(base_, ext_);
    const Elem a = ext_->primitive_element();
    Elem x = ext_->one();
    for (unsigned i = 0; i < kScanDegree; ++i) {
        powers_.push_back(x);
        x = ext_->mul(x, a);
    }
    coords_ = std::make_unique<RelativeBasis>(*emb_, powers_);
    if (!coords_->spans_target()) fail(ErrorCode::InvariantViolation, "powers of the generator are dependent");
}

std::array<Elem, kScanDegree> ScanBasis::expand(Elem y) const {
    std::array<Elem, kScanDegree> out{};
    if (!coords_->coordinates_into(y, out)) fail(ErrorCode::InvariantViolation, "power basis does not span");
    return out;
}

Elem ScanBasis::contract(std::span<const Elem> coords) const {
    if (coords.size() != kScanDegree) fail(ErrorCode::LengthMismatch, "need six coordinates");
    return coords_->combine(coords);
}

std::uint64_t EchelonPattern::size(std::uint64_t q) const {
    std::uint64_t n = 1;
    for (std::size_t i = 0; i < free.size(); ++i) n *= q;
    return n;
}

const std::vector<EchelonPattern>& enumerate_patterns() {
    static const std::vector<EchelonPattern> patterns = [] {
        std::vector<EchelonPattern> out;
        for (unsigned j = 1; j < kScanDegree; ++j) {
            for (unsigned k = j + 1; k < kScanDegree; ++k) {
                EchelonPattern p;
                p.id = static_cast<unsigned>(out.size()) + 1;
                p.j = j;
                p.k = k;
                for (unsigned c = j + 1; c < kScanDegree; ++c)
                    if (c != k) p.free.emplace_back(1, c);
                for (unsigned c = k + 1; c < kScanDegree; ++c) p.free.emplace_back(2, c);
                out.push_back(std::move(p));
            }
        }
        return out;
    }();
    return patterns;
}

std::uint64_t candidate_total(std::uint64_t q) {
    const std::uint64_t q2 = q * q, q3 = q2 * q, q4 = q3 * q;
    return q4 * q2 + q4 * q + 2 * q4 + 2 * q3 + 2 * q2 + q + 1;
}

std::vector<Elem> free_values_at(const EchelonPattern& pattern, std::uint64_t q, std::uint64_t offset) {
    if (offset >= pattern.size(q)) fail(ErrorCode::InvalidParameters, "offset outside the pattern");
    std::vector<Elem> out(pattern.free_count());
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = Elem{static_cast<std::uint32_t>(offset % q)};
        offset /= q;
    }
    return out;
}

Point candidate_point(const ScanBasis& basis, const EchelonPattern& pattern, std::span<const Elem> free_values) {
    if (free_values.size() != pattern.free_count()) fail(ErrorCode::LengthMismatch, "wrong number of free entries");
    std::array<std::array<Elem, kScanDegree>, 2> rows{};
    const Elem one = basis.base()->one();
    rows[0][pattern.j] = one;
    rows[1][pattern.k] = one;
    for (std::size_t i = 0; i < free_values.size(); ++i) {
        const auto [r, c] = pattern.free[i];
        rows[r - 1][c] = free_values[i];
    }
    return {basis.extension()->one(), basis.contract(rows[0]), basis.contract(rows[1])};
}

unsigned orbit_degree(const ScanBasis& basis, std::span<const Elem> point) {
    const Point p = normalize(*basis.extension(), point);
    for (unsigned d : {1u, 2u, 3u}) {
        bool fixed = true;
        for (const Elem x : p) fixed = fixed && basis.embedding().relative_frobenius(x, d) == x;
        if (fixed) return d;
    }
    return kScanDegree;
}

const std::vector<std::vector<unsigned>>& quintic_monomials() {
    static const auto monos = monomials_of_degree(3, 5);
    return monos;
}

SingularityKernel singularity_kernel(const ScanBasis& basis, std::span<const Elem> point) {
    if (point.size() != 3) fail(ErrorCode::DimensionMismatch, "points of P^2 have three coordinates");
    const Field& e = *basis.extension();
    std::array<std::array<Elem, 6>, 3> pw{};
    for (unsigned v = 0; v < 3; ++v) {
        pw[v][0] = e.one();
        for (unsigned i = 1; i < 6; ++i) pw[v][i] = e.mul(pw[v][i - 1], point[v]);
    }
    const auto& monos = quintic_monomials();
    Matrix m(4 * kScanDegree, kQuinticMonomials);
    for (std::size_t col = 0; col < monos.size(); ++col) {
        const auto& ex = monos[col];
        // conditions: d/dx, d/dy, d/dz, value
        for (unsigned cond = 0; cond < 4; ++cond) {
            Elem val = e.one();
            for (unsigned v = 0; v < 3; ++v) {
                unsigned d = ex[v];
                if (cond == v) {
                    if (d == 0) {
                        val = e.zero();
                        break;
                    }
                    val = e.mul(val, e.from_integer(d));
                    --d;
                }
                val = e.mul(val, pw[v][d]);
            }
            const auto c = basis.expand(val);
            for (unsigned i = 0; i < kScanDegree; ++i) m(cond * kScanDegree + i, col) = c[i];
        }
    }
    SingularityKernel out;
    out.basis = nullspace(*basis.base(), m);
    out.dimension = out.basis.size();
    return out;
}

Polynomial quintic_from_coefficients(const FieldPtr& field, std::span<const Elem> coeffs) {
    if (coeffs.size() != kQuinticMonomials) fail(ErrorCode::LengthMismatch, "a plane quintic has 21 coefficients");
    Polynomial f(field, 3);
    const auto& monos = quintic_monomials();
    for (std::size_t i = 0; i < coeffs.size(); ++i) f.add_term(monos[i], coeffs[i]);
    return f;
}

std::string_view outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Even: return "even";
        case Outcome::Odd: return "odd";
        case Outcome::DiscardDegree: return "discard_degree";
        case Outcome::DiscardKernel: return "discard_kernel";
        case Outcome::DiscardBasePoint: return "discard_base";
        case Outcome::DiscardNonInjective: return "discard_noninjective";
    }
    return "?";
}

Classification classify_candidate(const std::vector<Polynomial>& components, const PointTable& table) {
    if (components.size() != 3 || table.dimension() != 2) fail(ErrorCode::DimensionMismatch, "need a plane map");
    Classification out;
    std::vector<std::uint32_t> img(table.size());
    std::vector<bool> hit(table.size());
    Point v(3);
    for (std::size_t i = 0; i < table.size(); ++i) {
        for (unsigned s = 0; s < 3; ++s) v[s] = components[s].eval(table.point(i));
        if (v[0].v == 0 && v[1].v == 0 && v[2].v == 0) {
            out.outcome = Outcome::DiscardBasePoint;
            return out;
        }
        img[i] = static_cast<std::uint32_t>(table.index_of(v));
    }
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (hit[img[i]]) {
            out.outcome = Outcome::DiscardNonInjective;
            return out;
        }
        hit[img[i]] = true;
    }
    out.permutation = Permutation(std::move(img));
    out.outcome = out.permutation->sign() < 0 ? Outcome::Odd : Outcome::Even;
    return out;
}

QuinticCandidate examine_candidate(const ScanBasis& basis, const PointTable& table, const EchelonPattern& pattern,
                                   std::uint64_t offset) {
    QuinticCandidate c;
    c.pattern = pattern.id;
    c.offset = offset;
    c.free_values = free_values_at(pattern, basis.base()->cardinality(), offset);
    c.point = candidate_point(basis, pattern, c.free_values);
    c.degree = orbit_degree(basis, c.point);
    if (c.degree != kScanDegree) {
        c.outcome = Outcome::DiscardDegree;
        return c;
    }
    const auto kernel = singularity_kernel(basis, c.point);
    c.kernel_dimension = kernel.dimension;
    if (kernel.dimension != 3) {
        c.outcome = Outcome::DiscardKernel;
        return c;
    }
    std::vector<Polynomial> comps;
    for (const auto& k : kernel.basis) comps.push_back(quintic_from_coefficients(basis.base(), k));
    auto cls = classify_candidate(comps, table);
    c.outcome = cls.outcome;
    c.permutation = std::move(cls.permutation);
    return c;
}

void PatternTally::record(Outcome o) {
    ++processed;
    switch (o) {
        case Outcome::Even: ++even; break;
        case Outcome::Odd: ++odd; break;
        case Outcome::DiscardDegree: ++discard_degree; break;
        case Outcome::DiscardKernel: ++discard_kernel; break;
        case Outcome::DiscardBasePoint: ++discard_base; break;
        case Outcome::DiscardNonInjective: ++discard_noninjective; break;
    }
}

PatternTally& PatternTally::operator+=(const PatternTally& o) {
    processed += o.processed;
    even += o.even;
    odd += o.odd;
    discard_degree += o.discard_degree;
    discard_kernel += o.discard_kernel;
    discard_base += o.discard_base;
    discard_noninjective += o.discard_noninjective;
    return *this;
}

std::uint64_t scan_config_digest(std::uint64_t q, const std::vector<unsigned>& patterns, std::uint64_t block_size) {
    std::string s = "quintic-scan;q=" + std::to_string(q) + ";patterns=";
    for (unsigned p : patterns) s += std::to_string(p) + ",";
    s += ";block=" + std::to_string(block_size);
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string digest_hex(std::uint64_t digest) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
    return buf;
}

namespace {

// Hot path shared by all workers: monomial values at every rational point and
// a direct plane index, so a candidate costs one 24 x 21 elimination plus
// 3 * 21 products per point.
class ScanContext {
public:
    ScanContext(const ScanBasis& basis, const PointTable& table) : basis_(basis), table_(table), f_(*basis.base()) {
        const auto& monos = quintic_monomials();
        values_.resize(table.size() * kQuinticMonomials);
        for (std::size_t i = 0; i < table.size(); ++i) {
            const auto p = table.point(i);
            for (std::size_t m = 0; m < monos.size(); ++m) {
                Elem v = f_.one();
                for (unsigned k = 0; k < 3; ++k) v = f_.mul(v, f_.pow(p[k], monos[m][k]));
                values_[i * kQuinticMonomials + m] = v;
            }
            if (plane_index(p) != i) fail(ErrorCode::InvariantViolation, "plane index disagrees with the table");
        }
    }

    Outcome classify(const EchelonPattern& pattern, std::uint64_t offset, std::vector<std::uint32_t>& img,
                     std::vector<std::uint8_t>& seen) const {
        const auto fv = free_values_at(pattern, f_.cardinality(), offset);
        const Point pt = candidate_point(basis_, pattern, fv);
        // rank 3 keeps the conjugates off every rational line
        Matrix mp(3, kScanDegree);
        for (unsigned r = 0; r < 3; ++r) {
            const auto c = basis_.expand(pt[r]);
            for (unsigned i = 0; i < kScanDegree; ++i) mp(r, i) = c[i];
        }
        if (rank(f_, mp) != 3) fail(ErrorCode::InvariantViolation, "candidate matrix lost rank");
        if (orbit_degree(basis_, pt) != kScanDegree) return Outcome::DiscardDegree;
        const auto kernel = singularity_kernel(basis_, pt);
        if (kernel.dimension != 3) return Outcome::DiscardKernel;

        const std::size_t n = table_.size();
        img.assign(n, 0);
        seen.assign(n, 0);
        std::array<Elem, 3> v{};
        for (std::size_t i = 0; i < n; ++i) {
            const Elem* mv = &values_[i * kQuinticMonomials];
            for (unsigned s = 0; s < 3; ++s) {
                Elem acc{};
                const auto& k = kernel.basis[s];
                for (std::size_t m = 0; m < kQuinticMonomials; ++m)
                    if (k[m].v) acc = f_.add(acc, f_.mul(k[m], mv[m]));
                v[s] = acc;
            }
            if (v[0].v == 0 && v[1].v == 0 && v[2].v == 0) return Outcome::DiscardBasePoint;
            const std::size_t j = plane_index(v);
            if (seen[j]) return Outcome::DiscardNonInjective;
            seen[j] = 1;
            img[i] = static_cast<std::uint32_t>(j);
        }
        // sign from the cycle count
        std::fill(seen.begin(), seen.end(), 0);
        std::size_t cycles = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (seen[i]) continue;
            ++cycles;
            for (std::size_t j = i; !seen[j]; j = img[j]) seen[j] = 1;
        }
        return (n - cycles) % 2 ? Outcome::Odd : Outcome::Even;
    }

private:
    std::size_t plane_index(std::span<const Elem> p) const {
        const std::uint64_t q = f_.cardinality();
        if (p[0].v) {
            const Elem s = f_.inv(p[0]);
            return 1 + q + f_.mul(p[1], s).v * q + f_.mul(p[2], s).v;
        }
        if (p[1].v) return 1 + f_.div(p[2], p[1]).v;
        return 0;
    }

    const ScanBasis& basis_;
    const PointTable& table_;
    const Field& f_;
    std::vector<Elem> values_;
};

struct Block {
    std::size_t pattern_slot = 0;
    std::uint64_t offset = 0;
    std::uint64_t count = 0;
};

nlohmann::json tally_record(const PatternTally& t, std::uint64_t offset, std::uint64_t digest) {
    return {{"pattern", t.pattern},
            {"offset", offset},
            {"processed", t.processed},
            {"even", t.even},
            {"odd", t.odd},
            {"discard_degree", t.discard_degree},
            {"discard_kernel", t.discard_kernel},
            {"discard_base", t.discard_base},
            {"discard_noninjective", t.discard_noninjective},
            {"digest", digest_hex(digest)}};
}

PatternTally tally_from_record(const nlohmann::json& j) {
    PatternTally t;
    t.pattern = j.at("pattern").get<unsigned>();
    t.processed = j.at("processed").get<std::uint64_t>();
    t.even = j.at("even").get<std::uint64_t>();
    t.odd = j.at("odd").get<std::uint64_t>();
    t.discard_degree = j.at("discard_degree").get<std::uint64_t>();
    t.discard_kernel = j.at("discard_kernel").get<std::uint64_t>();
    t.discard_base = j.at("discard_base").get<std::uint64_t>();
    t.discard_noninjective = j.at("discard_noninjective").get<std::uint64_t>();
    return t;
}

// Finished blocks recorded in a checkpoint, keyed by (pattern, offset).
std::map<std::pair<unsigned, std::uint64_t>, PatternTally> read_checkpoint(const std::string& path,
                                                                           std::uint64_t digest) {
    std::map<std::pair<unsigned, std::uint64_t>, PatternTally> done;
    std::ifstream in(path);
    if (!in) return done;
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(lines[i]);
        } catch (const nlohmann::json::exception&) {
            // a torn final line from an interrupted write is dropped
            if (i + 1 == lines.size()) break;
            fail(ErrorCode::ParseError, "malformed checkpoint line " + std::to_string(i + 1));
        }
        try {
            if (j.at("digest").get<std::string>() != digest_hex(digest))
                fail(ErrorCode::ChecksumMismatch, "checkpoint was written with a different configuration");
            done[{j.at("pattern").get<unsigned>(), j.at("offset").get<std::uint64_t>()}] = tally_from_record(j);
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::ParseError, std::string("checkpoint record: ") + e.what());
        }
    }
    return done;
}

}  // namespace

ScanReport run_scan(const FieldPtr& field, const ScanOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    if (options.block_size == 0) fail(ErrorCode::InvalidParameters, "block size must be positive");
    if (options.jobs == 0) fail(ErrorCode::InvalidParameters, "need at least one worker");
    if (options.resume && options.checkpoint.empty()) fail(ErrorCode::InvalidParameters, "resume needs a checkpoint file");

    const ScanBasis basis(field);
    const PointTable table(field, 2);
    const std::uint64_t q = field->cardinality();
    const auto& all = enumerate_patterns();

    ScanReport report;
    report.q = q;
    report.block_size = options.block_size;
    report.patterns = options.patterns;
    if (report.patterns.empty())
        for (const auto& p : all) report.patterns.push_back(p.id);
    std::set<unsigned> distinct;
    for (unsigned id : report.patterns) {
        if (id < 1 || id > all.size()) fail(ErrorCode::InvalidParameters, "pattern ids run from 1 to 10");
        if (!distinct.insert(id).second) fail(ErrorCode::InvalidParameters, "pattern listed twice");
    }
    report.config_digest = scan_config_digest(q, report.patterns, options.block_size);

    std::vector<Block> blocks;
    for (std::size_t slot = 0; slot < report.patterns.size(); ++slot) {
        const auto& pat = all[report.patterns[slot] - 1];
        PatternTally t;
        t.pattern = pat.id;
        t.expected = pat.size(q);
        report.tallies.push_back(t);
        for (std::uint64_t off = 0; off < t.expected; off += options.block_size)
            blocks.push_back({slot, off, std::min(options.block_size, t.expected - off)});
    }
    report.blocks_total = blocks.size();

    std::map<std::pair<unsigned, std::uint64_t>, PatternTally> done;
    if (options.resume) done = read_checkpoint(options.checkpoint, report.config_digest);
    std::ofstream ckpt;
    if (!options.checkpoint.empty()) {
        ckpt.open(options.checkpoint, options.resume ? std::ios::app : std::ios::trunc);
        if (!ckpt) fail(ErrorCode::InvalidParameters, "cannot open checkpoint " + options.checkpoint);
    }

    std::vector<std::optional<PatternTally>> results(blocks.size());
    std::vector<std::size_t> pending;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto key = std::make_pair(report.tallies[blocks[b].pattern_slot].pattern, blocks[b].offset);
        if (auto it = done.find(key); it != done.end()) {
            if (it->second.processed != blocks[b].count)
                fail(ErrorCode::ChecksumMismatch, "checkpoint block size disagrees with the configuration");
            results[b] = it->second;
            ++report.resumed_blocks;
        } else {
            pending.push_back(b);
        }
    }
    if (options.max_blocks && pending.size() > *options.max_blocks) pending.resize(*options.max_blocks);

    const ScanContext ctx(basis, table);
    std::atomic<std::size_t> next{0};
    std::mutex write_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        std::vector<std::uint32_t> img;
        std::vector<std::uint8_t> seen;
        try {
            for (std::size_t i = next.fetch_add(1); i < pending.size(); i = next.fetch_add(1)) {
                const Block& blk = blocks[pending[i]];
                const auto& pat = all[report.patterns[blk.pattern_slot] - 1];
                PatternTally t;
                t.pattern = pat.id;
                for (std::uint64_t off = blk.offset; off < blk.offset + blk.count; ++off)
                    t.record(ctx.classify(pat, off, img, seen));
                results[pending[i]] = t;
                if (ckpt.is_open()) {
                    const std::lock_guard lock(write_mutex);
                    ckpt << tally_record(t, blk.offset, report.config_digest).dump() << '\n' << std::flush;
                }
            }
        } catch (...) {
            const std::lock_guard lock(write_mutex);
            if (!error) error = std::current_exception();
            next = pending.size();
        }
    };
    const unsigned jobs = std::min<std::size_t>(options.jobs, std::max<std::size_t>(pending.size(), 1));
    std::vector<std::thread> threads;
    for (unsigned w = 1; w < jobs; ++w) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);

    // merge in block order
    report.total.pattern = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (!results[b]) {
            if (!report.cursor) report.cursor = {{report.tallies[blocks[b].pattern_slot].pattern, blocks[b].offset}};
            continue;
        }
        ++report.blocks_done;
        report.tallies[blocks[b].pattern_slot] += *results[b];
    }
    for (const auto& t : report.tallies) {
        report.total += t;
        report.total.expected += t.expected;
    }
    report.complete = report.blocks_done == report.blocks_total;
    report.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace cremona
