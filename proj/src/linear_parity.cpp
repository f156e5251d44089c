#include "cremona/linear_parity.hpp"

#include <algorithm>
#include <bit>

#include "cremona/bundle.hpp"
#include "cremona/error.hpp"

namespace cremona {

ProjLinearMap::ProjLinearMap(FieldPtr f, Matrix m) : field(std::move(f)), matrix(std::move(m)) {
    if (matrix.rows() != matrix.cols() || matrix.rows() < 2) fail(ErrorCode::DimensionMismatch, "need a square matrix of size >= 2");
    if (determinant(*field, matrix).v == 0) fail(ErrorCode::SingularMatrix, "projective linear maps are invertible");
}

Point ProjLinearMap::apply(std::span<const Elem> x) const {
    if (x.size() != matrix.cols()) fail(ErrorCode::DimensionMismatch, "point dimension differs from the map");
    return normalize(*field, cremona::apply(*field, matrix, x));
}

ProjLinearMap operator*(const ProjLinearMap& a, const ProjLinearMap& b) {
    if (!a.field->same_as(*b.field)) fail(ErrorCode::MixedFields, "maps over different fields");
    if (a.matrix.rows() != b.matrix.rows()) fail(ErrorCode::DimensionMismatch, "maps of different dimension");
    return ProjLinearMap(a.field, multiply(*a.field, a.matrix, b.matrix));
}

bool same_map(const ProjLinearMap& a, const ProjLinearMap& b) {
    return a.field->same_as(*b.field) && projective_normalize(*a.field, a.matrix) == projective_normalize(*b.field, b.matrix);
}

CycleCensus census_from_counts(CycleType counts) {
    CycleCensus c;
    c.counts = std::move(counts);
    std::size_t transpositions = 0;
    for (const auto& [len, n] : c.counts) {
        if (len > 1) c.moved += len * n;
        transpositions += (len - 1) * n;
    }
    c.sign = transpositions % 2 ? -1 : 1;
    return c;
}

CycleCensus census_of(const Permutation& p) { return census_from_counts(p.cycle_type()); }

namespace {

Matrix unit(std::size_t n, std::size_t r, std::size_t c, Elem v) {
    Matrix m(n, n);
    m(r, c) = v;
    return m;
}

Matrix add(const Field& f, Matrix a, const Matrix& b) {
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) a(r, c) = f.add(a(r, c), b(r, c));
    return a;
}

}  // namespace

ProjLinearMap transvection_factor(unsigned n, const FieldPtr& field) {
    if (n < 1) fail(ErrorCode::DimensionMismatch, "n >= 1");
    Matrix t = Matrix::identity(n + 1);
    t(n, 0) = field->one();
    return ProjLinearMap(field, t);
}

ProjLinearMap diagonal_factor(unsigned n, const FieldPtr& field) {
    if (n < 1) fail(ErrorCode::DimensionMismatch, "n >= 1");
    Matrix m = Matrix::identity(n + 1);
    m(1, 1) = field->primitive_element();
    return ProjLinearMap(field, m);
}

ProjLinearMap coordinate_cycle(unsigned n, const FieldPtr& field) {
    if (n < 1) fail(ErrorCode::DimensionMismatch, "n >= 1");
    Matrix b(n + 1, n + 1);
    for (unsigned i = 0; i < n; ++i) b(i, i + 1) = field->one();
    b(n, 0) = field->one();
    return ProjLinearMap(field, b);
}

namespace {

struct TraceNorm {
    Elem alpha, s, r;
};

TraceNorm quadratic_generator_data(const FieldPtr& field) {
    const Field& f = *field;
    const auto big = make_field(f.characteristic(), 2 * f.degree());
    const SubfieldEmbedding emb(field, big);
    const Elem beta = big->primitive_element();
    const auto q = static_cast<std::int64_t>(f.cardinality());
    const Elem norm = big->pow(beta, q + 1);
    const Elem trace = big->add(beta, big->pow(beta, q));
    const auto alpha = emb.restrict_to_source(norm);
    const auto s = emb.restrict_to_source(trace);
    if (!alpha || !s) fail(ErrorCode::InvariantViolation, "trace or norm left the base field");
    return {*alpha, *s, f.neg(*alpha)};
}

}  // namespace

std::vector<ProjLinearMap> a1_factors(const FieldPtr& field) {
    const Field& f = *field;
    if (f.cardinality() == 2) fail(ErrorCode::InvalidParameters, "A_1 over GF(2) is given explicitly");
    const auto d = quadratic_generator_data(field);
    Matrix a11 = Matrix::identity(2);
    a11(0, 0) = d.r;
    Matrix a12 = Matrix::identity(2);
    a12(1, 0) = d.s;
    Matrix a13(2, 2);
    a13(0, 1) = a13(1, 0) = f.one();
    return {ProjLinearMap(field, a11), ProjLinearMap(field, a12), ProjLinearMap(field, a13)};
}

std::pair<ProjLinearMap, ProjLinearMap> waterhouse_generators(unsigned n, const FieldPtr& field) {
    const Field& f = *field;
    if (n < 1) fail(ErrorCode::DimensionMismatch, "n >= 1");
    if (n == 1 && f.cardinality() == 2) {
        const Elem o = f.one(), z = f.zero();
        return {ProjLinearMap(field, Matrix(2, 2, {z, o, o, o})), ProjLinearMap(field, Matrix(2, 2, {o, o, z, o}))};
    }
    if (n == 1) {
        const auto d = quadratic_generator_data(field);
        Matrix a(2, 2, {f.zero(), d.r, f.one(), d.s});
        Matrix b = Matrix::identity(2);
        b(0, 0) = d.alpha;
        return {ProjLinearMap(field, a), ProjLinearMap(field, b)};
    }
    // A_n = I + (alpha - 1) E_{2,2} + E_{n+1,1}
    Matrix a = add(f, Matrix::identity(n + 1), unit(n + 1, 1, 1, f.sub(f.primitive_element(), f.one())));
    a = add(f, a, unit(n + 1, n, 0, f.one()));
    return {ProjLinearMap(field, a), coordinate_cycle(n, field)};
}

std::pair<Permutation, CycleCensus> linear_permutation(const ProjLinearMap& map, const PointTable& table) {
    if (table.dimension() != map.dimension()) fail(ErrorCode::DimensionMismatch, "table and map dimensions differ");
    if (!table.field()->same_as(*map.field)) fail(ErrorCode::MixedFields, "table and map over different fields");
    std::vector<std::uint32_t> img(table.size());
    std::vector<Elem> buf;
    for (std::size_t i = 0; i < table.size(); ++i) {
        buf = apply(*map.field, map.matrix, table.point(i));
        img[i] = static_cast<std::uint32_t>(table.index_of(buf));
    }
    Permutation p(std::move(img));
    auto census = census_of(p);
    return {std::move(p), std::move(census)};
}

namespace {

std::uint64_t checked_pow(std::uint64_t b, std::uint64_t e) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < e; ++i) {
        if (r > UINT64_MAX / b) fail(ErrorCode::UnsupportedSize, "census prediction overflows 64 bits");
        r *= b;
    }
    return r;
}

}  // namespace

BnCensus bn_cycle_census(unsigned n, const FieldPtr& field) {
    const Field& f = *field;
    if (f.characteristic() != 2) fail(ErrorCode::OddCharacteristic, "the census formula is for GF(2^m)");
    BnCensus out;
    out.two_adic = static_cast<unsigned>(std::countr_zero(n + 1));
    out.odd_part = (n + 1) >> out.two_adic;

    const PointTable table(field, n);
    const auto [perm, census] = linear_permutation(coordinate_cycle(n, field), table);
    out.observed = census_of(perm.pow(out.odd_part));

    const std::uint64_t q = f.cardinality();
    CycleType predicted;
    predicted[1] = (checked_pow(q, out.odd_part) - 1) / (q - 1);
    for (unsigned r = 1; r <= out.two_adic; ++r) {
        const std::uint64_t qa = checked_pow(q, static_cast<std::uint64_t>(out.odd_part) << (r - 1));
        const std::uint64_t count = qa / (std::uint64_t{1} << r) * ((qa - 1) / (q - 1));
        if (count) predicted[std::size_t{1} << r] = count;
    }
    out.predicted = census_from_counts(std::move(predicted));
    out.match = out.observed == out.predicted;
    return out;
}

ParityVerdict pgl_sample_parity(unsigned n, const FieldPtr& field, std::size_t count, std::uint64_t seed) {
    const PointTable table(field, n);
    std::mt19937_64 rng(seed);
    ParityVerdict v;
    for (std::size_t i = 0; i < count; ++i) {
        const ProjLinearMap m(field, random_invertible(*field, n + 1, rng));
        const auto [perm, census] = linear_permutation(m, table);
        ++v.examined;
        if (census.sign < 0) {
            ++v.odd;
            if (!v.first_odd) v.first_odd = m.matrix;
        }
    }
    return v;
}

std::vector<ProjLinearMap> enumerate_pgl(unsigned n, const FieldPtr& field) {
    const Field& f = *field;
    const std::size_t entries = static_cast<std::size_t>(n + 1) * (n + 1);
    // normalized matrices are points of P^(entries-1)
    const PointTable grid(field, static_cast<unsigned>(entries - 1));
    std::vector<ProjLinearMap> out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto e = grid.point(i);
        Matrix m(n + 1, n + 1, std::vector<Elem>(e.begin(), e.end()));
        if (determinant(f, m).v == 0) continue;
        out.emplace_back(field, std::move(m));
    }
    return out;
}

ParityVerdict pgl_exhaustive_parity(unsigned n, const FieldPtr& field) {
    const PointTable table(field, n);
    ParityVerdict v;
    for (const auto& m : enumerate_pgl(n, field)) {
        const auto [perm, census] = linear_permutation(m, table);
        ++v.examined;
        if (census.sign < 0) {
            ++v.odd;
            if (!v.first_odd) v.first_odd = m.matrix;
        }
    }
    return v;
}

bool cycle_constraint_check(const ProjLinearMap& map) {
    const Field& f = *map.field;
    if (f.characteristic() != 2 || f.cardinality() < 4) fail(ErrorCode::InvalidParameters, "needs q = 2^m >= 4");
    if (map.dimension() != 1) fail(ErrorCode::DimensionMismatch, "the constraint is stated on P^1");
    const PointTable line(map.field, 1);
    const auto [perm, census] = linear_permutation(map, line);
    std::uint64_t order = perm.order();
    const std::uint64_t odd = order >> std::countr_zero(order);
    const Permutation reduced = perm.pow(static_cast<std::int64_t>(odd));
    const std::uint64_t reduced_order = reduced.order();
    if (!std::has_single_bit(reduced_order)) fail(ErrorCode::NotTwoPowerOrder, "reduction left an odd factor");

    const auto ct = reduced.cycle_type();
    const std::uint64_t q = f.cardinality();
    if (reduced.is_identity()) return ct.at(1) == q + 1;
    const auto fixed = ct.count(1) ? ct.at(1) : 0;
    if (fixed != 1 || ct.size() != 2) return false;
    const auto [len, cnt] = *ct.rbegin();
    return std::has_single_bit(len) && len * cnt == q && cnt > 1;
}

}  // namespace cremona
