#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>
#include <set>

#include "cremona/error.hpp"
#include "cremona/linear_parity.hpp"

using namespace cremona;

namespace {

// Images by linear search over the table and sign by counting inversions.
int oracle_sign(const ProjLinearMap& m, const PointTable& table) {
    const Field& f = *m.field;
    std::vector<std::size_t> img(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto v = apply(f, m.matrix, table.point(i));
        for (std::size_t j = 0; j < table.size(); ++j) {
            if (same_point(f, v, table.point(j))) {
                img[i] = j;
                break;
            }
        }
    }
    std::size_t inv = 0;
    for (std::size_t i = 0; i < img.size(); ++i)
        for (std::size_t j = i + 1; j < img.size(); ++j) inv += img[i] > img[j];
    return inv % 2 ? -1 : 1;
}

// Size of the subgroup of PGL generated by two maps, by closure.
std::size_t generated_order(const ProjLinearMap& a, const ProjLinearMap& b) {
    const Field& f = *a.field;
    std::set<std::vector<Elem>> seen;
    std::deque<Matrix> todo;
    const auto push = [&](const Matrix& m) {
        const auto n = projective_normalize(f, m);
        if (seen.insert(n.data()).second) todo.push_back(n);
    };
    push(Matrix::identity(a.matrix.rows()));
    while (!todo.empty()) {
        const Matrix m = todo.front();
        todo.pop_front();
        push(multiply(f, m, a.matrix));
        push(multiply(f, m, b.matrix));
    }
    return seen.size();
}

std::uint64_t pgl_order(std::uint64_t q, unsigned n) {
    // |GL_{n+1}| / (q-1)
    std::uint64_t order = 1;
    std::uint64_t qn = 1;
    for (unsigned i = 0; i <= n; ++i) qn *= q;
    std::uint64_t qi = 1;
    for (unsigned i = 0; i <= n; ++i) {
        order *= qn - qi;
        qi *= q;
    }
    return order / (q - 1);
}

}  // namespace

TEST_CASE("generators generate") {
    for (auto [n, q] : std::vector<std::pair<unsigned, std::uint64_t>>{{1, 2}, {1, 3}, {1, 4}, {1, 5}, {1, 8}, {2, 2}, {2, 3}}) {
        auto f = make_field_of_order(q);
        const auto [a, b] = waterhouse_generators(n, f);
        CHECK(generated_order(a, b) == pgl_order(q, n));
    }
}

TEST_CASE("generator shapes") {
    auto f4 = make_field(2, 2);
    const auto [a2, b2] = waterhouse_generators(2, f4);
    const Elem o = f4->one(), z = f4->zero();
    CHECK(b2.matrix == Matrix(3, 3, {z, o, z, z, z, o, o, z, z}));
    CHECK(a2.matrix == Matrix(3, 3, {o, z, z, z, f4->primitive_element(), z, o, z, o}));
    CHECK(same_map(a2, transvection_factor(2, f4) * diagonal_factor(2, f4)));

    const PointTable line(f4, 1);
    const auto [a1, b1] = waterhouse_generators(1, f4);
    const auto [pb, cb] = linear_permutation(b1, line);
    CHECK(pb(line.index_of(Point{o, z})) == line.index_of(Point{o, z}));
    CHECK(pb(line.index_of(Point{z, o})) == line.index_of(Point{z, o}));
    CHECK(cb.counts == CycleType{{1, 2}, {3, 1}});
    const auto factors = a1_factors(f4);
    CHECK(same_map(a1, factors[0] * factors[1] * factors[2]));

    auto f2 = make_field(2, 1);
    const PointTable line2(f2, 1);
    const auto [a, b] = waterhouse_generators(1, f2);
    CHECK(linear_permutation(a, line2).second.counts == CycleType{{3, 1}});
    CHECK(linear_permutation(b, line2).second.counts == CycleType{{1, 1}, {2, 1}});
    CHECK_THROWS_AS(a1_factors(f2), Error);
}

TEST_CASE("generators are even in characteristic 2") {
    for (std::uint64_t q : {4u, 8u, 16u}) {
        auto f = make_field_of_order(q);
        for (unsigned n : {1u, 2u}) {
            const PointTable table(f, n);
            const auto [a, b] = waterhouse_generators(n, f);
            CHECK(linear_permutation(a, table).second.sign == 1);
            CHECK(linear_permutation(b, table).second.sign == 1);
            CHECK(oracle_sign(a, table) == 1);
            CHECK(oracle_sign(b, table) == 1);
            if (n == 1) {
                for (const auto& g : a1_factors(f)) CHECK(linear_permutation(g, table).second.sign == 1);
            }
        }
    }
    auto f4 = make_field(2, 2);
    const PointTable p3(f4, 3);
    const auto [a3, b3] = waterhouse_generators(3, f4);
    CHECK(linear_permutation(a3, p3).second.sign == 1);
    CHECK(linear_permutation(b3, p3).second.sign == 1);
}

TEST_CASE("transvection and diagonal factors") {
    for (std::uint64_t q : {2u, 4u, 8u}) {
        auto f = make_field_of_order(q);
        std::uint64_t qn = 1;
        for (unsigned n : {1u, 2u, 3u}) {
            qn *= q;
            const PointTable table(f, n);
            const auto [p, census] = linear_permutation(transvection_factor(n, f), table);
            // fixed locus is the hyperplane x0 = 0
            CHECK(census.counts.at(1) == projective_space_size(q, n - 1));
            CHECK(census.counts.at(2) == qn / 2);
            CHECK(census.counts.size() == 2);
        }
    }
    auto f4 = make_field(2, 2);
    const auto [p, census] = linear_permutation(diagonal_factor(2, f4), PointTable(f4, 2));
    CHECK(p.order() == 3);
    CHECK(census.sign == 1);
    const auto [p2, c2] = linear_permutation(transvection_factor(2, make_field(2, 1)), PointTable(make_field(2, 1), 2));
    CHECK(c2.counts.at(2) == 2);
    CHECK(c2.sign == 1);
}

TEST_CASE("coordinate cycle census against the filtration count") {
    for (auto [n, q] : std::vector<std::pair<unsigned, std::uint64_t>>{
             {1, 2}, {1, 4}, {1, 8}, {1, 16}, {2, 4}, {3, 2}, {3, 4}, {3, 8}, {5, 4}, {7, 2}}) {
        const auto c = bn_cycle_census(n, make_field_of_order(q));
        CHECK(c.match);
        CHECK(c.odd_part * (1u << c.two_adic) == n + 1);
    }
    const auto c34 = bn_cycle_census(3, make_field(2, 2));
    CHECK(c34.predicted.counts == CycleType{{1, 1}, {2, 2}, {4, 20}});
    const auto c12 = bn_cycle_census(1, make_field(2, 1));
    CHECK(c12.observed.counts == CycleType{{1, 1}, {2, 1}});
    CHECK(c12.observed.sign == -1);
    const auto c24 = bn_cycle_census(2, make_field(2, 2));
    CHECK(c24.observed.counts == CycleType{{1, 21}});
    CHECK_THROWS_AS(bn_cycle_census(1, make_field(3, 1)), Error);
}

TEST_CASE("coordinate cycle over GF(2) is even for n = 2 and n = 5") {
    // contrary to "odd unless n = 2^l - 1"
    auto f2 = make_field(2, 1);
    for (unsigned n : {2u, 4u, 5u, 6u}) {
        const PointTable table(f2, n);
        const auto b = coordinate_cycle(n, f2);
        CHECK(linear_permutation(b, table).second.sign == oracle_sign(b, table));
    }
    CHECK(linear_permutation(coordinate_cycle(2, f2), PointTable(f2, 2)).second.sign == 1);
    CHECK(linear_permutation(coordinate_cycle(5, f2), PointTable(f2, 5)).second.sign == 1);
}

TEST_CASE("PGL enumeration and parity") {
    CHECK(enumerate_pgl(1, make_field(2, 2)).size() == 60);
    CHECK(enumerate_pgl(1, make_field(2, 3)).size() == 504);
    CHECK(enumerate_pgl(2, make_field(2, 1)).size() == 168);
    CHECK(enumerate_pgl(1, make_field(3, 1)).size() == 24);

    const auto v8 = pgl_exhaustive_parity(1, make_field(2, 3));
    CHECK(v8.examined == 504);
    CHECK(v8.all_even());
    CHECK(pgl_exhaustive_parity(1, make_field(2, 2)).all_even());
    // PGL_3(F_2) is simple, so every element is even
    CHECK(pgl_exhaustive_parity(2, make_field(2, 1)).all_even());
    // PGL_2(F_2) = Sym(3) has three transpositions
    CHECK(pgl_exhaustive_parity(1, make_field(2, 1)).odd == 3);
    // odd q: diag(-1, 1) style elements are odd on P^1(F_3)
    CHECK_FALSE(pgl_exhaustive_parity(1, make_field(3, 1)).all_even());

    const auto s = pgl_sample_parity(2, make_field(2, 2), 1000, 2024);
    CHECK(s.examined == 1000);
    CHECK(s.all_even());
    CHECK(pgl_sample_parity(2, make_field(2, 2), 50, 7).examined == pgl_sample_parity(2, make_field(2, 2), 50, 7).examined);
}

TEST_CASE("two-power cycle constraint on P^1") {
    for (std::uint64_t q : {4u, 8u, 16u}) {
        auto f = make_field_of_order(q);
        std::size_t two_power = 0;
        for (const auto& m : enumerate_pgl(1, f)) {
            REQUIRE(cycle_constraint_check(m));
            if (std::has_single_bit(linear_permutation(m, PointTable(f, 1)).first.order())) ++two_power;
        }
        // identity plus the q^2 - 1 involutions
        CHECK(two_power == q * q);
    }
    CHECK_THROWS_AS(cycle_constraint_check(ProjLinearMap(make_field(3, 1), Matrix::identity(2))), Error);
    CHECK_THROWS_AS(cycle_constraint_check(ProjLinearMap(make_field(2, 2), Matrix::identity(3))), Error);
    CHECK_THROWS_AS(ProjLinearMap(make_field(2, 2), Matrix(2, 2)), Error);
}
