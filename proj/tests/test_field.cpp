#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "cremona/error.hpp"
#include "cremona/field.hpp"

using namespace cremona;

namespace {

// Independent schoolbook arithmetic on coefficient vectors, used as oracle.
std::vector<std::uint64_t> digits_of(std::uint64_t v, std::uint64_t p, unsigned m) {
    std::vector<std::uint64_t> d(m);
    for (unsigned i = 0; i < m; ++i) {
        d[i] = v % p;
        v /= p;
    }
    return d;
}

std::uint64_t value_of(const std::vector<std::uint64_t>& d, std::uint64_t p) {
    std::uint64_t v = 0;
    for (std::size_t i = d.size(); i-- > 0;) v = v * p + d[i];
    return v;
}

std::uint64_t oracle_mul(std::uint64_t a, std::uint64_t b, const Field& f) {
    const std::uint64_t p = f.characteristic();
    const unsigned m = f.degree();
    auto da = digits_of(a, p, m);
    auto db = digits_of(b, p, m);
    std::vector<std::uint64_t> prod(2 * m, 0);
    for (unsigned i = 0; i < m; ++i)
        for (unsigned j = 0; j < m; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
    const auto& mod = f.modulus();
    for (int deg = 2 * static_cast<int>(m) - 2; deg >= static_cast<int>(m); --deg) {
        const std::uint64_t c = prod[deg];
        for (unsigned i = 0; i <= m; ++i) prod[deg - m + i] = (prod[deg - m + i] + (p - c) * mod[i]) % p;
    }
    prod.resize(m);
    return value_of(prod, p);
}

std::uint64_t oracle_add(std::uint64_t a, std::uint64_t b, const Field& f) {
    const std::uint64_t p = f.characteristic();
    auto da = digits_of(a, p, f.degree());
    auto db = digits_of(b, p, f.degree());
    for (unsigned i = 0; i < f.degree(); ++i) da[i] = (da[i] + db[i]) % p;
    return value_of(da, p);
}

// Trial division by every monic polynomial of degree <= m/2.
bool oracle_irreducible(const std::vector<std::uint32_t>& f, std::uint64_t p) {
    const unsigned m = static_cast<unsigned>(f.size() - 1);
    for (unsigned d = 1; d <= m / 2; ++d) {
        std::uint64_t count = 1;
        for (unsigned i = 0; i < d; ++i) count *= p;
        for (std::uint64_t idx = 0; idx < count; ++idx) {
            std::vector<std::int64_t> g = {};
            std::uint64_t rest = idx;
            for (unsigned i = 0; i < d; ++i) {
                g.push_back(static_cast<std::int64_t>(rest % p));
                rest /= p;
            }
            g.push_back(1);
            std::vector<std::int64_t> r(f.begin(), f.end());
            for (int deg = static_cast<int>(m); deg >= static_cast<int>(d); --deg) {
                const std::int64_t c = r[deg];
                for (unsigned i = 0; i <= d; ++i) {
                    r[deg - d + i] = ((r[deg - d + i] - c * g[i]) % static_cast<std::int64_t>(p) + p) % p;
                }
            }
            bool zero = true;
            for (unsigned i = 0; i < d; ++i) zero = zero && r[i] == 0;
            if (zero) return false;
        }
    }
    return true;
}

std::uint64_t brute_order(const Field& f, Elem x) {
    if (x.v == 0) return 0;
    Elem y = x;
    std::uint64_t k = 1;
    while (y != f.one()) {
        y = Elem{static_cast<std::uint32_t>(oracle_mul(y.v, x.v, f))};
        ++k;
    }
    return k;
}

}  // namespace

TEST_CASE("constructing fields") {
    auto f4 = make_field(2, 2);
    CHECK(f4->cardinality() == 4);
    CHECK(f4->modulus() == std::vector<std::uint32_t>{1, 1, 1});
    CHECK(f4->conway_modulus());

    auto f3 = make_field(3, 1);
    CHECK(f3->cardinality() == 3);
    CHECK(f3->degree() == 1);

    auto f4096 = make_field(2, 12);
    CHECK(f4096->cardinality() == 4096);
    CHECK(oracle_irreducible(f4096->modulus(), 2));

    CHECK(make_field(2, 2) == f4);  // cached
    CHECK(make_field_of_order(9)->degree() == 2);

    CHECK_THROWS_AS(make_field(4, 1), Error);
    try {
        make_field(6, 2);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonPrimeCharacteristic);
    }
    try {
        make_field(2, 33);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnsupportedSize);
    }
    try {
        make_field_of_order(12);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonPrimeCharacteristic);
    }
}

TEST_CASE("every tabulated and fallback modulus is irreducible") {
    for (std::uint32_t p : {2u, 3u, 5u, 7u, 11u, 13u}) {
        for (unsigned m = 1; m <= 12; ++m) {
            std::uint64_t q = 1;
            bool fits = true;
            for (unsigned i = 0; i < m; ++i) {
                q *= p;
                if (q > (std::uint64_t{1} << 32)) fits = false;
            }
            if (!fits) break;
            auto f = make_field(p, m);
            CAPTURE(p);
            CAPTURE(m);
            CHECK(f->modulus().size() == m + 1);
            CHECK(f->modulus().back() == 1);
            CHECK(f->conway_modulus() == (p <= 7));
            if (q <= 100000) CHECK(oracle_irreducible(f->modulus(), p));
            std::uint64_t prod = 1;
            for (const auto& pp : f->factored_order())
                for (unsigned i = 0; i < pp.exponent; ++i) prod *= pp.prime;
            CHECK(prod == q - 1);
        }
    }
}

TEST_CASE("fallback modulus is the lexicographically smallest irreducible") {
    // GF(11^2): monic x^2 + c1 x + c0 ordered by c0 + 11 c1.
    auto f = make_field(11, 2);
    std::vector<std::uint32_t> expected;
    for (std::uint32_t idx = 0; idx < 121 && expected.empty(); ++idx) {
        std::vector<std::uint32_t> cand{idx % 11, idx / 11, 1};
        if (oracle_irreducible(cand, 11)) expected = cand;
    }
    CHECK(f->modulus() == expected);
    CHECK(make_field(13, 1)->modulus() == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("small examples") {
    auto f4 = make_field(2, 2);
    const Elem w = f4->generator_root();
    CHECK(f4->mul(w, w) == f4->add(w, f4->one()));
    CHECK(f4->pow(w, 3) == f4->one());
    auto f3 = make_field(3, 1);
    CHECK(f3->add(Elem{2}, Elem{2}) == Elem{1});
    CHECK(f3->pow(Elem{2}, -1) == Elem{2});
}

TEST_CASE("arithmetic agrees with schoolbook oracle") {
    std::mt19937_64 rng(12345);
    const std::vector<std::pair<std::uint32_t, unsigned>> fields = {
        {2, 1}, {2, 3}, {2, 8}, {2, 12}, {2, 20}, {2, 24}, {2, 32}, {3, 2}, {3, 5}, {3, 15},
        {5, 3}, {7, 2}, {7, 9}, {13, 1}, {13, 3}, {65537, 1}, {4294967291u, 1}};
    for (auto [p, m] : fields) {
        auto f = make_field(p, m);
        CAPTURE(f->describe());
        std::uniform_int_distribution<std::uint64_t> pick(0, f->cardinality() - 1);
        for (int trial = 0; trial < 2000; ++trial) {
            const Elem a{static_cast<std::uint32_t>(pick(rng))};
            const Elem b{static_cast<std::uint32_t>(pick(rng))};
            REQUIRE(f->mul(a, b).v == oracle_mul(a.v, b.v, *f));
            REQUIRE(f->add(a, b).v == oracle_add(a.v, b.v, *f));
            REQUIRE(f->add(f->sub(a, b), b) == a);
            REQUIRE(f->add(a, f->neg(a)) == f->zero());
            if (a.v != 0) {
                REQUIRE(f->mul(a, f->inv(a)) == f->one());
                REQUIRE(f->pow(a, -3) == f->inv(f->mul(a, f->mul(a, a))));
            }
        }
    }
}

TEST_CASE("x^(Q-1) = 1 exhaustively for Q <= 256") {
    for (std::uint64_t q : {2u, 3u, 4u, 5u, 7u, 8u, 9u, 11u, 13u, 16u, 25u, 27u, 32u, 49u, 64u, 81u, 121u, 125u, 128u,
                            169u, 243u, 256u}) {
        auto f = make_field_of_order(q);
        for (std::uint64_t i = 1; i < q; ++i) {
            REQUIRE(f->pow(f->element(i), static_cast<std::int64_t>(q - 1)) == f->one());
        }
    }
}

TEST_CASE("multiplicative order and primitive element") {
    for (std::uint64_t q : {4u, 9u, 16u, 25u, 49u, 64u, 81u}) {
        auto f = make_field_of_order(q);
        for (std::uint64_t i = 0; i < q; ++i) {
            const Elem x = f->element(i);
            const std::uint64_t ord = f->order(x);
            REQUIRE(ord == brute_order(*f, x));
            if (ord) {
                REQUIRE((q - 1) % ord == 0);
                for (const auto& pp : factorize(ord)) {
                    REQUIRE(f->pow(x, static_cast<std::int64_t>(ord / pp.prime)) != f->one());
                }
            }
        }
        // primitive element is the least index of full order
        std::uint64_t first = 0;
        for (std::uint64_t i = 1; i < q && !first; ++i)
            if (brute_order(*f, f->element(i)) == q - 1) first = i;
        CHECK(f->primitive_element().v == first);
    }
}

TEST_CASE("square roots") {
    for (std::uint64_t q : {2u, 3u, 5u, 8u, 9u, 25u, 27u, 49u, 121u}) {
        auto f = make_field_of_order(q);
        std::set<std::uint32_t> squares;
        for (std::uint64_t i = 0; i < q; ++i) squares.insert(f->mul(f->element(i), f->element(i)).v);
        for (std::uint64_t i = 0; i < q; ++i) {
            const Elem x = f->element(i);
            const bool sq = squares.count(x.v) > 0;
            REQUIRE(f->is_square(x) == sq);
            const auto r = f->sqrt(x);
            REQUIRE(r.has_value() == sq);
            if (r) {
                REQUIRE(f->mul(*r, *r) == x);
                REQUIRE(*r <= f->neg(*r));
            }
        }
    }
}

TEST_CASE("division by zero and mixed fields") {
    auto f4 = make_field(2, 2);
    auto f8 = make_field(2, 3);
    try {
        f4->inv(f4->zero());
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DivisionByZero);
    }
    FieldElement a(f4, Elem{2});
    FieldElement b(f8, Elem{2});
    try {
        (void)(a + b);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MixedFields);
    }
    FieldElement zero(f4, Elem{0});
    try {
        (void)(a / zero);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DivisionByZero);
    }
    CHECK((a * a).value() == Elem{3});
    const std::vector<std::uint32_t> coeffs{1, 1};
    CHECK(FieldElement(f4, coeffs).value() == Elem{3});
}

TEST_CASE("subfield embeddings") {
    SUBCASE("prime subfield") {
        SubfieldEmbedding e(make_field(2, 1), make_field(2, 2));
        CHECK(e.embed(Elem{0}) == Elem{0});
        CHECK(e.embed(Elem{1}) == Elem{1});
    }
    SUBCASE("GF(4) in GF(16)") {
        auto f16 = make_field(2, 4);
        SubfieldEmbedding e(make_field(2, 2), f16);
        const Elem g = e.generator_image();
        CHECK(f16->add(f16->add(f16->mul(g, g), g), f16->one()) == f16->zero());
        // smallest-index root
        for (std::uint32_t i = 0; i < g.v; ++i) {
            const Elem x{i};
            CHECK(f16->add(f16->add(f16->mul(x, x), x), f16->one()) != f16->zero());
        }
    }
    SUBCASE("not a subfield") {
        try {
            SubfieldEmbedding e(make_field(2, 2), make_field(2, 3));
            FAIL("expected throw");
        } catch (const Error& err) {
            CHECK(err.code() == ErrorCode::NotASubfield);
        }
        CHECK_THROWS_AS(SubfieldEmbedding(make_field(3, 1), make_field(2, 2)), Error);
    }
}

TEST_CASE("embeddings are ring homomorphisms into the Frobenius-fixed field") {
    std::mt19937_64 rng(7);
    const std::vector<std::array<unsigned, 3>> towers = {
        {2, 1, 4}, {2, 2, 4}, {2, 2, 6}, {2, 3, 6}, {2, 2, 12}, {2, 4, 12}, {2, 3, 18}, {2, 4, 24},
        {3, 1, 2}, {3, 2, 4}, {3, 3, 6}, {5, 1, 2}, {5, 2, 4}, {7, 1, 2}, {3, 2, 12}};
    for (const auto& t : towers) {
        auto src = make_field(t[0], t[1]);
        auto tgt = make_field(t[0], t[2]);
        SubfieldEmbedding e(src, tgt);
        CAPTURE(src->describe());
        CAPTURE(tgt->describe());
        const std::uint64_t Q = src->cardinality();
        auto check_pair = [&](Elem x, Elem y) {
            REQUIRE(e.embed(src->add(x, y)) == tgt->add(e.embed(x), e.embed(y)));
            REQUIRE(e.embed(src->mul(x, y)) == tgt->mul(e.embed(x), e.embed(y)));
        };
        if (Q <= 16) {
            for (std::uint64_t i = 0; i < Q; ++i)
                for (std::uint64_t j = 0; j < Q; ++j) check_pair(src->element(i), src->element(j));
        } else {
            std::uniform_int_distribution<std::uint64_t> pick(0, Q - 1);
            for (int k = 0; k < 1000; ++k) check_pair(src->element(pick(rng)), src->element(pick(rng)));
        }
        for (std::uint64_t i = 0; i < std::min<std::uint64_t>(Q, 4096); ++i) {
            const Elem y = e.embed(src->element(i));
            REQUIRE(tgt->pow(y, static_cast<std::int64_t>(Q)) == y);
            REQUIRE(e.restrict_to_source(y) == src->element(i));
        }
        if (tgt->cardinality() <= 4096) {
            std::uint64_t fixed = 0;
            for (std::uint64_t i = 0; i < tgt->cardinality(); ++i) {
                const Elem y = tgt->element(i);
                const bool is_fixed = e.relative_frobenius(y) == y;
                REQUIRE(e.in_subfield(y) == is_fixed);
                REQUIRE(e.restrict_to_source(y).has_value() == is_fixed);
                if (is_fixed) ++fixed;
                // Frobenius is additive and multiplicative
                const Elem z = tgt->element((i * 7 + 3) % tgt->cardinality());
                REQUIRE(e.relative_frobenius(tgt->mul(y, z)) ==
                        tgt->mul(e.relative_frobenius(y), e.relative_frobenius(z)));
                REQUIRE(e.relative_frobenius(tgt->add(y, z)) ==
                        tgt->add(e.relative_frobenius(y), e.relative_frobenius(z)));
            }
            REQUIRE(fixed == Q);
        }
    }
}

TEST_CASE("relative basis coordinates") {
    std::mt19937_64 rng(99);
    for (auto [p, ms, mt] : std::vector<std::array<unsigned, 3>>{{2, 2, 12}, {2, 3, 18}, {2, 4, 24}, {3, 1, 6}, {5, 1, 2}}) {
        auto src = make_field(p, ms);
        auto tgt = make_field(p, mt);
        SubfieldEmbedding e(src, tgt);
        // power basis of the least generator of the target over the source
        Elem alpha{0};
        for (std::uint64_t i = 1; i < tgt->cardinality(); ++i) {
            const Elem c = tgt->element(i);
            std::set<std::uint32_t> orbit;
            for (unsigned k = 0; k < e.relative_degree(); ++k) orbit.insert(e.relative_frobenius(c, k).v);
            if (orbit.size() == e.relative_degree()) {
                alpha = c;
                break;
            }
        }
        std::vector<Elem> family;
        for (unsigned k = 0; k < e.relative_degree(); ++k) family.push_back(tgt->pow(alpha, k));
        RelativeBasis basis(e, family);
        CHECK(basis.spans_target());
        std::uniform_int_distribution<std::uint64_t> pick(0, tgt->cardinality() - 1);
        for (int trial = 0; trial < 500; ++trial) {
            const Elem y = tgt->element(pick(rng));
            auto coords = basis.coordinates(y);
            REQUIRE(coords.has_value());
            REQUIRE(basis.combine(*coords) == y);
        }
        // a single-element family spans exactly the embedded subfield
        RelativeBasis unit(e, {tgt->one()});
        CHECK_FALSE(unit.spans_target());
        CHECK_FALSE(unit.coordinates(alpha).has_value());
        CHECK(unit.coordinates(e.embed(src->element(src->cardinality() - 1)))->at(0) ==
              src->element(src->cardinality() - 1));
    }
}

TEST_CASE("galois data") {
    auto f2 = make_field(2, 1);
    auto f4 = make_field(2, 2);
    SubfieldEmbedding e(f2, f4);
    const Elem w = f4->generator_root();
    auto gd = galois_data(w, e);
    CHECK(gd.trace == Elem{1});
    CHECK(gd.norm == Elem{1});
    CHECK(gd.order == 3);
    CHECK(gd.frobenius_orbit == std::vector<Elem>{w, f4->mul(w, w)});

    auto f9 = make_field(3, 2);
    auto f729 = make_field(3, 6);
    SubfieldEmbedding e2(f9, f729);
    auto one = galois_data(f729->one(), e2);
    CHECK(one.trace == f9->from_integer(3));
    CHECK(one.norm == f9->one());
    CHECK(one.order == 1);
    CHECK(one.frobenius_orbit.size() == 1);

    SubfieldEmbedding e3(make_field(5, 1), make_field(5, 2));
    auto beta = make_field(5, 2)->primitive_element();
    CHECK(galois_data(beta, e3).order == 24);

    // trace and norm agree with the orbit sum and product for every element of GF(81)/GF(9)
    auto f81 = make_field(3, 4);
    SubfieldEmbedding e4(f9, f81);
    for (std::uint32_t i = 0; i < 81; ++i) {
        const Elem x{i};
        auto d = galois_data(x, e4);
        const Elem xq = f81->pow(x, 9);
        CHECK(e4.embed(d.trace) == f81->add(x, xq));
        CHECK(e4.embed(d.norm) == f81->mul(x, xq));
    }
}

TEST_CASE("special multiplier") {
    SUBCASE("q = 3, t = 2") {
        auto f3 = make_field(3, 1);
        auto sm = find_special_multiplier(f3, Elem{2});
        CHECK(f3->sub(f3->mul(sm.alpha, sm.alpha), f3->mul(Elem{2}, f3->mul(sm.beta, sm.beta))) == f3->one());
        CHECK(sm.quadratic->order(sm.multiplier) == 8);
    }
    SUBCASE("q = 5, t = 2") {
        auto f5 = make_field(5, 1);
        auto sm = find_special_multiplier(f5, Elem{2});
        CHECK(sm.quadratic->order(sm.multiplier) == 24);
    }
    SUBCASE("errors") {
        try {
            find_special_multiplier(make_field(2, 2), Elem{2});
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::EvenCharacteristic);
        }
        try {
            find_special_multiplier(make_field(5, 1), Elem{4});
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NotANonSquare);
        }
    }
}

TEST_CASE("special multiplier exists for many odd q and matches the inverse-of-primitive construction") {
    for (std::uint64_t q : {3u, 5u, 7u, 9u, 11u, 13u, 17u, 19u, 23u, 25u, 27u, 29u, 31u, 49u, 81u, 121u}) {
        auto f = make_field_of_order(q);
        const Elem t = first_nonsquare(*f);
        auto sm = find_special_multiplier(f, t);
        const Field& big = *sm.quadratic;
        CAPTURE(q);
        CHECK(f->sub(f->mul(sm.alpha, sm.alpha), f->mul(t, f->mul(sm.beta, sm.beta))) == f->one());
        CHECK(big.order(sm.multiplier) == q * q - 1);
        CHECK(big.mul(sm.sqrt_t_inverse, sm.sqrt_t_inverse) == big.inv(SubfieldEmbedding(f, sm.quadratic).embed(t)));

        // Independent route: a primitive xi = c - (t/2) s inverts to beta + (alpha-1) s
        // with alpha^2 - t beta^2 = 1.
        SubfieldEmbedding e(f, sm.quadratic);
        const RelativeBasis basis(e, {big.one(), sm.sqrt_t_inverse});
        const Elem half_t = f->div(t, f->from_integer(2));
        bool found = false;
        for (std::uint64_t ci = 0; ci < q; ++ci) {
            const Elem xi = big.sub(e.embed(f->element(ci)), big.mul(e.embed(half_t), sm.sqrt_t_inverse));
            if (!big.is_primitive(xi)) continue;
            found = true;
            auto coords = basis.coordinates(big.inv(xi));
            REQUIRE(coords.has_value());
            const Elem beta = (*coords)[0];
            const Elem alpha = f->add((*coords)[1], f->one());
            CHECK(f->sub(f->mul(alpha, alpha), f->mul(t, f->mul(beta, beta))) == f->one());
            break;
        }
        CHECK(found);
    }
}
