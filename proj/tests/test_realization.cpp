#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "cremona/error.hpp"
#include "cremona/realization.hpp"

using namespace cremona;

namespace {

// Closed-form composition for odd q: lift with the explicit inverse projection,
// rotate the fiber over [0:1], project with [x:y:w-z].
Permutation closed_form_realization(const FieldPtr& fp, Elem t, Elem a, Elem b) {
    const Field& f = *fp;
    const PointTable plane(fp, 2);
    const Elem two = f.from_integer(2);
    std::vector<std::uint32_t> img(plane.size());
    for (std::size_t i = 0; i < plane.size(); ++i) {
        const auto p = plane.point(i);
        const Elem x = p[0], y = p[1], u = p[2];
        if (u.v == 0) {
            img[i] = static_cast<std::uint32_t>(i);
            continue;
        }
        const Elem n = f.sub(f.mul(x, x), f.mul(t, f.mul(y, y)));
        Elem X = f.mul(two, f.mul(u, x)), Y = f.mul(two, f.mul(u, y));
        const Elem Z = f.sub(n, f.mul(u, u)), W = f.add(n, f.mul(u, u));
        if (Z.v == 0) {
            const Elem nx = f.add(f.mul(a, X), f.mul(t, f.mul(b, Y)));
            Y = f.add(f.mul(b, X), f.mul(a, Y));
            X = nx;
        }
        img[i] = static_cast<std::uint32_t>(plane.index_of(Point{X, Y, f.sub(W, Z)}));
    }
    return Permutation(img);
}

std::vector<std::pair<Elem, Elem>> conic_parameters(const Field& f, Elem t) {
    std::vector<std::pair<Elem, Elem>> out;
    for (std::uint64_t i = 0; i < f.cardinality(); ++i)
        for (std::uint64_t j = 0; j < f.cardinality(); ++j) {
            const Elem a = f.element(i), b = f.element(j);
            if (f.sub(f.mul(a, a), f.mul(t, f.mul(b, b))) == f.one()) out.emplace_back(a, b);
        }
    return out;
}

}  // namespace

TEST_CASE("quadric models satisfy their invariants") {
    for (std::uint64_t q : {2u, 3u, 4u, 5u, 7u, 8u, 9u, 11u, 16u}) {
        auto f = make_field_of_order(q);
        const auto m = build_quadric(f);
        CHECK_NOTHROW(verify_model(m));
        // an elliptic quadric has q^2 + 1 rational points
        CHECK(m.points.size() == q * q + 1);
        CHECK(m.c0.size() == q + 1);
        CHECK(m.node == Point{f->zero(), f->zero(), f->one(), f->one()});
        CHECK(m.plane_coord == 2);
        if (q % 2 == 1) CHECK(closed_form_projection_check(m));
    }
    CHECK_THROWS_AS(build_quadric_odd(make_field(2, 2)), Error);
    CHECK_THROWS_AS(build_quadric_char2(make_field(3, 1)), Error);
}

TEST_CASE("projection round trip") {
    for (std::uint64_t q : {2u, 3u, 4u, 5u, 8u, 9u}) {
        auto f = make_field_of_order(q);
        const auto m = build_quadric(f);
        const NodeProjection proj(m);
        const PointTable plane(f, 2);
        std::size_t exceptional = 0;
        for (std::size_t i = 0; i < plane.size(); ++i) {
            const auto lift = proj.backward(plane.point(i));
            if (lift.exceptional) {
                ++exceptional;
                CHECK(lift.point == m.node);
                CHECK(plane.index_of(proj.forward_direction(lift.direction)) == i);
            } else {
                CHECK(m.quadric.eval(lift.point).v == 0);
                CHECK(plane.index_of(proj.forward(lift.point)) == i);
            }
        }
        // the tangent plane at P meets H in a line
        CHECK(exceptional == q + 1);
    }
    auto f3 = make_field(3, 1);
    const auto m3 = build_quadric(f3);
    const auto lift = NodeProjection(m3).backward(Point{Elem{1}, Elem{0}, Elem{0}});
    CHECK(lift.exceptional);
    CHECK(lift.point == Point{Elem{0}, Elem{0}, Elem{1}, Elem{1}});
}

TEST_CASE("odd q realization matches the closed-form composition") {
    for (std::uint64_t q : {3u, 5u, 7u, 9u, 11u}) {
        auto f = make_field_of_order(q);
        const auto m = build_quadric_odd(f);
        const PointTable plane(f, 2);
        for (const auto& [a, b] : conic_parameters(*f, m.t)) {
            const auto perm = descend(m, fiberwise_extension(m, a, b), plane);
            REQUIRE(perm == closed_form_realization(f, m.t, a, b));
            REQUIRE(interpolated_extension(m, a, b).action == fiberwise_extension(m, a, b).action);
        }
    }
}

TEST_CASE("odd q realization properties") {
    for (std::uint64_t q : {3u, 5u, 7u, 9u, 13u}) {
        auto f = make_field_of_order(q);
        const auto r = build_realization(f);
        CHECK(r.sign == -1);
        CHECK(r.fixed_points == q * q);
        CHECK(r.cycle_type == CycleType{{1, q * q}, {q + 1, 1}});
        CHECK(r.c0_points.size() == q + 1);
        CHECK(r.c0_cycle_type == CycleType{{q + 1, 1}});
        for (const auto i : r.c0_points) CHECK(r.permutation(i) != i);
        REQUIRE(r.collinearity.has_value());
        const PointTable plane(f, 2);
        const auto& w = *r.collinearity;
        CHECK(collinear(*f, plane.point(w.points[0]), plane.point(w.points[1]), plane.point(w.points[2])));
        CHECK_FALSE(collinear(*f, plane.point(w.images[0]), plane.point(w.images[1]), plane.point(w.images[2])));

        // inverse rotation undoes f
        const auto inv = build_realization(f, r.alpha, f->neg(r.beta));
        CHECK(compose(inv.permutation, r.permutation).is_identity());
    }
}

TEST_CASE("characteristic 2 realizations") {
    auto f2 = make_field(2, 1);
    const auto r2 = build_realization(f2);
    CHECK(r2.permutation.size() == 7);
    CHECK(r2.sign == -1);
    CHECK(r2.collinearity.has_value());
    for (std::uint64_t q : {4u, 8u, 16u}) {
        auto f = make_field_of_order(q);
        const auto r = build_realization(f);
        CHECK(r.permutation.size() == q * q + q + 1);
        CHECK(r.collinearity.has_value());
        // x <-> y on C0 fixes exactly the point x = y of C0
        CHECK(r.c0_cycle_type == CycleType{{1, 1}, {2, q / 2}});
    }
    // swapping on every fiber is linear and fixes P, so f is a collineation
    for (std::uint64_t q : {2u, 4u, 8u}) {
        const auto g = build_global_swap_realization(make_field_of_order(q));
        CHECK_FALSE(g.collinearity.has_value());
    }
}

TEST_CASE("parameter validation") {
    auto f5 = make_field(5, 1);
    const auto m = build_quadric_odd(f5);
    CHECK_THROWS_AS(fiberwise_extension(m, Elem{2}, Elem{1}), Error);
    try {
        multiplier_action_check(f5, Elem{1}, Elem{0});
        FAIL("alpha = 1 accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidParameters);
    }
    CHECK_THROWS_AS(fiberwise_swap(m), Error);
    CHECK_THROWS_AS(multiplier_action_check(make_field(2, 2), Elem{1}, Elem{0}), Error);
}

TEST_CASE("conic rotations act as multiplication in the quadratic extension") {
    for (std::uint64_t q : {3u, 5u, 7u, 9u, 11u, 13u}) {
        auto f = make_field_of_order(q);
        const Elem t = first_nonsquare(*f);
        std::size_t checked = 0;
        for (const auto& [a, b] : conic_parameters(*f, t)) {
            if (a == f->one()) continue;
            REQUIRE(multiplier_action_check(f, a, b));
            ++checked;
        }
        // q + 1 points on the conic, one of which is alpha = 1
        CHECK(checked == q);
    }
}

TEST_CASE("interpolation polynomials") {
    for (std::uint64_t q : {2u, 3u, 4u, 5u}) {
        auto f = make_field_of_order(q);
        for (unsigned n : {1u, 2u}) {
            const PointTable table(f, n);
            const auto unit = unit_indicator(n, f);
            std::vector<std::pair<Point, Point>> pairs;
            const PointTable line(f, 1);
            for (std::size_t k = 0; k < 5; ++k)
                pairs.emplace_back(line.point_vec(k % line.size()), line.point_vec((3 * k + 1) % line.size()));
            for (std::size_t i = 0; i < table.size(); ++i) {
                const auto ind = point_indicator(n, f, table.point(i));
                CHECK(ind.is_homogeneous());
                CHECK(ind.degree() == (q - 1) * (n + 1));
                for (std::size_t j = 0; j < table.size(); ++j) {
                    REQUIRE(ind.eval(table.point(j)) == (i == j ? f->one() : f->zero()));
                    REQUIRE(unit.eval(table.point(j)) == f->one());
                }
                for (const auto& [p1, p2] : pairs) {
                    const auto h = interpolation_map(n, f, table.point(i), p1, p2);
                    for (std::size_t j = 0; j < table.size(); ++j) {
                        const auto v = h.evaluate(table.point(j));
                        REQUIRE(v.has_value());
                        REQUIRE(*v == (i == j ? p1 : p2));
                    }
                }
            }
        }
    }
}
