#include "cremona/classical_involutions.hpp"

#include <algorithm>
#include <map>

#include "cremona/error.hpp"
#include "cremona/linalg.hpp"

namespace cremona {

namespace {

void require_char2(const Field& f) {
    if (f.characteristic() != 2) fail(ErrorCode::OddCharacteristic, "the involution models are for q = 2^m");
}

void require_form(const Polynomial& p, unsigned nvars, unsigned degree, const char* name) {
    if (p.nvars() != nvars) fail(ErrorCode::DimensionMismatch, std::string(name) + " has the wrong number of variables");
    if (!p.is_homogeneous() || (!p.is_zero() && p.degree() != degree))
        fail(ErrorCode::DegenerateInput, std::string(name) + " must be a form of degree " + std::to_string(degree));
}

/// Roots of w^2 + b w + c over GF(2^m), ascending by index.
class QuadraticSolver {
public:
    explicit QuadraticSolver(const Field& f) : f_(f), root_(f.cardinality(), -1) {
        // u^2 + u is two-to-one; keep the smaller root of each value
        for (std::uint64_t i = f.cardinality(); i-- > 0;) {
            const Elem u = f.element(i);
            root_[f.add(f.mul(u, u), u).v] = static_cast<std::int64_t>(i);
        }
    }

    std::vector<Elem> solve(Elem b, Elem c) const {
        if (b.v == 0) return {*f_.sqrt(c)};
        const Elem v = f_.div(c, f_.mul(b, b));
        if (root_[v.v] < 0) return {};
        const Elem u = f_.element(static_cast<std::uint64_t>(root_[v.v]));
        std::vector<Elem> out{f_.mul(b, u), f_.mul(b, f_.add(u, f_.one()))};
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    const Field& f_;
    std::vector<std::int64_t> root_;
};

// Rename variables of p (k variables) into nvars variables at the given slots.
Polynomial lift(const Polynomial& p, unsigned nvars, const std::vector<unsigned>& slots) {
    std::vector<Polynomial> images;
    for (const unsigned s : slots) images.push_back(Polynomial::variable(p.field(), nvars, s));
    if (p.is_zero()) return Polynomial(p.field(), nvars);
    return p.substitute(images);
}

void screen_singular(const WeightedHypersurface& s) {
    std::vector<Polynomial> partials;
    for (unsigned i = 0; i < s.weights.size(); ++i) partials.push_back(s.equation.derivative(i));
    for (const auto& x : s.points) {
        bool singular = true;
        for (const auto& d : partials) singular = singular && d.eval(x).v == 0;
        if (singular) fail(ErrorCode::SingularSurface, "the surface is singular at a rational point");
    }
}

Permutation permutation_on(const WeightedHypersurface& s, const std::vector<Point>& images) {
    std::map<Point, std::uint32_t> index;
    for (std::size_t i = 0; i < s.points.size(); ++i) index.emplace(s.points[i], static_cast<std::uint32_t>(i));
    std::vector<std::uint32_t> img(s.points.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        const auto it = index.find(images[i]);
        if (it == index.end()) fail(ErrorCode::InvariantViolation, "involution leaves the surface");
        img[i] = it->second;
    }
    return Permutation(std::move(img));
}

}  // namespace

InvolutionCensus involution_census(const Permutation& p) {
    InvolutionCensus c;
    c.points = p.size();
    c.fixed = p.fixed_points();
    c.sign = p.sign();
    c.fixed_mod4 = static_cast<unsigned>(c.fixed % 4);
    c.involution = compose(p, p).is_identity();
    c.permutation = p;
    return c;
}

WeightedHypersurface degree_two_surface(const Polynomial& f, const Polynomial& g) {
    const FieldPtr& field = f.field();
    const Field& k = *field;
    require_char2(k);
    if (!g.field()->same_as(k)) fail(ErrorCode::MixedFields, "f and g over different fields");
    require_form(f, 3, 2, "f");
    require_form(g, 3, 4, "g");
    if (f.is_zero()) fail(ErrorCode::ZeroBranchPolynomial, "f = 0 gives an inseparable double cover");

    const auto w = Polynomial::variable(field, 4, 0);
    WeightedHypersurface s{{2, 1, 1, 1}, field, w * w + w * lift(f, 4, {1, 2, 3}) + lift(g, 4, {1, 2, 3}), {}};

    const QuadraticSolver solver(k);
    const PointTable plane(field, 2);
    for (std::size_t i = 0; i < plane.size(); ++i) {
        const auto p = plane.point(i);
        for (const Elem root : solver.solve(f.eval(p), g.eval(p))) s.points.push_back({root, p[0], p[1], p[2]});
    }
    screen_singular(s);
    return s;
}

InvolutionReport geiser_census(const Polynomial& f, const Polynomial& g) {
    InvolutionReport r{degree_two_surface(f, g), {}};
    const Field& k = *r.surface.field;
    std::vector<Point> images;
    for (const auto& x : r.surface.points) {
        const Point xyz{x[1], x[2], x[3]};
        images.push_back({k.add(x[0], f.eval(xyz)), x[1], x[2], x[3]});
    }
    r.census = involution_census(permutation_on(r.surface, images));
    return r;
}

Point bertini_base_point(const FieldPtr& field) { return {field->one(), field->one(), field->zero(), field->zero()}; }

WeightedHypersurface degree_one_surface(const BertiniData& a) {
    const FieldPtr& field = a.a1.field();
    const Field& k = *field;
    require_char2(k);
    for (const Polynomial* p : {&a.a2, &a.a3, &a.a4, &a.a6})
        if (!p->field()->same_as(k)) fail(ErrorCode::MixedFields, "coefficient forms over different fields");
    require_form(a.a1, 2, 1, "a1");
    require_form(a.a2, 2, 2, "a2");
    require_form(a.a3, 2, 3, "a3");
    require_form(a.a4, 2, 4, "a4");
    require_form(a.a6, 2, 6, "a6");
    if (a.a1.is_zero() && a.a3.is_zero()) fail(ErrorCode::SingularSurface, "a1 = a3 = 0 makes every point singular");

    const auto w = Polynomial::variable(field, 4, 0);
    const auto z = Polynomial::variable(field, 4, 1);
    const std::vector<unsigned> xy{2, 3};
    WeightedHypersurface s{{3, 2, 1, 1},
                           field,
                           w * w + w * z * lift(a.a1, 4, xy) + w * lift(a.a3, 4, xy) -
                               (z * z * z + z * z * lift(a.a2, 4, xy) + z * lift(a.a4, 4, xy) + lift(a.a6, 4, xy)),
                           {}};

    s.points.push_back(bertini_base_point(field));
    const QuadraticSolver solver(k);
    const PointTable line(field, 1);
    for (std::size_t i = 0; i < line.size(); ++i) {
        const auto p = line.point(i);
        const Elem c1 = a.a1.eval(p), c2 = a.a2.eval(p), c3 = a.a3.eval(p), c4 = a.a4.eval(p), c6 = a.a6.eval(p);
        for (std::uint64_t iz = 0; iz < k.cardinality(); ++iz) {
            const Elem zz = k.element(iz);
            const Elem b = k.add(k.mul(c1, zz), c3);
            const Elem z2 = k.mul(zz, zz);
            const Elem c = k.add(k.add(k.mul(z2, zz), k.mul(c2, z2)), k.add(k.mul(c4, zz), c6));
            for (const Elem root : solver.solve(b, c)) s.points.push_back({root, zz, p[0], p[1]});
        }
    }
    screen_singular(s);
    return s;
}

std::vector<Polynomial> bertini_substitution(const BertiniData& a) {
    const FieldPtr& field = a.a1.field();
    const auto w = Polynomial::variable(field, 4, 0);
    const auto z = Polynomial::variable(field, 4, 1);
    const std::vector<unsigned> xy{2, 3};
    return {w + z * lift(a.a1, 4, xy) + lift(a.a3, 4, xy), z, Polynomial::variable(field, 4, 2),
            Polynomial::variable(field, 4, 3)};
}

InvolutionReport bertini_census(const BertiniData& a) {
    InvolutionReport r{degree_one_surface(a), {}};
    const auto sub = bertini_substitution(a);
    if (!(r.surface.equation.substitute(sub) == r.surface.equation))
        fail(ErrorCode::InvolutionDoesNotPreserveSurface, "w -> w + a1 z + a3 changes the equation");
    std::vector<Point> images;
    for (const auto& x : r.surface.points) {
        Point y(4);
        for (unsigned i = 0; i < 4; ++i) y[i] = sub[i].eval(x);
        images.push_back(std::move(y));
    }
    r.census = involution_census(permutation_on(r.surface, images));
    return r;
}

std::pair<Polynomial, Polynomial> random_geiser_instance(const FieldPtr& field, std::mt19937_64& rng) {
    require_char2(*field);
    while (true) {
        auto f = random_form(field, 3, 2, rng);
        auto g = random_form(field, 3, 4, rng);
        if (f.is_zero()) continue;
        try {
            degree_two_surface(f, g);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SingularSurface) throw;
            continue;
        }
        return {std::move(f), std::move(g)};
    }
}

BertiniData random_bertini_instance(const FieldPtr& field, std::mt19937_64& rng) {
    require_char2(*field);
    while (true) {
        BertiniData a{random_form(field, 2, 1, rng), random_form(field, 2, 2, rng), random_form(field, 2, 3, rng),
                      random_form(field, 2, 4, rng), random_form(field, 2, 6, rng)};
        if (a.a1.is_zero() && a.a3.is_zero()) continue;
        try {
            degree_one_surface(a);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SingularSurface) throw;
            continue;
        }
        return a;
    }
}

namespace {

void tally(BatchSummary& b, const InvolutionCensus& c, std::uint64_t q) {
    ++b.instances;
    b.involutions += c.involution;
    b.fixed_one_mod4 += c.fixed_mod4 == 1;
    b.even += c.sign == 1;
    b.count_one_mod_q += c.points % q == 1;
    b.censuses.push_back(c);
}

}  // namespace

BatchSummary geiser_batch(const FieldPtr& field, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    BatchSummary b;
    for (std::size_t i = 0; i < count; ++i) {
        const auto [f, g] = random_geiser_instance(field, rng);
        tally(b, geiser_census(f, g).census, field->cardinality());
    }
    return b;
}

BatchSummary bertini_batch(const FieldPtr& field, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    BatchSummary b;
    for (std::size_t i = 0; i < count; ++i) {
        const auto r = bertini_census(random_bertini_instance(field, rng));
        tally(b, r.census, field->cardinality());
        // the base point is listed first
        b.base_point_fixed += r.census.permutation(0) == 0;
    }
    return b;
}

Point default_orbit_seed(const FieldPtr& field) {
    const auto big = make_field(field->characteristic(), 3 * field->degree());
    const Elem c = big->primitive_element();
    return {big->one(), c, big->mul(c, c)};
}

QuadraticTransformation quadratic_transformation(const FieldPtr& field, std::span<const Elem> seed) {
    const Field& k = *field;
    const auto big_field = make_field(k.characteristic(), 3 * k.degree());
    const Field& big = *big_field;
    const SubfieldEmbedding emb(field, big_field);
    if (seed.size() != 3) fail(ErrorCode::DimensionMismatch, "the seed is a point of P^2");
    const Point p = normalize(big, seed);
    if (std::all_of(p.begin(), p.end(), [&](Elem e) { return emb.in_subfield(e); }))
        fail(ErrorCode::NotDegreeThree, "the seed is a rational point");

    QuadraticTransformation out{field, RationalMap({Polynomial::variable(field, 3, 0)}), {}, {}, {}};
    Matrix g(3, 3);
    for (unsigned c = 0; c < 3; ++c) {
        Point conj(3);
        for (unsigned r = 0; r < 3; ++r) conj[r] = emb.relative_frobenius(p[r], c);
        for (unsigned r = 0; r < 3; ++r) g(r, c) = conj[r];
        out.base_points.push_back(normalize(big, conj));
    }
    const auto ginv = inverse(big, g);
    if (!ginv) fail(ErrorCode::CollinearOrbit, "the conjugate points are collinear");

    std::vector<Polynomial> ell;
    for (unsigned r = 0; r < 3; ++r) {
        Polynomial form(big_field, 3);
        for (unsigned c = 0; c < 3; ++c) {
            Exponents e(3, 0);
            e[c] = 1;
            form.add_term(e, (*ginv)(r, c));
        }
        ell.push_back(std::move(form));
    }
    const std::vector<Polynomial> s{ell[1] * ell[2], ell[0] * ell[2], ell[0] * ell[1]};
    std::vector<Polynomial> comps;
    for (unsigned r = 0; r < 3; ++r) {
        Polynomial c(big_field, 3);
        for (unsigned j = 0; j < 3; ++j) c = c + s[j].scaled(g(r, j));
        comps.push_back(std::move(c));
    }
    // scale so that the coefficients descend to GF(q)
    Elem lead{};
    for (const auto& c : comps) {
        if (!c.is_zero()) {
            lead = c.terms().begin()->second;
            break;
        }
    }
    std::vector<Polynomial> rational;
    for (const auto& c : comps) {
        Polynomial d(field, 3);
        for (const auto& [e, v] : c.terms()) {
            const auto x = emb.restrict_to_source(big.div(v, lead));
            if (!x) fail(ErrorCode::InvariantViolation, "quadratic transformation is not defined over the base field");
            d.add_term(e, *x);
        }
        rational.push_back(std::move(d));
    }
    out.map = RationalMap(std::move(rational), "quadratic transformation");

    Point fixed(3);
    for (unsigned r = 0; r < 3; ++r) {
        const auto x = emb.restrict_to_source(big.add(big.add(g(r, 0), g(r, 1)), g(r, 2)));
        if (!x) fail(ErrorCode::InvariantViolation, "trace point is not rational");
        fixed[r] = *x;
    }
    out.fixed_point = normalize(k, fixed);

    const PointTable plane(field, 2);
    const auto induced = induced_permutation(out.map, plane);
    if (!induced.bijective()) fail(ErrorCode::InvariantViolation, "quadratic transformation is not regular on rational points");
    out.census = involution_census(*induced.permutation);
    return out;
}

QuadraticTransformation quadratic_transformation(const FieldPtr& field) {
    return quadratic_transformation(field, default_orbit_seed(field));
}

}  // namespace cremona
