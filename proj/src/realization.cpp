#include "cremona/realization.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>

#include "cremona/error.hpp"

namespace cremona {

namespace {

Polynomial var4(const FieldPtr& f, unsigned i) { return Polynomial::variable(f, 4, i); }

void finish_model(QuadricModel& m) {
    const Field& f = *m.field;
    for (unsigned i = 0; i < 4; ++i) m.gradient.push_back(m.quadric.derivative(i));
    m.space = std::make_shared<const PointTable>(m.field, 3);
    const PointTable& p3 = *m.space;
    m.lookup.assign(p3.size(), -1);
    for (std::size_t i = 0; i < p3.size(); ++i) {
        if (m.quadric.eval(p3.point(i)).v != 0) continue;
        m.lookup[i] = static_cast<std::int64_t>(m.points.size());
        m.points.push_back(p3.point_vec(i));
    }
    for (std::size_t i = 0; i < m.points.size(); ++i) {
        if (m.points[i][2] == f.zero()) m.c0.push_back(i);
    }
}

// H is the first coordinate plane not containing P.
void choose_plane(QuadricModel& m) {
    for (unsigned k = 0; k < 4; ++k) {
        if (m.node[k].v == 0) continue;
        m.plane_coord = k;
        return;
    }
}

}  // namespace

std::size_t QuadricModel::point_index(std::span<const Elem> x) const {
    const auto idx = lookup.at(space->index_of(x));
    if (idx < 0) fail(ErrorCode::InvariantViolation, "point is not on the quadric");
    return static_cast<std::size_t>(idx);
}

Point QuadricModel::fiber_of(std::span<const Elem> x) const {
    const Point zw{x[2], x[3]};
    return normalize(*field, zw);
}

Point QuadricModel::plane_coords(std::span<const Elem> x) const {
    if (x[plane_coord].v != 0) fail(ErrorCode::InvariantViolation, "point is not on the projection plane");
    Point y;
    for (unsigned i = 0; i < 4; ++i) {
        if (i != plane_coord) y.push_back(x[i]);
    }
    return normalize(*field, y);
}

Point QuadricModel::from_plane(std::span<const Elem> y) const {
    if (y.size() != 3) fail(ErrorCode::DimensionMismatch, "plane points have three coordinates");
    Point x;
    for (unsigned i = 0, j = 0; i < 4; ++i) x.push_back(i == plane_coord ? field->zero() : y[j++]);
    return x;
}

QuadricModel build_quadric_odd(const FieldPtr& field) {
    const Field& f = *field;
    if (f.characteristic() == 2) fail(ErrorCode::EvenCharacteristic, "odd model needs odd q");
    const Elem t = first_nonsquare(f);
    const auto x = var4(field, 0), y = var4(field, 1), z = var4(field, 2), w = var4(field, 3);
    QuadricModel m(field, x * x - (y * y).scaled(t) + z * z - w * w);
    m.odd_characteristic = true;
    m.t = t;
    m.node = {f.zero(), f.zero(), f.one(), f.one()};
    finish_model(m);
    choose_plane(m);
    return m;
}

QuadricModel build_quadric_char2(const FieldPtr& field) {
    const Field& f = *field;
    if (f.characteristic() != 2) fail(ErrorCode::OddCharacteristic, "characteristic 2 model needs even q");
    // s = 1 so that x <-> y preserves the quadric
    const Elem s = f.one();
    std::optional<Elem> r;
    for (std::uint64_t ir = 0; ir < f.cardinality() && !r; ++ir) {
        const Elem cand = f.element(ir);
        bool rootless = true;
        for (std::uint64_t iX = 0; iX < f.cardinality() && rootless; ++iX) {
            const Elem X = f.element(iX);
            if (f.add(f.add(f.mul(X, X), f.mul(cand, X)), s).v == 0) rootless = false;
        }
        if (rootless) r = cand;
    }
    if (!r) fail(ErrorCode::InvariantViolation, "no irreducible X^2 + rX + 1");
    const auto x = var4(field, 0), y = var4(field, 1), z = var4(field, 2), w = var4(field, 3);
    QuadricModel m(field, x * x + (x * y).scaled(*r) + (y * y).scaled(s) + z * z + x * (z + w) + y * (z + w) + z * w);
    m.odd_characteristic = false;
    m.r = *r;
    m.s = s;
    finish_model(m);

    // lone rational points of rational fibers
    std::map<Point, std::vector<std::size_t>> by_fiber;
    for (std::size_t i = 0; i < m.points.size(); ++i) by_fiber[m.fiber_of(m.points[i])].push_back(i);
    std::optional<std::size_t> best;
    for (const auto& [fiber, members] : by_fiber) {
        if (members.size() != 1) continue;
        if (!best || members.front() < *best) best = members.front();
    }
    if (!best) fail(ErrorCode::NoDegenerateRationalFiber, "no rational fiber has a single rational point");
    m.node = m.points[*best];
    choose_plane(m);
    return m;
}

QuadricModel build_quadric(const FieldPtr& field) {
    return field->characteristic() == 2 ? build_quadric_char2(field) : build_quadric_odd(field);
}

void verify_model(const QuadricModel& m) {
    const Field& f = *m.field;
    const PointTable& p3 = *m.space;
    for (std::size_t i = 0; i < p3.size(); ++i) {
        const auto x = p3.point(i);
        if (m.quadric.eval(x).v != 0) continue;
        bool singular = true;
        for (const auto& g : m.gradient) singular = singular && g.eval(x).v == 0;
        if (singular) fail(ErrorCode::SingularSurface, "quadric is singular at a rational point");
    }
    if (m.quadric.eval(m.node).v != 0) fail(ErrorCode::InvariantViolation, "node is not on the quadric");

    // C0 as a plane conic in [x:y:w]
    const Polynomial zero(m.field, 3);
    const std::vector<Polynomial> restrict_z{Polynomial::variable(m.field, 3, 0), Polynomial::variable(m.field, 3, 1),
                                             zero, Polynomial::variable(m.field, 3, 2)};
    const Polynomial conic = m.quadric.substitute(restrict_z);
    const PointTable p2(m.field, 2);
    std::size_t count = 0;
    for (std::size_t i = 0; i < p2.size(); ++i) {
        const auto y = p2.point(i);
        if (conic.eval(y).v != 0) continue;
        ++count;
        bool singular = true;
        for (unsigned k = 0; k < 3; ++k) singular = singular && conic.derivative(k).eval(y).v == 0;
        if (singular) fail(ErrorCode::InvariantViolation, "C0 is singular");
    }
    if (count != f.cardinality() + 1 || m.c0.size() != count)
        fail(ErrorCode::InvariantViolation, "C0 does not have q+1 rational points");

    // L = {z = w = 0}
    for (const auto& x : m.points) {
        if (x[2].v == 0 && x[3].v == 0) fail(ErrorCode::InvariantViolation, "L meets the quadric in a rational point");
    }
    if (m.node[m.plane_coord].v == 0) fail(ErrorCode::InvariantViolation, "node lies on the projection plane");
}

NodeProjection::NodeProjection(const QuadricModel& model) : model_(&model) {
    for (const auto& g : model.gradient) polar_.push_back(g.eval(model.node));
}

Point NodeProjection::forward_direction(std::span<const Elem> d) const {
    const Field& f = *model_->field;
    const unsigned k = model_->plane_coord;
    const Elem hp = model_->node[k];
    const Elem hx = d[k];
    Point v(4);
    for (unsigned i = 0; i < 4; ++i) v[i] = f.sub(f.mul(hp, d[i]), f.mul(hx, model_->node[i]));
    if (is_zero_tuple(v)) fail(ErrorCode::DegenerateInput, "cannot project the node from itself");
    return model_->plane_coords(v);
}

Point NodeProjection::forward(std::span<const Elem> x) const {
    if (same_point(*model_->field, x, model_->node)) fail(ErrorCode::DegenerateInput, "cannot project the node");
    return forward_direction(x);
}

Lift NodeProjection::backward(std::span<const Elem> y) const {
    const Field& f = *model_->field;
    const Point Y = model_->from_plane(y);
    Elem b = f.zero();
    for (unsigned i = 0; i < 4; ++i) b = f.add(b, f.mul(polar_[i], Y[i]));
    const Elem qy = model_->quadric.eval(Y);
    Lift out;
    if (b.v == 0) {
        if (qy.v == 0) fail(ErrorCode::InvariantViolation, "a rational line through the node lies on the quadric");
        out.point = model_->node;
        out.exceptional = true;
        out.direction = normalize(f, Y);
        return out;
    }
    Point x(4);
    for (unsigned i = 0; i < 4; ++i) x[i] = f.sub(f.mul(b, Y[i]), f.mul(qy, model_->node[i]));
    out.point = normalize(f, x);
    return out;
}

QuadricSelfMap fiberwise_extension(const QuadricModel& m, Elem a, Elem b) {
    const Field& f = *m.field;
    if (!m.odd_characteristic) fail(ErrorCode::EvenCharacteristic, "conic rotations need odd q");
    if (f.sub(f.mul(a, a), f.mul(m.t, f.mul(b, b))) != f.one())
        fail(ErrorCode::InvalidParameters, "alpha^2 - t beta^2 must be 1");
    QuadricSelfMap g;
    g.tangent = Matrix::identity(4);
    g.action.resize(m.points.size());
    for (std::size_t i = 0; i < m.points.size(); ++i) {
        const auto& x = m.points[i];
        if (x[2].v != 0) {
            g.action[i] = static_cast<std::uint32_t>(i);
            continue;
        }
        const Point gx{f.add(f.mul(a, x[0]), f.mul(m.t, f.mul(b, x[1]))), f.add(f.mul(b, x[0]), f.mul(a, x[1])), x[2],
                       x[3]};
        g.action[i] = static_cast<std::uint32_t>(m.point_index(gx));
    }
    return g;
}

QuadricSelfMap interpolated_extension(const QuadricModel& m, Elem a, Elem b) {
    const Field& f = *m.field;
    if (!m.odd_characteristic) fail(ErrorCode::EvenCharacteristic, "conic rotations need odd q");
    if (f.sub(f.mul(a, a), f.mul(m.t, f.mul(b, b))) != f.one())
        fail(ErrorCode::InvalidParameters, "alpha^2 - t beta^2 must be 1");
    // rotation parameter zeta = beta / (alpha + 1) = (alpha - 1) / (t beta)
    Point zeta0 = f.add(a, f.one()).v != 0 ? Point{b, f.add(a, f.one())} : Point{f.sub(a, f.one()), f.mul(m.t, b)};
    zeta0 = normalize(f, zeta0);
    const Point base0{f.zero(), f.one()};
    const RationalMap h = interpolation_map(1, m.field, base0, zeta0, base0);

    QuadricSelfMap g;
    g.tangent = Matrix::identity(4);
    g.action.resize(m.points.size());
    for (std::size_t i = 0; i < m.points.size(); ++i) {
        const auto& x = m.points[i];
        const auto zeta = h.evaluate(m.fiber_of(x));
        if (!zeta) fail(ErrorCode::InvariantViolation, "interpolation map has a rational base point");
        const Elem u = (*zeta)[0], v = (*zeta)[1];
        const Elem tu2 = f.mul(m.t, f.mul(u, u));
        const Elem den = f.sub(f.mul(v, v), tu2);
        const Elem alpha = f.div(f.add(f.mul(v, v), tu2), den);
        const Elem beta = f.div(f.mul(f.from_integer(2), f.mul(u, v)), den);
        const Point gx{f.add(f.mul(alpha, x[0]), f.mul(m.t, f.mul(beta, x[1]))),
                       f.add(f.mul(beta, x[0]), f.mul(alpha, x[1])), x[2], x[3]};
        g.action[i] = static_cast<std::uint32_t>(m.point_index(gx));
    }
    return g;
}

QuadricSelfMap fiberwise_swap(const QuadricModel& m) {
    if (m.odd_characteristic) fail(ErrorCode::OddCharacteristic, "the swap model needs characteristic 2");
    QuadricSelfMap g;
    g.tangent = Matrix::identity(4);
    g.action.resize(m.points.size());
    for (std::size_t i = 0; i < m.points.size(); ++i) {
        const auto& x = m.points[i];
        g.action[i] = static_cast<std::uint32_t>(x[2].v == 0 ? m.point_index(Point{x[1], x[0], x[2], x[3]}) : i);
    }
    return g;
}

QuadricSelfMap global_swap(const QuadricModel& m) {
    if (m.odd_characteristic) fail(ErrorCode::OddCharacteristic, "the swap model needs characteristic 2");
    QuadricSelfMap g;
    g.tangent = Matrix(4, 4);
    g.tangent(0, 1) = g.tangent(1, 0) = g.tangent(2, 2) = g.tangent(3, 3) = Elem{1};
    g.action.resize(m.points.size());
    for (std::size_t i = 0; i < m.points.size(); ++i) {
        const auto& x = m.points[i];
        g.action[i] = static_cast<std::uint32_t>(m.point_index(Point{x[1], x[0], x[2], x[3]}));
    }
    return g;
}

Permutation descend(const QuadricModel& m, const QuadricSelfMap& g, const PointTable& plane) {
    const Field& f = *m.field;
    if (plane.dimension() != 2 || !plane.field()->same_as(f)) fail(ErrorCode::DimensionMismatch, "needs P^2 over the model field");
    const NodeProjection proj(m);
    const std::size_t node = m.point_index(m.node);
    if (g.action.at(node) != node) fail(ErrorCode::InvariantViolation, "self-map does not fix the node");
    std::vector<std::uint32_t> img(plane.size());
    for (std::size_t i = 0; i < plane.size(); ++i) {
        const Lift lift = proj.backward(plane.point(i));
        Point image;
        if (lift.exceptional) {
            image = proj.forward_direction(apply(f, g.tangent, lift.direction));
        } else {
            const auto& gx = m.points[g.action[m.point_index(lift.point)]];
            image = proj.forward(gx);
        }
        img[i] = static_cast<std::uint32_t>(plane.index_of(image));
    }
    return Permutation(std::move(img));
}

bool closed_form_projection_check(const QuadricModel& m) {
    const Field& f = *m.field;
    if (!m.odd_characteristic) fail(ErrorCode::EvenCharacteristic, "closed formulas are for odd q");
    const NodeProjection proj(m);
    for (const auto& x : m.points) {
        if (same_point(f, x, m.node)) continue;
        const Point expected{x[0], x[1], f.sub(x[3], x[2])};
        if (!same_point(f, proj.forward(x), expected)) return false;
    }
    const PointTable plane(m.field, 2);
    const Elem two = f.from_integer(2);
    for (std::size_t i = 0; i < plane.size(); ++i) {
        const auto y = plane.point(i);
        const Elem u = y[2];
        const Elem n = f.sub(f.mul(y[0], y[0]), f.mul(m.t, f.mul(y[1], y[1])));
        const Point expected{f.mul(two, f.mul(u, y[0])), f.mul(two, f.mul(u, y[1])), f.sub(n, f.mul(u, u)),
                             f.add(n, f.mul(u, u))};
        const Lift lift = proj.backward(y);
        if (!same_point(f, lift.point, expected)) return false;
        if (lift.exceptional != (u.v == 0)) return false;
    }
    return true;
}

namespace {

RealizationReport summarize(const QuadricModel& m, Permutation perm, const PointTable& plane) {
    RealizationReport r;
    r.field = m.field;
    r.sign = perm.sign();
    r.fixed_points = perm.fixed_points();
    r.cycle_type = perm.cycle_type();
    const NodeProjection proj(m);
    for (const std::size_t i : m.c0) r.c0_points.push_back(plane.index_of(proj.forward(m.points[i])));
    std::sort(r.c0_points.begin(), r.c0_points.end());
    const std::set<std::size_t> c0(r.c0_points.begin(), r.c0_points.end());
    for (const auto& cyc : perm.cycles()) {
        const bool meets = std::any_of(cyc.begin(), cyc.end(), [&](std::uint32_t v) { return c0.count(v) > 0; });
        if (meets) ++r.c0_cycle_type[cyc.size()];
    }
    r.collinearity = collinearity_witness(perm, plane);
    r.permutation = std::move(perm);
    return r;
}

}  // namespace

RealizationReport build_realization(const FieldPtr& field, Elem alpha, Elem beta) {
    const QuadricModel m = build_quadric_odd(field);
    verify_model(m);
    const PointTable plane(field, 2);
    auto r = summarize(m, descend(m, fiberwise_extension(m, alpha, beta), plane), plane);
    r.alpha = alpha;
    r.beta = beta;
    return r;
}

RealizationReport build_realization(const FieldPtr& field) {
    if (field->characteristic() != 2) {
        const auto special = find_special_multiplier(field, first_nonsquare(*field));
        return build_realization(field, special.alpha, special.beta);
    }
    const QuadricModel m = build_quadric_char2(field);
    verify_model(m);
    const PointTable plane(field, 2);
    return summarize(m, descend(m, fiberwise_swap(m), plane), plane);
}

RealizationReport build_global_swap_realization(const FieldPtr& field) {
    const QuadricModel m = build_quadric_char2(field);
    verify_model(m);
    const PointTable plane(field, 2);
    return summarize(m, descend(m, global_swap(m), plane), plane);
}

bool multiplier_action_check(const FieldPtr& field, Elem alpha, Elem beta) {
    const Field& f = *field;
    if (f.characteristic() == 2) fail(ErrorCode::EvenCharacteristic, "requires odd characteristic");
    const Elem t = first_nonsquare(f);
    if (f.sub(f.mul(alpha, alpha), f.mul(t, f.mul(beta, beta))) != f.one())
        fail(ErrorCode::InvalidParameters, "alpha^2 - t beta^2 must be 1");
    if (alpha == f.one()) fail(ErrorCode::InvalidParameters, "alpha = 1 gives the identity and a zero multiplier");

    const auto big_field = make_field(f.characteristic(), 2 * f.degree());
    const Field& big = *big_field;
    const SubfieldEmbedding emb(field, big_field);
    const auto s = big.sqrt(big.inv(emb.embed(t)));
    if (!s) fail(ErrorCode::InvariantViolation, "1/t has no square root in the quadratic extension");
    const Elem mult = big.add(emb.embed(beta), big.mul(big.sub(emb.embed(alpha), big.one()), *s));

    // stereographic coordinate from [-1:0:1] on x^2 - t y^2 = w^2
    const auto zeta = [&](Elem x, Elem y, Elem w) {
        Elem num = y, den = f.add(w, x);
        if (num.v == 0 && den.v == 0) {
            num = f.sub(x, w);
            den = f.mul(t, y);
        }
        return big.add(emb.embed(num), big.mul(emb.embed(den), *s));
    };

    const PointTable plane(field, 2);
    for (std::size_t i = 0; i < plane.size(); ++i) {
        const auto p = plane.point(i);
        const Elem x = p[0], y = p[1], w = p[2];
        if (f.sub(f.mul(x, x), f.mul(t, f.mul(y, y))) != f.mul(w, w)) continue;
        const Elem gx = f.add(f.mul(alpha, x), f.mul(t, f.mul(beta, y)));
        const Elem gy = f.add(f.mul(beta, x), f.mul(alpha, y));
        const Elem lhs = zeta(gx, gy, w);
        const Elem rhs = big.mul(mult, zeta(x, y, w));
        if (lhs.v == 0 || rhs.v == 0) return false;
        if (big.pow(big.div(lhs, rhs), static_cast<std::int64_t>(f.cardinality() - 1)) != big.one()) return false;
    }
    return true;
}

Polynomial point_indicator(unsigned n, const FieldPtr& field, std::span<const Elem> p0) {
    const Field& f = *field;
    if (p0.size() != n + 1) fail(ErrorCode::DimensionMismatch, "point has the wrong number of coordinates");
    const Point p = normalize(f, p0);
    const unsigned lead = static_cast<unsigned>(std::find_if(p.begin(), p.end(), [](Elem e) { return e.v != 0; }) - p.begin());
    // columns: p, then the unit vectors other than e_lead
    Matrix basis(n + 1, n + 1);
    for (unsigned r = 0; r <= n; ++r) basis(r, 0) = p[r];
    for (unsigned c = 1, j = 0; c <= n; ++c, ++j) {
        if (j == lead) ++j;
        basis(j, c) = f.one();
    }
    const auto inv = inverse(f, basis);
    if (!inv) fail(ErrorCode::InvariantViolation, "completed basis is singular");

    const unsigned e = static_cast<unsigned>(f.cardinality() - 1);
    const unsigned nv = n + 1;
    Polynomial indicator = Polynomial::variable(field, nv, 0).pow(e);
    const Polynomial x0e = indicator;
    for (unsigned i = 1; i <= n; ++i) indicator = indicator * (x0e - Polynomial::variable(field, nv, i).pow(e));

    std::vector<Polynomial> forms;
    for (unsigned r = 0; r <= n; ++r) {
        Polynomial form(field, nv);
        for (unsigned c = 0; c <= n; ++c) {
            Exponents ex(nv, 0);
            ex[c] = 1;
            form.add_term(ex, (*inv)(r, c));
        }
        forms.push_back(form);
    }
    return indicator.substitute(forms);
}

Polynomial unit_indicator(unsigned n, const FieldPtr& field) {
    static std::mutex mu;
    static std::map<std::pair<const Field*, unsigned>, std::pair<FieldPtr, Polynomial>> cache;
    {
        std::lock_guard lock(mu);
        const auto it = cache.find({field.get(), n});
        if (it != cache.end()) return it->second.second;
    }
    const PointTable table(field, n);
    Polynomial sum(field, n + 1);
    for (std::size_t i = 0; i < table.size(); ++i) sum = sum + point_indicator(n, field, table.point(i));
    std::lock_guard lock(mu);
    cache.emplace(std::make_pair(field.get(), n), std::make_pair(field, sum));
    return sum;
}

RationalMap interpolation_map(unsigned n, const FieldPtr& field, std::span<const Elem> p0, std::span<const Elem> p1,
                              std::span<const Elem> p2) {
    const Field& f = *field;
    if (p1.size() != 2 || p2.size() != 2) fail(ErrorCode::DimensionMismatch, "targets are points of P^1");
    const Point a = normalize(f, p1);
    const Point c = normalize(f, p2);
    const Polynomial one_all = unit_indicator(n, field);
    const Polynomial one_p0 = point_indicator(n, field, p0);
    std::vector<Polynomial> comps;
    for (unsigned k = 0; k < 2; ++k) comps.push_back(one_all.scaled(c[k]) + one_p0.scaled(f.sub(a[k], c[k])));
    return RationalMap(std::move(comps), "interpolation");
}

}  // namespace cremona
