#include "cremona/bundle.hpp"

#include <algorithm>

#include "cremona/error.hpp"

namespace cremona {

std::string to_string(const FiberKind& kind) {
    if (kind.family == FiberKind::Family::projective) return "P^" + std::to_string(kind.dimension);
    switch (kind.conic) {
        case ConicType::I: return "conic I";
        case ConicType::II: return "conic II";
        case ConicType::III: return "conic III";
        case ConicType::IV: return "conic IV";
    }
    return "conic";
}

std::vector<FiberPoint> conic_fiber_points(ConicType type, const FieldPtr& field) {
    const PointTable line(field, 1);
    std::vector<FiberPoint> out;
    switch (type) {
        case ConicType::I:
        case ConicType::II:
            for (std::size_t i = 0; i < line.size(); ++i) out.push_back({0, line.point_vec(i)});
            break;
        case ConicType::III:
            for (std::size_t i = 0; i < line.size(); ++i) out.push_back({0, line.point_vec(i)});
            for (std::size_t i = 1; i < line.size(); ++i) out.push_back({1, line.point_vec(i)});
            break;
        case ConicType::IV:
            out.push_back({0, line.point_vec(0)});
            break;
    }
    return out;
}

std::size_t fiber_size(const FiberKind& kind, std::uint64_t q) {
    if (kind.family == FiberKind::Family::projective) return projective_space_size(q, kind.dimension);
    switch (kind.conic) {
        case ConicType::I:
        case ConicType::II: return q + 1;
        case ConicType::III: return 2 * q + 1;
        case ConicType::IV: return 1;
    }
    return 0;
}

namespace {

void require_invertible(const Field& f, const Matrix& m, std::size_t n, const char* what) {
    if (m.rows() != n || m.cols() != n) fail(ErrorCode::InvalidTransition, std::string(what) + " has the wrong shape");
    if (determinant(f, m).v == 0) fail(ErrorCode::InvalidTransition, std::string(what) + " is not invertible");
}

}  // namespace

BundleReport bundle_total_permutation(const AbstractBundle& bundle, const FieldPtr& field) {
    const Field& f = *field;
    const std::size_t r = bundle.base.size();
    if (bundle.fibers.size() != r || bundle.transitions.size() != r) {
        fail(ErrorCode::LengthMismatch, "one fiber kind and one transition per base point");
    }
    const std::uint64_t q = f.cardinality();
    BundleReport report;
    report.fiber_offsets.resize(r + 1, 0);
    for (std::size_t i = 0; i < r; ++i) report.fiber_offsets[i + 1] = report.fiber_offsets[i] + fiber_size(bundle.fibers[i], q);
    std::vector<std::uint32_t> img(report.fiber_offsets[r]);

    for (std::size_t i = 0; i < r; ++i) {
        const std::size_t j = bundle.base(i);
        const FiberKind& kind = bundle.fibers[i];
        if (!(bundle.fibers[j] == kind)) fail(ErrorCode::InvalidTransition, "transition between fibers of different kinds");
        const FiberTransition& tr = bundle.transitions[i];
        const std::size_t src = report.fiber_offsets[i];
        const std::size_t dst = report.fiber_offsets[j];

        if (kind.family == FiberKind::Family::projective || kind.conic == ConicType::I || kind.conic == ConicType::II) {
            const unsigned n = kind.family == FiberKind::Family::projective ? kind.dimension : 1;
            require_invertible(f, tr.linear, n + 1, "transition");
            const PointTable table(field, n);
            for (std::size_t k = 0; k < table.size(); ++k) {
                img[src + k] = static_cast<std::uint32_t>(dst + table.index_of(apply(f, tr.linear, table.point(k))));
            }
        } else if (kind.conic == ConicType::III) {
            require_invertible(f, tr.first_line, 2, "line transition");
            require_invertible(f, tr.second_line, 2, "line transition");
            if (tr.first_line(0, 1).v != 0 || tr.second_line(0, 1).v != 0) {
                fail(ErrorCode::InvalidTransition, "line transitions must fix the node");
            }
            const auto pts = conic_fiber_points(ConicType::III, field);
            const PointTable line(field, 1);
            for (std::size_t k = 0; k < pts.size(); ++k) {
                const Matrix& m = pts[k].component == 0 ? tr.first_line : tr.second_line;
                const std::size_t li = line.index_of(apply(f, m, pts[k].coords));
                const unsigned comp = tr.swap_lines ? 1 - pts[k].component : pts[k].component;
                std::size_t local = li;
                if (li != 0 && comp == 1) local = line.size() + li - 1;
                img[src + k] = static_cast<std::uint32_t>(dst + local);
            }
        } else {
            img[src] = static_cast<std::uint32_t>(dst);
        }
    }
    report.total = Permutation(std::move(img));
    report.base_sign = bundle.base.sign();
    report.total_sign = report.total.sign();
    report.parity_match = report.base_sign == report.total_sign;
    return report;
}

Matrix random_invertible(const Field& f, std::size_t n, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::uint64_t> pick(0, f.cardinality() - 1);
    while (true) {
        Matrix m(n, n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) m(a, b) = f.element(pick(rng));
        if (determinant(f, m).v != 0) return m;
    }
}

AbstractBundle random_bundle(const FieldPtr& field, std::mt19937_64& rng, std::size_t max_base) {
    const Field& f = *field;
    std::uniform_int_distribution<std::size_t> size_pick(1, std::max<std::size_t>(1, max_base));
    const std::size_t r = size_pick(rng);
    std::vector<std::uint32_t> img(r);
    for (std::size_t i = 0; i < r; ++i) img[i] = static_cast<std::uint32_t>(i);
    std::shuffle(img.begin(), img.end(), rng);

    AbstractBundle b;
    b.base = Permutation(std::move(img));
    b.fibers.resize(r);
    b.transitions.resize(r);
    const std::vector<FiberKind> kinds = {FiberKind::projective(1), FiberKind::projective(2),
                                          FiberKind::of_conic(ConicType::I), FiberKind::of_conic(ConicType::II),
                                          FiberKind::of_conic(ConicType::III), FiberKind::of_conic(ConicType::IV)};
    std::uniform_int_distribution<std::size_t> kind_pick(0, kinds.size() - 1);
    for (const auto& cycle : b.base.cycles()) {
        const FiberKind kind = kinds[kind_pick(rng)];
        for (auto i : cycle) b.fibers[i] = kind;
    }
    std::uniform_int_distribution<std::uint64_t> elem_pick(0, f.cardinality() - 1);
    std::uniform_int_distribution<std::uint64_t> unit_pick(1, f.cardinality() - 1);
    for (std::size_t i = 0; i < r; ++i) {
        const FiberKind& kind = b.fibers[i];
        FiberTransition& tr = b.transitions[i];
        if (kind.family == FiberKind::Family::projective) {
            tr.linear = random_invertible(f, kind.dimension + 1, rng);
        } else if (kind.conic == ConicType::I || kind.conic == ConicType::II) {
            tr.linear = random_invertible(f, 2, rng);
        } else if (kind.conic == ConicType::III) {
            for (Matrix* m : {&tr.first_line, &tr.second_line}) {
                *m = Matrix(2, 2);
                (*m)(0, 0) = f.element(unit_pick(rng));
                (*m)(1, 0) = f.element(elem_pick(rng));
                (*m)(1, 1) = f.element(unit_pick(rng));
            }
            tr.swap_lines = (rng() & 1) != 0;
        }
    }
    return b;
}

AbstractBundle binary_counterexample_bundle() {
    AbstractBundle b;
    b.base = Permutation::identity(1);
    b.fibers = {FiberKind::projective(1)};
    FiberTransition tr;
    tr.linear = Matrix(2, 2, {Elem{1}, Elem{1}, Elem{0}, Elem{1}});
    b.transitions = {tr};
    return b;
}

EllipticExample elliptic_involution_bundle() {
    EllipticExample ex;
    ex.field = make_field(2, 2);
    const Field& f = *ex.field;
    const PointTable plane(ex.field, 2);
    // y^2 z + x y z = x^3 + z^3
    auto on_curve = [&](std::span<const Elem> p) {
        const Elem x = p[0], y = p[1], z = p[2];
        const Elem lhs = f.add(f.mul(f.mul(y, y), z), f.mul(f.mul(x, y), z));
        const Elem rhs = f.add(f.mul(f.mul(x, x), x), f.mul(f.mul(z, z), z));
        return lhs == rhs;
    };
    for (std::size_t i = 0; i < plane.size(); ++i) {
        if (on_curve(plane.point(i))) ex.curve_points.push_back(plane.point_vec(i));
    }
    std::vector<std::uint32_t> img(ex.curve_points.size());
    for (std::size_t i = 0; i < ex.curve_points.size(); ++i) {
        const Point& p = ex.curve_points[i];
        const Point image = normalize(f, Point{p[0], f.add(p[1], p[0]), p[2]});
        const auto it = std::find(ex.curve_points.begin(), ex.curve_points.end(), image);
        if (it == ex.curve_points.end()) fail(ErrorCode::InvariantViolation, "involution leaves the curve");
        img[i] = static_cast<std::uint32_t>(it - ex.curve_points.begin());
    }
    ex.bundle.base = Permutation(std::move(img));
    ex.bundle.fibers.assign(ex.curve_points.size(), FiberKind::projective(1));
    FiberTransition tr;
    tr.linear = Matrix::identity(2);
    ex.bundle.transitions.assign(ex.curve_points.size(), tr);
    return ex;
}

}  // namespace cremona
