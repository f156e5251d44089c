#include "cremona/projective.hpp"

#include <algorithm>

#include "cremona/error.hpp"
#include "cremona/linalg.hpp"

namespace cremona {

bool is_zero_tuple(std::span<const Elem> coords) {
    return std::all_of(coords.begin(), coords.end(), [](Elem x) { return x.v == 0; });
}

Point normalize(const Field& f, std::span<const Elem> coords) {
    Point out(coords.begin(), coords.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].v == 0) continue;
        if (out[i] == f.one()) return out;
        const Elem inv = f.inv(out[i]);
        for (std::size_t j = i; j < out.size(); ++j) out[j] = f.mul(out[j], inv);
        return out;
    }
    fail(ErrorCode::DegenerateInput, "the zero tuple is not a projective point");
}

bool is_canonical(const Field& f, std::span<const Elem> coords) {
    for (const Elem x : coords) {
        if (x.v != 0) return x == f.one();
    }
    return false;
}

bool same_point(const Field& f, std::span<const Elem> a, std::span<const Elem> b) {
    if (a.size() != b.size()) return false;
    return normalize(f, a) == normalize(f, b);
}

std::uint64_t projective_space_size(std::uint64_t q, unsigned n) {
    std::uint64_t total = 0;
    std::uint64_t power = 1;
    for (unsigned i = 0; i <= n; ++i) {
        total += power;
        if (total > PointTable::kMaxSize || power > PointTable::kMaxSize) return PointTable::kMaxSize + 1;
        power *= q;
    }
    return total;
}

PointTable::PointTable(FieldPtr field, unsigned n) : field_(std::move(field)), n_(n) {
    if (n_ < 1) fail(ErrorCode::InvalidParameters, "projective dimension must be at least 1");
    const std::uint64_t q = field_->cardinality();
    const std::uint64_t total = projective_space_size(q, n_);
    if (total > kMaxSize) fail(ErrorCode::TableTooLarge, "projective space has more than 10^7 points");
    size_ = total;
    coords_.resize(size_ * (n_ + 1));
    // Leading position i holds q^(n-i) points; higher leading positions come first.
    offsets_.assign(n_ + 1, 0);
    std::uint64_t acc = 0;
    for (unsigned i = n_ + 1; i-- > 0;) {
        offsets_[i] = acc;
        std::uint64_t block = 1;
        for (unsigned k = i; k < n_; ++k) block *= q;
        acc += block;
    }
    for (unsigned lead = 0; lead <= n_; ++lead) {
        std::uint64_t block = 1;
        for (unsigned k = lead; k < n_; ++k) block *= q;
        for (std::uint64_t r = 0; r < block; ++r) {
            Elem* out = coords_.data() + (offsets_[lead] + r) * (n_ + 1);
            out[lead] = field_->one();
            std::uint64_t rest = r;
            for (unsigned k = n_; k > lead; --k) {
                out[k] = Elem{static_cast<std::uint32_t>(rest % q)};
                rest /= q;
            }
        }
    }
}

std::size_t PointTable::index_of(std::span<const Elem> coords) const {
    if (coords.size() != n_ + 1) fail(ErrorCode::DimensionMismatch, "point has the wrong number of coordinates");
    const Point c = normalize(*field_, coords);
    const std::uint64_t q = field_->cardinality();
    unsigned lead = 0;
    while (c[lead].v == 0) ++lead;
    std::uint64_t r = 0;
    for (unsigned k = lead + 1; k <= n_; ++k) r = r * q + c[k].v;
    return static_cast<std::size_t>(offsets_[lead] + r);
}

PointTable enumerate_points(unsigned n, FieldPtr field) { return PointTable(std::move(field), n); }

Incidence incidence(const Field& f, std::span<const Elem> p1, std::span<const Elem> p2, std::span<const Elem> p3) {
    if (p1.size() != 3 || p2.size() != 3 || p3.size() != 3) {
        fail(ErrorCode::DimensionMismatch, "incidence is defined for points of P^2");
    }
    if (same_point(f, p1, p2) || same_point(f, p1, p3) || same_point(f, p2, p3)) {
        fail(ErrorCode::DegenerateInput, "incidence needs three distinct points");
    }
    return collinear(f, p1, p2, p3) ? Incidence::collinear : Incidence::not_collinear;
}

bool collinear(const Field& f, std::span<const Elem> p1, std::span<const Elem> p2, std::span<const Elem> p3) {
    auto minor = [&](std::size_t i, std::size_t j) { return f.sub(f.mul(p2[i], p3[j]), f.mul(p2[j], p3[i])); };
    Elem det = f.mul(p1[0], minor(1, 2));
    det = f.sub(det, f.mul(p1[1], minor(0, 2)));
    det = f.add(det, f.mul(p1[2], minor(0, 1)));
    return det.v == 0;
}

std::vector<Point> line_points(const Field& f, std::span<const Elem> p1, std::span<const Elem> p2) {
    if (p1.size() != p2.size()) fail(ErrorCode::DimensionMismatch, "points of different spaces");
    if (same_point(f, p1, p2)) fail(ErrorCode::DegenerateInput, "a line needs two distinct points");
    std::vector<Point> out;
    const PointTable line(make_field_of_order(f.cardinality()), 1);
    for (std::size_t i = 0; i < line.size(); ++i) {
        const auto ab = line.point(i);
        Point x(p1.size());
        for (std::size_t k = 0; k < p1.size(); ++k) x[k] = f.add(f.mul(ab[0], p1[k]), f.mul(ab[1], p2[k]));
        out.push_back(normalize(f, x));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> points_on_line(const PointTable& plane, std::span<const Elem> dual) {
    const Field& f = *plane.field();
    if (plane.dimension() != 2 || dual.size() != 3) fail(ErrorCode::DimensionMismatch, "lines live in P^2");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < plane.size(); ++i) {
        const auto p = plane.point(i);
        const Elem v = f.add(f.add(f.mul(dual[0], p[0]), f.mul(dual[1], p[1])), f.mul(dual[2], p[2]));
        if (v.v == 0) out.push_back(i);
    }
    return out;
}

WeightedPointTable::WeightedPointTable(std::vector<unsigned> weights, FieldPtr field)
    : field_(std::move(field)), weights_(std::move(weights)) {
    if (weights_.empty() || weights_.size() > 4) fail(ErrorCode::InvalidParameters, "between 1 and 4 weights");
    for (unsigned w : weights_) {
        if (w == 0) fail(ErrorCode::InvalidParameters, "weights must be positive");
    }
    const std::uint64_t q = field_->cardinality();
    std::uint64_t tuples = 1;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        tuples *= q;
        if (tuples > kMaxTuples) fail(ErrorCode::TableTooLarge, "weighted space too large to enumerate");
    }
    const std::size_t k = weights_.size();
    Point t(k);
    // Tuples enumerated in lexicographic order; keep those that are the least of their orbit.
    for (std::uint64_t code = 1; code < tuples; ++code) {
        std::uint64_t rest = code;
        for (std::size_t i = k; i-- > 0;) {
            t[i] = Elem{static_cast<std::uint32_t>(rest % q)};
            rest /= q;
        }
        if (canonicalize(t) == t) {
            index_.emplace(code, reps_.size() / k);
            reps_.insert(reps_.end(), t.begin(), t.end());
        }
    }
}

Point WeightedPointTable::canonicalize(std::span<const Elem> coords) const {
    if (coords.size() != weights_.size()) fail(ErrorCode::DimensionMismatch, "wrong number of coordinates");
    if (is_zero_tuple(coords)) fail(ErrorCode::DegenerateInput, "the zero tuple is not a point");
    const Field& f = *field_;
    Point best(coords.begin(), coords.end());
    Point cand(coords.size());
    for (std::uint64_t l = 2; l < f.cardinality(); ++l) {
        const Elem lambda{static_cast<std::uint32_t>(l)};
        for (std::size_t i = 0; i < coords.size(); ++i) cand[i] = f.mul(f.pow(lambda, weights_[i]), coords[i]);
        if (cand < best) best = cand;
    }
    return best;
}

std::uint64_t WeightedPointTable::key(std::span<const Elem> coords) const {
    std::uint64_t code = 0;
    for (const Elem x : coords) code = code * field_->cardinality() + x.v;
    return code;
}

std::size_t WeightedPointTable::index_of(std::span<const Elem> coords) const {
    return index_.at(key(canonicalize(coords)));
}

WeightedPointTable enumerate_weighted_points(std::vector<unsigned> weights, FieldPtr field) {
    return WeightedPointTable(std::move(weights), std::move(field));
}

}  // namespace cremona
