#pragma once

// Rational points of projective and weighted projective spaces over GF(q).
//
// A canonical point has its leftmost nonzero coordinate equal to 1. Tables list
// canonical points in lexicographic order of their coordinates, each coordinate
// compared by element index, so [0:...:0:1] comes first.

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "cremona/field.hpp"

namespace cremona {

using Point = std::vector<Elem>;

bool is_zero_tuple(std::span<const Elem> coords);
/// Scales so the leftmost nonzero coordinate is 1; throws DegenerateInput on the zero tuple.
Point normalize(const Field& f, std::span<const Elem> coords);
bool is_canonical(const Field& f, std::span<const Elem> coords);
/// Same projective point (both nonzero).
bool same_point(const Field& f, std::span<const Elem> a, std::span<const Elem> b);

std::uint64_t projective_space_size(std::uint64_t q, unsigned n);

class PointTable {
public:
    static constexpr std::uint64_t kMaxSize = 10'000'000;

    PointTable(FieldPtr field, unsigned n);

    const FieldPtr& field() const noexcept { return field_; }
    unsigned dimension() const noexcept { return n_; }
    std::size_t size() const noexcept { return size_; }
    std::span<const Elem> point(std::size_t index) const {
        return {coords_.data() + index * (n_ + 1), n_ + 1};
    }
    Point point_vec(std::size_t index) const {
        auto s = point(index);
        return {s.begin(), s.end()};
    }
    /// Index of the point with these (not necessarily canonical) coordinates.
    std::size_t index_of(std::span<const Elem> coords) const;

private:
    FieldPtr field_;
    unsigned n_;
    std::size_t size_;
    std::vector<Elem> coords_;
    std::vector<std::uint64_t> offsets_;  // offsets_[i]: first index with leading position i
};

PointTable enumerate_points(unsigned n, FieldPtr field);

enum class Incidence { collinear, not_collinear };

/// Points of P^2; throws DegenerateInput when two of them coincide.
Incidence incidence(const Field& f, std::span<const Elem> p1, std::span<const Elem> p2, std::span<const Elem> p3);
bool collinear(const Field& f, std::span<const Elem> p1, std::span<const Elem> p2, std::span<const Elem> p3);
/// The q+1 canonical points of the line through two distinct points, in table order.
std::vector<Point> line_points(const Field& f, std::span<const Elem> p1, std::span<const Elem> p2);
/// Indices of the points of P^2 on the line a.x = 0, ascending.
std::vector<std::size_t> points_on_line(const PointTable& plane, std::span<const Elem> dual);

class WeightedPointTable {
public:
    static constexpr std::uint64_t kMaxTuples = 20'000'000;

    WeightedPointTable(std::vector<unsigned> weights, FieldPtr field);

    const FieldPtr& field() const noexcept { return field_; }
    const std::vector<unsigned>& weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return reps_.size() / weights_.size(); }
    std::span<const Elem> point(std::size_t index) const {
        return {reps_.data() + index * weights_.size(), weights_.size()};
    }
    /// Lexicographically least member of the weighted orbit.
    Point canonicalize(std::span<const Elem> coords) const;
    std::size_t index_of(std::span<const Elem> coords) const;

private:
    std::uint64_t key(std::span<const Elem> coords) const;

    FieldPtr field_;
    std::vector<unsigned> weights_;
    std::vector<Elem> reps_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
};

WeightedPointTable enumerate_weighted_points(std::vector<unsigned> weights, FieldPtr field);

}  // namespace cremona
