#pragma once

// Geiser and Bertini involutions on degree 2 and degree 1 del Pezzo models in
// characteristic 2, and quadratic transformations with a degree-3 base orbit.

#include <optional>
#include <random>
#include <vector>

#include "cremona/field.hpp"
#include "cremona/permutation.hpp"
#include "cremona/polynomial.hpp"
#include "cremona/projective.hpp"

namespace cremona {

/// A hypersurface in weighted projective space with its rational points.
/// Coordinates are ordered as in the weights; the first coordinate is w.
struct WeightedHypersurface {
    std::vector<unsigned> weights;
    FieldPtr field;
    Polynomial equation;
    std::vector<Point> points;
};

struct InvolutionCensus {
    Permutation permutation;
    std::size_t points = 0;
    std::size_t fixed = 0;
    int sign = 1;
    unsigned fixed_mod4 = 0;
    bool involution = false;
};

InvolutionCensus involution_census(const Permutation& p);

struct InvolutionReport {
    WeightedHypersurface surface;
    InvolutionCensus census;
};

/// w^2 + f w = g on P[2:1:1:1], f of degree 2 and g of degree 4 in x, y, z.
/// Points are listed by [x:y:z] in plane table order, then by w.
WeightedHypersurface degree_two_surface(const Polynomial& f, const Polynomial& g);
/// Census of w -> w + f (the Geiser involution in characteristic 2).
InvolutionReport geiser_census(const Polynomial& f, const Polynomial& g);

/// w^2 + a1 w z + a3 w = z^3 + a2 z^2 + a4 z + a6 on P[3:2:1:1] with
/// coordinates [w:z:x:y]; a_i is a binary form of degree i in x, y.
struct BertiniData {
    Polynomial a1, a2, a3, a4, a6;
};

WeightedHypersurface degree_one_surface(const BertiniData& a);
/// The substitution w -> w + a1 z + a3 as polynomials in (w, z, x, y).
std::vector<Polynomial> bertini_substitution(const BertiniData& a);
/// Census of w -> w + a1 z + a3 after checking formally that it preserves the surface.
InvolutionReport bertini_census(const BertiniData& a);
/// The base point [1:1:0:0].
Point bertini_base_point(const FieldPtr& field);

/// Seeded random instances passing the rational singularity screen.
std::pair<Polynomial, Polynomial> random_geiser_instance(const FieldPtr& field, std::mt19937_64& rng);
BertiniData random_bertini_instance(const FieldPtr& field, std::mt19937_64& rng);

struct BatchSummary {
    std::size_t instances = 0;
    std::size_t involutions = 0;
    std::size_t fixed_one_mod4 = 0;
    std::size_t even = 0;
    std::size_t count_one_mod_q = 0;
    std::size_t base_point_fixed = 0;  // Bertini only
    std::vector<InvolutionCensus> censuses;
};

BatchSummary geiser_batch(const FieldPtr& field, std::size_t count, std::uint64_t seed);
BatchSummary bertini_batch(const FieldPtr& field, std::size_t count, std::uint64_t seed);

struct QuadraticTransformation {
    FieldPtr field;
    RationalMap map;
    std::vector<Point> base_points;  // the conjugate orbit, over GF(q^3)
    Point fixed_point;               // g([1:1:1]), rational
    InvolutionCensus census;
};

/// [1 : c : c^2] for the least primitive element c of GF(q^3).
Point default_orbit_seed(const FieldPtr& field);
/// f = g s g^-1 where the columns of g are the conjugates of the seed over GF(q^3).
QuadraticTransformation quadratic_transformation(const FieldPtr& field, std::span<const Elem> seed);
QuadraticTransformation quadratic_transformation(const FieldPtr& field);

}  // namespace cremona
