#pragma once

// Bundles over finite base sets: a permutation of the base lifted to the
// disjoint union of the fibers' rational points through per-point transitions.
//
// Conic fibers come in four shapes: I smooth conic (a P^1), II double line
// (modelled by its reduced line), III two lines meeting in a node, IV a pair of
// conjugate lines whose only rational point is the node. Lines of type III
// fibers are P^1's whose first table point [0:1] is the node.

#include <random>
#include <vector>

#include "cremona/field.hpp"
#include "cremona/linalg.hpp"
#include "cremona/permutation.hpp"
#include "cremona/projective.hpp"

namespace cremona {

enum class ConicType { I, II, III, IV };

struct FiberKind {
    enum class Family { projective, conic };

    Family family = Family::projective;
    unsigned dimension = 1;  // projective fibers
    ConicType conic = ConicType::I;

    static FiberKind projective(unsigned n) { return {Family::projective, n, ConicType::I}; }
    static FiberKind of_conic(ConicType t) { return {Family::conic, 1, t}; }

    friend bool operator==(const FiberKind&, const FiberKind&) = default;
};

std::string to_string(const FiberKind& kind);

struct FiberPoint {
    unsigned component = 0;  // line index for type III
    Point coords;
};

/// Rational points of a conic fiber: q+1, q+1, 2q+1, 1 for types I..IV.
std::vector<FiberPoint> conic_fiber_points(ConicType type, const FieldPtr& field);
std::size_t fiber_size(const FiberKind& kind, std::uint64_t q);

/// How the fiber over i is carried onto the fiber over sigma_B(i).
struct FiberTransition {
    Matrix linear;              // projective and type I/II fibers
    Matrix first_line;          // type III: action on line 0 (must fix the node)
    Matrix second_line;         // type III: action on line 1
    bool swap_lines = false;    // type III: line 0 goes to line 1
};

struct AbstractBundle {
    Permutation base;
    std::vector<FiberKind> fibers;
    std::vector<FiberTransition> transitions;
};

struct BundleReport {
    Permutation total;
    int base_sign = 1;
    int total_sign = 1;
    bool parity_match = true;
    std::vector<std::size_t> fiber_offsets;
};

BundleReport bundle_total_permutation(const AbstractBundle& bundle, const FieldPtr& field);

/// Random bundle with fiber kind constant along each base orbit.
AbstractBundle random_bundle(const FieldPtr& field, std::mt19937_64& rng, std::size_t max_base = 6);

Matrix random_invertible(const Field& f, std::size_t n, std::mt19937_64& rng);

/// A single fiber P^1(F_2) over a fixed point, transition [[1,1],[0,1]].
AbstractBundle binary_counterexample_bundle();

/// E: y^2 + xy = x^3 + 1 over GF(4) with (x, y) -> (x, y + x) and trivial P^1 fibers.
struct EllipticExample {
    FieldPtr field;
    std::vector<Point> curve_points;
    AbstractBundle bundle;
};

EllipticExample elliptic_involution_bundle();

}  // namespace cremona
