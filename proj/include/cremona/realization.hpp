#pragma once

// Quadric surfaces with a conic fibration, maps preserving the fibration, and
// the plane Cremona maps obtained by projecting from a node of a degenerate
// fiber.
//
// Coordinates on P^3 are [x:y:z:w]. The fibration sends a point to [z:w]; the
// distinguished smooth fiber C0 lies over [0:1].

#include <memory>
#include <optional>
#include <vector>

#include "cremona/field.hpp"
#include "cremona/linalg.hpp"
#include "cremona/permutation.hpp"
#include "cremona/polynomial.hpp"
#include "cremona/projective.hpp"

namespace cremona {

struct QuadricModel {
    QuadricModel(FieldPtr f, Polynomial q) : field(std::move(f)), quadric(std::move(q)) {}

    FieldPtr field;
    bool odd_characteristic = true;
    Elem t;  // odd: the non-square
    Elem r;  // characteristic 2: X^2 + rX + s has no root
    Elem s;
    Polynomial quadric;
    std::vector<Polynomial> gradient;
    Point node;                // P
    unsigned plane_coord = 2;  // H = {x_k = 0}
    std::vector<Point> points;        // Q(F_q) in P^3 table order
    std::vector<std::size_t> c0;      // indices into points lying over [0:1]
    std::vector<std::int64_t> lookup; // P^3 table index -> index into points, or -1
    std::shared_ptr<const PointTable> space;  // P^3(F_q)

    std::size_t point_index(std::span<const Elem> x) const;
    /// The base point [z:w] of the fibration.
    Point fiber_of(std::span<const Elem> x) const;
    /// H-coordinates of a point of H.
    Point plane_coords(std::span<const Elem> x) const;
    Point from_plane(std::span<const Elem> y) const;
};

/// x^2 - t y^2 + z^2 = w^2 with t the first non-square, node [0:0:1:1].
QuadricModel build_quadric_odd(const FieldPtr& field);
/// x^2 + rxy + sy^2 + z^2 + x(z+w) + y(z+w) + zw = 0 with s = 1 and the first r
/// leaving X^2 + rX + 1 rootless; node is the lowest-index lone rational point
/// of a rational fiber.
QuadricModel build_quadric_char2(const FieldPtr& field);
QuadricModel build_quadric(const FieldPtr& field);

/// Throws InvariantViolation unless the model is smooth at rational points,
/// P lies on Q, C0 is a smooth conic with q+1 points and L meets Q in no
/// rational point.
void verify_model(const QuadricModel& model);

/// A point of the blow-up of Q at P restricted to rational points: either an
/// ordinary point of Q or the node together with a tangent direction.
struct Lift {
    Point point;
    bool exceptional = false;
    Point direction;
};

class NodeProjection {
public:
    explicit NodeProjection(const QuadricModel& model);

    /// Projection of a point of Q other than P to H, in H-coordinates.
    Point forward(std::span<const Elem> x) const;
    /// The second intersection of line(P, y) with Q.
    Lift backward(std::span<const Elem> y) const;
    /// Projection of a direction at P (a point of P^3 off P) to H.
    Point forward_direction(std::span<const Elem> direction) const;

private:
    const QuadricModel* model_;
    std::vector<Elem> polar_;  // gradient of Q at P
};

/// A self-map of Q on rational points, with its action on directions at P.
struct QuadricSelfMap {
    std::vector<std::uint32_t> action;  // indices into model.points
    Matrix tangent;                     // action on P^3 directions at P
};

/// g0 on C0 ([x:y:w] -> [a x + t b y : b x + a y : w]) and the identity on every other rational fiber.
QuadricSelfMap fiberwise_extension(const QuadricModel& model, Elem alpha0, Elem beta0);
/// Same map evaluated through the interpolated rational functions alpha(z,w), beta(z,w).
QuadricSelfMap interpolated_extension(const QuadricModel& model, Elem alpha0, Elem beta0);
/// Characteristic 2: x <-> y on C0, identity on the other rational fibers.
QuadricSelfMap fiberwise_swap(const QuadricModel& model);
/// Characteristic 2: x <-> y on all of Q (a linear map fixing P).
QuadricSelfMap global_swap(const QuadricModel& model);

/// f = pi_P o g o pi_P^-1 on P^2(F_q), H-coordinates in plane table order.
Permutation descend(const QuadricModel& model, const QuadricSelfMap& g, const PointTable& plane);

/// Odd q: checks the geometric projection against [x:y:w-z] and
/// [2ux : 2uy : x^2-ty^2-u^2 : x^2-ty^2+u^2] on every rational point.
bool closed_form_projection_check(const QuadricModel& model);

struct RealizationReport {
    FieldPtr field;
    Permutation permutation;
    int sign = 1;
    std::size_t fixed_points = 0;
    CycleType cycle_type;
    std::vector<std::size_t> c0_points;  // plane indices of the image of C0
    CycleType c0_cycle_type;             // cycles meeting the image of C0
    std::optional<CollinearityWitness> collinearity;
    Elem alpha;
    Elem beta;
};

/// Odd q: special multiplier parameters; characteristic 2: the fiberwise swap.
RealizationReport build_realization(const FieldPtr& field);
/// Odd q with explicit parameters on alpha^2 - t beta^2 = 1.
RealizationReport build_realization(const FieldPtr& field, Elem alpha, Elem beta);
/// Characteristic 2 with the swap applied to the whole quadric.
RealizationReport build_global_swap_realization(const FieldPtr& field);

/// Stereographic conjugate of the conic automorphism equals multiplication by
/// beta + (alpha - 1) sqrt(1/t) on P(GF(q^2)) at every rational point of C0.
bool multiplier_action_check(const FieldPtr& field, Elem alpha, Elem beta);

/// h : P^n -> P^1 with h(P0) = P1 and h = P2 at every other rational point.
RationalMap interpolation_map(unsigned n, const FieldPtr& field, std::span<const Elem> p0, std::span<const Elem> p1,
                              std::span<const Elem> p2);

/// Polynomial that is 1 on the nonzero multiples of p0 and 0 on other nonzero vectors.
Polynomial point_indicator(unsigned n, const FieldPtr& field, std::span<const Elem> p0);
/// Polynomial that is 1 on every nonzero vector.
Polynomial unit_indicator(unsigned n, const FieldPtr& field);

}  // namespace cremona
