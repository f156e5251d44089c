#pragma once

// Exact arithmetic in GF(p^m) with a fixed modulus, subfield embeddings and
// the Galois data (trace, norm, order, Frobenius orbit) used throughout.
//
// Elements are encoded as integers: the element c_0 + c_1 x + ... + c_{m-1} x^{m-1}
// of GF(p)[x]/(modulus) has index c_0 + c_1 p + ... + c_{m-1} p^{m-1}. The
// index order is the canonical element enumeration used for every
// "first/least element" choice in the library.

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cremona {

struct Elem {
    std::uint32_t v = 0;

    constexpr Elem() = default;
    constexpr explicit Elem(std::uint32_t value) : v(value) {}

    friend constexpr bool operator==(Elem, Elem) = default;
    friend constexpr auto operator<=>(Elem, Elem) = default;
};

struct PrimePower {
    std::uint64_t prime = 0;
    unsigned exponent = 0;

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Trial-division factorization; n >= 1.
std::vector<PrimePower> factorize(std::uint64_t n);
bool is_prime(std::uint64_t n);

class Field;
using FieldPtr = std::shared_ptr<const Field>;

/// Field descriptor for GF(p^m). Immutable; instances are cached and shared.
class Field {
    struct Token {};

public:
    Field(Token, std::uint32_t p, unsigned m, std::vector<std::uint32_t> modulus, bool conway);

    friend FieldPtr make_field(std::uint32_t p, unsigned m);

    std::uint32_t characteristic() const noexcept { return p_; }
    unsigned degree() const noexcept { return m_; }
    std::uint64_t cardinality() const noexcept { return q_; }
    /// Monic modulus, coefficients low-to-high (length degree()+1).
    const std::vector<std::uint32_t>& modulus() const noexcept { return modulus_; }
    /// Prime factorization of cardinality()-1.
    const std::vector<PrimePower>& factored_order() const noexcept { return factored_order_; }
    /// True when the modulus came from the embedded Conway table.
    bool conway_modulus() const noexcept { return conway_; }
    bool has_tables() const noexcept { return !exp_.empty(); }

    Elem zero() const noexcept { return Elem{0}; }
    Elem one() const noexcept { return Elem{1}; }
    /// The element with the given index in the canonical enumeration.
    Elem element(std::uint64_t index) const;
    /// Image of an integer in the prime field.
    Elem from_integer(std::int64_t n) const;
    std::uint32_t coefficient(Elem x, unsigned i) const;
    std::vector<std::uint32_t> coefficients(Elem x) const;
    Elem from_coefficients(std::span<const std::uint32_t> coeffs) const;
    /// The class of x in GF(p)[x]/(modulus) (zero when m = 1 and the modulus is x).
    Elem generator_root() const;

    Elem add(Elem a, Elem b) const noexcept;
    Elem sub(Elem a, Elem b) const noexcept;
    Elem neg(Elem a) const noexcept;
    Elem mul(Elem a, Elem b) const noexcept;
    Elem inv(Elem a) const;
    Elem div(Elem a, Elem b) const;
    /// Square-and-multiply; negative exponents need a nonzero base.
    Elem pow(Elem a, std::int64_t e) const;
    /// a^(p^k).
    Elem frobenius(Elem a, unsigned k = 1) const;

    /// Multiplicative order; 0 for the zero element.
    std::uint64_t order(Elem a) const;
    bool is_primitive(Elem a) const;
    /// Least-index element of full multiplicative order.
    Elem primitive_element() const noexcept { return primitive_; }
    bool is_square(Elem a) const;
    /// Least-index square root, if any.
    std::optional<Elem> sqrt(Elem a) const;

    bool same_as(const Field& other) const noexcept;
    std::string describe() const;
    std::string to_string(Elem a) const;

private:
    Elem mul_slow(Elem a, Elem b) const;
    Elem add_digits(Elem a, Elem b, bool subtract) const;
    Elem pow_slow(Elem a, std::uint64_t e) const;

    std::uint32_t p_;
    unsigned m_;
    std::uint64_t q_;
    std::vector<std::uint32_t> modulus_;
    std::vector<PrimePower> factored_order_;
    bool conway_;
    std::uint64_t reduction_mask_ = 0;  // modulus without its leading bit, p = 2 only
    std::vector<std::uint32_t> exp_;     // length 2(q-1)
    std::vector<std::uint32_t> log_;     // length q
    std::vector<std::uint32_t> add_;     // q*q addition table, small odd fields only
    std::vector<std::uint32_t> pow_p_;   // p^i
    Elem primitive_{1};
};

/// GF(p^m) with the Conway modulus when tabulated (p in {2,3,5,7}, m <= 12),
/// otherwise the lexicographically smallest monic irreducible.
FieldPtr make_field(std::uint32_t p, unsigned m);
/// GF(q) for a prime power q.
FieldPtr make_field_of_order(std::uint64_t q);

/// Value wrapper tying an element to its field; arithmetic checks field identity.
class FieldElement {
public:
    FieldElement(FieldPtr field, Elem value);
    FieldElement(FieldPtr field, std::span<const std::uint32_t> coefficients);

    const FieldPtr& field() const noexcept { return field_; }
    Elem value() const noexcept { return value_; }
    std::vector<std::uint32_t> coefficients() const { return field_->coefficients(value_); }
    bool is_zero() const noexcept { return value_.v == 0; }

    FieldElement operator+(const FieldElement& o) const;
    FieldElement operator-(const FieldElement& o) const;
    FieldElement operator*(const FieldElement& o) const;
    FieldElement operator/(const FieldElement& o) const;
    FieldElement operator-() const;
    FieldElement pow(std::int64_t e) const;
    FieldElement inverse() const;

    bool operator==(const FieldElement& o) const;

private:
    void require_same(const FieldElement& o) const;

    FieldPtr field_;
    Elem value_;
};

/// GF(Q) inside GF(Q^k): x -> sum c_j g^j where g is the least-index root of
/// the source modulus in the target.
class SubfieldEmbedding {
public:
    SubfieldEmbedding(FieldPtr source, FieldPtr target);

    const FieldPtr& source() const noexcept { return source_; }
    const FieldPtr& target() const noexcept { return target_; }
    Elem generator_image() const noexcept { return generator_image_; }
    /// k = [target : source].
    unsigned relative_degree() const noexcept { return k_; }

    Elem embed(Elem x) const;
    /// Preimage of y when y lies in the embedded subfield.
    std::optional<Elem> restrict_to_source(Elem y) const;
    bool in_subfield(Elem y) const;
    /// y^(Q^i), Q = |source|.
    Elem relative_frobenius(Elem y, unsigned i = 1) const;

private:
    FieldPtr source_;
    FieldPtr target_;
    unsigned k_;
    Elem generator_image_;
    std::vector<Elem> basis_images_;  // g^j, j < source degree
    std::vector<Elem> table_;         // full image table for small sources
    std::vector<std::uint32_t> left_inverse_;  // rows over GF(p), for restriction
};

/// Coordinates of target elements with respect to an ordered family of target
/// elements, over the embedded source field.
class RelativeBasis {
public:
    RelativeBasis(const SubfieldEmbedding& embedding, std::vector<Elem> family);

    std::size_t size() const noexcept { return family_.size(); }
    const std::vector<Elem>& family() const noexcept { return family_; }
    /// True when the family spans the whole target over the source.
    bool spans_target() const noexcept;
    /// Coordinates over the source when y lies in the span.
    std::optional<std::vector<Elem>> coordinates(Elem y) const;
    /// Fast path; out must have size() entries. Returns false outside the span.
    bool coordinates_into(Elem y, std::span<Elem> out) const;
    /// sum_i embed(c_i) * family_i.
    Elem combine(std::span<const Elem> coords) const;

private:
    const SubfieldEmbedding* embedding_;
    FieldPtr source_;
    FieldPtr target_;
    std::vector<Elem> family_;
    unsigned rows_ = 0;   // target degree
    unsigned cols_ = 0;   // source degree * family size
    std::vector<std::uint32_t> transform_;  // rows_ x rows_ over GF(p)
    std::vector<std::uint32_t> transform_bits_;  // p = 2 packed rows
};

struct GaloisData {
    Elem trace;   // in the source field
    Elem norm;    // in the source field
    std::uint64_t order = 0;
    std::vector<Elem> frobenius_orbit;  // distinct x^(Q^i) in the target
};

GaloisData galois_data(Elem x, const SubfieldEmbedding& sub);

/// First non-square of GF(q) in enumeration order (q odd).
Elem first_nonsquare(const Field& field);

struct SpecialMultiplier {
    Elem alpha;            // in GF(q)
    Elem beta;             // in GF(q)
    FieldPtr quadratic;    // GF(q^2)
    Elem sqrt_t_inverse;   // s in GF(q^2), s^2 = 1/t
    Elem multiplier;       // beta + (alpha - 1) s, a primitive root of GF(q^2)
};

/// Scans alpha^2 - t beta^2 = 1 (alpha-major, index order) for the first pair
/// making beta + (alpha-1) sqrt(1/t) primitive in GF(q^2).
SpecialMultiplier find_special_multiplier(const FieldPtr& field, Elem t);

}  // namespace cremona
