#pragma once

// Sparse multivariate polynomials over GF(q) and rational maps of projective
// space given by tuples of homogeneous polynomials.

#include <array>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cremona/field.hpp"
#include "cremona/permutation.hpp"
#include "cremona/projective.hpp"

namespace cremona {

using Exponents = std::vector<unsigned>;

class Polynomial {
public:
    Polynomial(FieldPtr field, unsigned nvars);

    static Polynomial constant(FieldPtr field, unsigned nvars, Elem c);
    static Polynomial variable(FieldPtr field, unsigned nvars, unsigned i);
    static Polynomial monomial(FieldPtr field, Exponents exps, Elem c);

    const FieldPtr& field() const noexcept { return field_; }
    unsigned nvars() const noexcept { return nvars_; }
    /// Nonzero terms keyed by exponent vector.
    const std::map<Exponents, Elem>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    /// Total degree; 0 for the zero polynomial.
    unsigned degree() const;
    bool is_homogeneous() const;
    Elem coefficient(const Exponents& e) const;

    void add_term(const Exponents& e, Elem c);

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial scaled(Elem c) const;
    Polynomial pow(unsigned e) const;

    Elem eval(std::span<const Elem> x) const;
    /// Evaluate at a point whose coordinates lie in an extension of the coefficient field.
    Elem eval_in(const SubfieldEmbedding& emb, std::span<const Elem> x) const;
    /// Formal derivative; the factor e is reduced mod p.
    Polynomial derivative(unsigned var) const;
    /// Replace x_i by images[i]; all images share this polynomial's field.
    Polynomial substitute(const std::vector<Polynomial>& images) const;

    /// Terms "c*x0^a*x1^b" joined by " + ", coefficients as element indices.
    std::string to_string() const;

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_ && a.field_->same_as(*b.field_);
    }

private:
    void require_compatible(const Polynomial& o) const;

    FieldPtr field_;
    unsigned nvars_;
    std::map<Exponents, Elem> terms_;
};

/// Exponent vectors of total degree d in nvars variables, lexicographically descending.
std::vector<Exponents> monomials_of_degree(unsigned nvars, unsigned d);
/// Homogeneous form with independent uniform coefficients (possibly zero).
Polynomial random_form(const FieldPtr& field, unsigned nvars, unsigned d, std::mt19937_64& rng);

/// Parses the text form produced by Polynomial::to_string. Variables are x0, x1, ...
Polynomial parse_polynomial(FieldPtr field, unsigned nvars, std::string_view text);

class RationalMap {
public:
    RationalMap(std::vector<Polynomial> components, std::string label = {});

    const FieldPtr& field() const noexcept { return components_.front().field(); }
    unsigned source_dimension() const noexcept { return components_.front().nvars() - 1; }
    unsigned target_dimension() const noexcept { return static_cast<unsigned>(components_.size() - 1); }
    unsigned degree() const noexcept { return degree_; }
    const std::vector<Polynomial>& components() const noexcept { return components_; }
    const std::string& label() const noexcept { return label_; }

    /// Canonical image, or nullopt when every component vanishes (a base point).
    std::optional<Point> evaluate(std::span<const Elem> p) const;
    std::optional<Point> evaluate_in(const SubfieldEmbedding& emb, std::span<const Elem> p) const;

private:
    std::vector<Polynomial> components_;
    std::string label_;
    unsigned degree_ = 0;
};

struct NonInjectivity {
    std::size_t image = 0;
    std::vector<std::size_t> preimages;
};

struct CollinearityWitness {
    std::array<std::size_t, 3> points{};
    std::array<std::size_t, 3> images{};
};

struct InducedMapReport {
    std::optional<Permutation> permutation;
    std::vector<std::size_t> base_points;
    std::vector<NonInjectivity> collisions;
    /// Only computed for bijections of P^2.
    std::optional<CollinearityWitness> collinearity;

    bool bijective() const noexcept { return permutation.has_value(); }
};

InducedMapReport induced_permutation(const RationalMap& map, const PointTable& table);

/// Scans lines a.x = 0 in table order of [a]; on each line takes its two
/// lowest-index points and the first further point whose image leaves the
/// line through their images.
std::optional<CollinearityWitness> collinearity_witness(const Permutation& perm, const PointTable& table);

}  // namespace cremona
