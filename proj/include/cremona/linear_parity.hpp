#pragma once

// Parity of the permutations that projective linear maps induce on P^n(F_q).

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "cremona/field.hpp"
#include "cremona/linalg.hpp"
#include "cremona/permutation.hpp"
#include "cremona/projective.hpp"

namespace cremona {

/// An invertible (n+1)x(n+1) matrix acting on column vectors, up to scalar.
struct ProjLinearMap {
    ProjLinearMap(FieldPtr field, Matrix m);

    FieldPtr field;
    Matrix matrix;

    unsigned dimension() const noexcept { return static_cast<unsigned>(matrix.rows() - 1); }
    Point apply(std::span<const Elem> x) const;
};

ProjLinearMap operator*(const ProjLinearMap& a, const ProjLinearMap& b);
/// Equal as projective maps.
bool same_map(const ProjLinearMap& a, const ProjLinearMap& b);

struct CycleCensus {
    CycleType counts;
    std::size_t moved = 0;
    int sign = 1;

    friend bool operator==(const CycleCensus&, const CycleCensus&) = default;
};

CycleCensus census_of(const Permutation& p);
/// A census from the counts alone; moved points and sign are derived.
CycleCensus census_from_counts(CycleType counts);

/// Generators of GL_{n+1}(F_q): I + (a-1) E_22 + E_{n+1,1} with the coordinate cycle for n >= 2, the trace/norm
/// pair built from the least primitive element of GF(q^2) for n = 1 and q > 2,
/// and [[0,1],[1,1]], [[1,1],[0,1]] for n = 1, q = 2.
std::pair<ProjLinearMap, ProjLinearMap> waterhouse_generators(unsigned n, const FieldPtr& field);

/// A_n = T_n M_n for n >= 2.
ProjLinearMap transvection_factor(unsigned n, const FieldPtr& field);
ProjLinearMap diagonal_factor(unsigned n, const FieldPtr& field);
/// A_1 = diag(r,1) [[1,0],[s,1]] [[0,1],[1,0]] for q > 2.
std::vector<ProjLinearMap> a1_factors(const FieldPtr& field);
/// x_i -> x_{i+1}, x_n -> x_0 as a matrix (E_{1,2} + ... + E_{n+1,1}).
ProjLinearMap coordinate_cycle(unsigned n, const FieldPtr& field);

std::pair<Permutation, CycleCensus> linear_permutation(const ProjLinearMap& map, const PointTable& table);

struct BnCensus {
    unsigned odd_part = 1;  // u with n+1 = u 2^l
    unsigned two_adic = 0;  // l
    CycleCensus observed;   // of B^u, B the coordinate cycle
    CycleCensus predicted;
    bool match = false;
};

/// Observed census of the u-th power of the coordinate cycle against the count
/// q^(u 2^(r-1)) / 2^r * (q^(u 2^(r-1)) - 1)/(q-1) of 2^r-cycles.
BnCensus bn_cycle_census(unsigned n, const FieldPtr& field);

struct ParityVerdict {
    std::size_t examined = 0;
    std::size_t odd = 0;
    std::optional<Matrix> first_odd;

    bool all_even() const noexcept { return odd == 0; }
};

/// Uniform invertible matrices by rejection sampling, seeded.
ParityVerdict pgl_sample_parity(unsigned n, const FieldPtr& field, std::size_t count, std::uint64_t seed);
/// Every element of PGL_{n+1}(F_q), each once (first nonzero entry 1, row-major).
std::vector<ProjLinearMap> enumerate_pgl(unsigned n, const FieldPtr& field);
ParityVerdict pgl_exhaustive_parity(unsigned n, const FieldPtr& field);

/// For a map on P^1 over GF(2^m): after raising to the odd part of its order,
/// the census is the identity or c_0 = 1 with a single c_j = q / 2^j.
bool cycle_constraint_check(const ProjLinearMap& map);

}  // namespace cremona
