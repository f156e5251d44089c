#pragma once

// Enumeration of quintic transformations whose base locus is a point of
// degree 6: candidate points [1:b:c] over GF(q^6) up to PGL_3(F_q) via the
// reduced row echelon form of their power-basis coordinate matrix, the
// quintics singular along the Galois orbit, and the sign of the induced
// permutation of P^2(F_q).

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cremona/field.hpp"
#include "cremona/permutation.hpp"
#include "cremona/polynomial.hpp"
#include "cremona/projective.hpp"

namespace cremona {

inline constexpr unsigned kScanDegree = 6;
inline constexpr std::size_t kQuinticMonomials = 21;

/// GF(q^6) over GF(q) with the power basis of the least primitive element.
class ScanBasis {
public:
    explicit ScanBasis(FieldPtr base);

    const FieldPtr& base() const noexcept { return base_; }
    const FieldPtr& extension() const noexcept { return ext_; }
    const SubfieldEmbedding& embedding() const noexcept { return *emb_; }
    Elem alpha() const noexcept { return powers_[1]; }
    Elem power(unsigned i) const { return powers_.at(i); }

    /// Coordinates c_i in GF(q) with y = sum c_i alpha^i.
    std::array<Elem, kScanDegree> expand(Elem y) const;
    Elem contract(std::span<const Elem> coords) const;

private:
    FieldPtr base_;
    FieldPtr ext_;
    std::unique_ptr<SubfieldEmbedding> emb_;
    std::vector<Elem> powers_;
    std::unique_ptr<RelativeBasis> coords_;
};

/// Reduced row echelon shape of a 3 x 6 matrix with pivots in columns 0, j, k.
struct EchelonPattern {
    unsigned id = 0;  // 1..10
    unsigned j = 0;
    unsigned k = 0;
    /// (row, column) of the free entries, row 1 before row 2, columns ascending.
    std::vector<std::pair<unsigned, unsigned>> free;

    std::size_t free_count() const noexcept { return free.size(); }
    std::uint64_t size(std::uint64_t q) const;
};

const std::vector<EchelonPattern>& enumerate_patterns();
/// q^6 + q^5 + 2q^4 + 2q^3 + 2q^2 + q + 1.
std::uint64_t candidate_total(std::uint64_t q);

/// Free values for an offset in [0, q^free): base-q digits, first entry most significant.
std::vector<Elem> free_values_at(const EchelonPattern& pattern, std::uint64_t q, std::uint64_t offset);
/// [1 : b : c] with b, c read from rows 1 and 2 through the power basis.
Point candidate_point(const ScanBasis& basis, const EchelonPattern& pattern, std::span<const Elem> free_values);

/// Least d in {1, 2, 3, 6} with P fixed by the d-th power of Frobenius over GF(q).
unsigned orbit_degree(const ScanBasis& basis, std::span<const Elem> point);

/// Exponents of the 21 quintic monomials, lexicographically descending.
const std::vector<std::vector<unsigned>>& quintic_monomials();

struct SingularityKernel {
    std::size_t dimension = 0;
    /// Coefficient vectors over GF(q) in quintic_monomials() order.
    std::vector<std::vector<Elem>> basis;
};

/// Quintics over GF(q) with F_x = F_y = F_z = F = 0 at the point, each condition
/// expanded into six GF(q) rows (24 x 21 system).
SingularityKernel singularity_kernel(const ScanBasis& basis, std::span<const Elem> point);
Polynomial quintic_from_coefficients(const FieldPtr& field, std::span<const Elem> coeffs);

enum class Outcome { Even, Odd, DiscardDegree, DiscardKernel, DiscardBasePoint, DiscardNonInjective };

std::string_view outcome_name(Outcome o);

struct Classification {
    Outcome outcome = Outcome::DiscardKernel;
    std::optional<Permutation> permutation;
};

/// Sign of [F1:F2:F3] on the table, or the reason it is not a permutation.
Classification classify_candidate(const std::vector<Polynomial>& components, const PointTable& table);

struct QuinticCandidate {
    unsigned pattern = 0;
    std::uint64_t offset = 0;
    std::vector<Elem> free_values;
    Point point;
    unsigned degree = 0;
    std::size_t kernel_dimension = 0;
    Outcome outcome = Outcome::DiscardDegree;
    std::optional<Permutation> permutation;
};

/// One candidate through the reference path (polynomial evaluation).
QuinticCandidate examine_candidate(const ScanBasis& basis, const PointTable& table, const EchelonPattern& pattern,
                                   std::uint64_t offset);

struct PatternTally {
    unsigned pattern = 0;
    std::uint64_t expected = 0;
    std::uint64_t processed = 0;
    std::uint64_t even = 0;
    std::uint64_t odd = 0;
    std::uint64_t discard_degree = 0;
    std::uint64_t discard_kernel = 0;
    std::uint64_t discard_base = 0;
    std::uint64_t discard_noninjective = 0;

    void record(Outcome o);
    PatternTally& operator+=(const PatternTally& o);
    friend bool operator==(const PatternTally&, const PatternTally&) = default;
};

struct ScanOptions {
    std::vector<unsigned> patterns;  // empty = all ten
    std::uint64_t block_size = 512;
    unsigned jobs = 1;
    std::string checkpoint;          // empty = none
    bool resume = false;
    /// Stop after this many new blocks (simulates an interrupted run).
    std::optional<std::uint64_t> max_blocks;
};

struct ScanReport {
    std::uint64_t q = 0;
    std::vector<unsigned> patterns;
    std::uint64_t block_size = 0;
    std::vector<PatternTally> tallies;
    PatternTally total;
    std::uint64_t blocks_total = 0;
    std::uint64_t blocks_done = 0;
    bool complete = false;
    /// First unfinished block (pattern id, offset) when incomplete.
    std::optional<std::pair<unsigned, std::uint64_t>> cursor;
    std::uint64_t config_digest = 0;
    std::uint64_t resumed_blocks = 0;
    double runtime_ms = 0;
};

/// FNV-1a over the scan configuration; the worker count is not part of it.
std::uint64_t scan_config_digest(std::uint64_t q, const std::vector<unsigned>& patterns, std::uint64_t block_size);
std::string digest_hex(std::uint64_t digest);

ScanReport run_scan(const FieldPtr& field, const ScanOptions& options);

}  // namespace cremona
