#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cremona {

/// Map of cycle length to the number of cycles of that length.
using CycleType = std::map<std::size_t, std::size_t>;

class Permutation {
public:
    Permutation() = default;
    /// img[i] is the image of i; throws NotABijection unless img permutes [0, N).
    explicit Permutation(std::vector<std::uint32_t> img);
    static Permutation identity(std::size_t n);

    std::size_t size() const noexcept { return img_.size(); }
    std::uint32_t operator()(std::size_t i) const { return img_[i]; }
    const std::vector<std::uint32_t>& images() const noexcept { return img_; }

    /// Cycles in order of their least element, each starting there.
    std::vector<std::vector<std::uint32_t>> cycles() const;
    CycleType cycle_type() const;
    int sign() const;
    /// lcm of the cycle lengths; throws InvariantViolation on 64-bit overflow.
    std::uint64_t order() const;
    std::size_t fixed_points() const;
    bool is_identity() const;

    Permutation inverse() const;
    Permutation pow(std::int64_t e) const;

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<std::uint32_t> img_;
};

/// (a * b)(i) = a(b(i)).
Permutation compose(const Permutation& a, const Permutation& b);

struct PermStats {
    int sign = 1;
    CycleType cycle_type;
    std::uint64_t order = 1;
};

PermStats perm_stats(const Permutation& p);

/// "6^1 1^25" style, longest cycles first.
std::string cycle_type_string(const CycleType& ct);

}  // namespace cremona
