#include "cremona/permutation.hpp"

#include <numeric>
#include <sstream>

#include "cremona/error.hpp"

namespace cremona {

Permutation::Permutation(std::vector<std::uint32_t> img) : img_(std::move(img)) {
    std::vector<bool> seen(img_.size(), false);
    for (std::size_t i = 0; i < img_.size(); ++i) {
        const auto j = img_[i];
        if (j >= img_.size() || seen[j]) {
            fail(ErrorCode::NotABijection, "image sequence is not a bijection (position " + std::to_string(i) + ")");
        }
        seen[j] = true;
    }
}

Permutation Permutation::identity(std::size_t n) {
    std::vector<std::uint32_t> img(n);
    std::iota(img.begin(), img.end(), 0u);
    return Permutation(std::move(img));
}

std::vector<std::vector<std::uint32_t>> Permutation::cycles() const {
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<bool> seen(img_.size(), false);
    for (std::size_t i = 0; i < img_.size(); ++i) {
        if (seen[i]) continue;
        std::vector<std::uint32_t> cycle;
        auto j = static_cast<std::uint32_t>(i);
        while (!seen[j]) {
            seen[j] = true;
            cycle.push_back(j);
            j = img_[j];
        }
        out.push_back(std::move(cycle));
    }
    return out;
}

CycleType Permutation::cycle_type() const {
    CycleType ct;
    std::vector<bool> seen(img_.size(), false);
    for (std::size_t i = 0; i < img_.size(); ++i) {
        if (seen[i]) continue;
        std::size_t len = 0;
        for (std::size_t j = i; !seen[j]; j = img_[j]) {
            seen[j] = true;
            ++len;
        }
        ++ct[len];
    }
    return ct;
}

int Permutation::sign() const {
    std::size_t cycles = 0;
    for (const auto& [len, count] : cycle_type()) cycles += count;
    return ((img_.size() - cycles) % 2 == 0) ? 1 : -1;
}

std::uint64_t Permutation::order() const {
    std::uint64_t result = 1;
    for (const auto& [len, count] : cycle_type()) {
        const std::uint64_t g = std::gcd(result, static_cast<std::uint64_t>(len));
        const std::uint64_t factor = len / g;
        if (result > UINT64_MAX / factor) fail(ErrorCode::InvariantViolation, "permutation order overflows 64 bits");
        result *= factor;
    }
    return result;
}

std::size_t Permutation::fixed_points() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < img_.size(); ++i) n += img_[i] == i;
    return n;
}

bool Permutation::is_identity() const { return fixed_points() == img_.size(); }

Permutation Permutation::inverse() const {
    std::vector<std::uint32_t> inv(img_.size());
    for (std::size_t i = 0; i < img_.size(); ++i) inv[img_[i]] = static_cast<std::uint32_t>(i);
    return Permutation(std::move(inv));
}

Permutation Permutation::pow(std::int64_t e) const {
    Permutation base = e < 0 ? inverse() : *this;
    std::uint64_t k = e < 0 ? static_cast<std::uint64_t>(-(e + 1)) + 1 : static_cast<std::uint64_t>(e);
    Permutation result = identity(img_.size());
    while (k) {
        if (k & 1) result = compose(result, base);
        base = compose(base, base);
        k >>= 1;
    }
    return result;
}

Permutation compose(const Permutation& a, const Permutation& b) {
    if (a.size() != b.size()) fail(ErrorCode::LengthMismatch, "composing permutations of different sizes");
    std::vector<std::uint32_t> img(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) img[i] = a(b(i));
    return Permutation(std::move(img));
}

PermStats perm_stats(const Permutation& p) { return {p.sign(), p.cycle_type(), p.order()}; }

std::string cycle_type_string(const CycleType& ct) {
    std::ostringstream os;
    bool first = true;
    for (auto it = ct.rbegin(); it != ct.rend(); ++it) {
        if (!first) os << ' ';
        first = false;
        os << it->first << '^' << it->second;
    }
    return os.str();
}

}  // namespace cremona
