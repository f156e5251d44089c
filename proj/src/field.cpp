#include "cremona/field.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "cremona/error.hpp"

namespace cremona {

namespace {

constexpr std::uint64_t kMaxCardinality = std::uint64_t{1} << 32;
constexpr std::uint64_t kTableLimit = std::uint64_t{1} << 20;
constexpr std::uint64_t kAddTableLimit = 256;

// Conway polynomials, coefficients low-to-high.
struct ConwayEntry {
    std::uint32_t p;
    unsigned m;
    std::array<std::uint8_t, 13> coeffs;
};

constexpr ConwayEntry kConway[] = {
    {2, 1, {1, 1}},
    {2, 2, {1, 1, 1}},
    {2, 3, {1, 1, 0, 1}},
    {2, 4, {1, 1, 0, 0, 1}},
    {2, 5, {1, 0, 1, 0, 0, 1}},
    {2, 6, {1, 1, 0, 1, 1, 0, 1}},
    {2, 7, {1, 1, 0, 0, 0, 0, 0, 1}},
    {2, 8, {1, 0, 1, 1, 1, 0, 0, 0, 1}},
    {2, 9, {1, 0, 0, 0, 1, 0, 0, 0, 0, 1}},
    {2, 10, {1, 1, 1, 1, 0, 1, 1, 0, 0, 0, 1}},
    {2, 11, {1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
    {2, 12, {1, 1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 0, 1}},
    {3, 1, {1, 1}},
    {3, 2, {2, 2, 1}},
    {3, 3, {1, 2, 0, 1}},
    {3, 4, {2, 0, 0, 2, 1}},
    {3, 5, {1, 2, 0, 0, 0, 1}},
    {3, 6, {2, 2, 1, 0, 2, 0, 1}},
    {3, 7, {1, 0, 2, 0, 0, 0, 0, 1}},
    {3, 8, {2, 2, 2, 0, 1, 2, 0, 0, 1}},
    {3, 9, {1, 1, 2, 2, 0, 0, 0, 0, 0, 1}},
    {3, 10, {2, 1, 0, 0, 2, 2, 2, 0, 0, 0, 1}},
    {3, 11, {1, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
    {3, 12, {2, 0, 1, 0, 1, 1, 1, 0, 0, 0, 0, 0, 1}},
    {5, 1, {3, 1}},
    {5, 2, {2, 4, 1}},
    {5, 3, {3, 3, 0, 1}},
    {5, 4, {2, 4, 4, 0, 1}},
    {5, 5, {3, 4, 0, 0, 0, 1}},
    {5, 6, {2, 0, 1, 4, 1, 0, 1}},
    {5, 7, {3, 3, 0, 0, 0, 0, 0, 1}},
    {5, 8, {2, 4, 3, 0, 1, 0, 0, 0, 1}},
    {5, 9, {3, 1, 0, 2, 0, 0, 0, 0, 0, 1}},
    {5, 10, {2, 1, 4, 2, 3, 3, 0, 0, 0, 0, 1}},
    {5, 11, {3, 3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
    {5, 12, {2, 2, 3, 4, 4, 0, 1, 1, 0, 0, 0, 0, 1}},
    {7, 1, {4, 1}},
    {7, 2, {3, 6, 1}},
    {7, 3, {4, 0, 6, 1}},
    {7, 4, {3, 4, 5, 0, 1}},
    {7, 5, {4, 1, 0, 0, 0, 1}},
    {7, 6, {3, 6, 4, 5, 1, 0, 1}},
    {7, 7, {4, 6, 0, 0, 0, 0, 0, 1}},
    {7, 8, {3, 2, 6, 4, 0, 0, 0, 0, 1}},
    {7, 9, {4, 6, 0, 1, 6, 0, 0, 0, 0, 1}},
    {7, 10, {3, 3, 2, 1, 4, 1, 1, 0, 0, 0, 1}},
    {7, 11, {4, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
};

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t e, std::uint64_t mod) {
    std::uint64_t result = 1 % mod;
    base %= mod;
    while (e) {
        if (e & 1) result = result * base % mod;
        base = base * base % mod;
        e >>= 1;
    }
    return result;
}

std::uint64_t mod_inv(std::uint64_t a, std::uint64_t p) { return mod_pow(a, p - 2, p); }

// Dense polynomials over GF(p), low-to-high, used only for modulus checks.
using Poly = std::vector<std::uint64_t>;

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mod(Poly a, const Poly& f, std::uint64_t p) {
    trim(a);
    const std::size_t df = f.size() - 1;
    const std::uint64_t lead_inv = mod_inv(f.back(), p);
    while (a.size() > df) {
        const std::uint64_t c = a.back() * lead_inv % p;
        const std::size_t shift = a.size() - 1 - df;
        for (std::size_t i = 0; i <= df; ++i) {
            a[shift + i] = (a[shift + i] + p - c * f[i] % p) % p;
        }
        trim(a);
    }
    return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f, std::uint64_t p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    }
    return poly_mod(std::move(r), f, p);
}

Poly poly_powmod(Poly base, std::uint64_t e, const Poly& f, std::uint64_t p) {
    Poly result{1};
    while (e) {
        if (e & 1) result = poly_mulmod(result, base, f, p);
        base = poly_mulmod(base, base, f, p);
        e >>= 1;
    }
    return result;
}

Poly poly_gcd(Poly a, Poly b, std::uint64_t p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = poly_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

bool is_irreducible(const std::vector<std::uint32_t>& modulus, std::uint64_t p) {
    const std::size_t m = modulus.size() - 1;
    if (m == 1) return true;
    const Poly f(modulus.begin(), modulus.end());
    if (f[0] == 0) return false;
    // No factor of degree i <= m/2: gcd(x^(p^i) - x, f) = 1.
    Poly h{0, 1};
    for (std::size_t i = 1; i <= m / 2; ++i) {
        h = poly_powmod(h, p, f, p);
        Poly d = h;
        d.resize(std::max<std::size_t>(d.size(), 2), 0);
        d[1] = (d[1] + p - 1) % p;
        if (poly_gcd(f, d, p).size() > 1) return false;
    }
    return true;
}

std::vector<std::uint32_t> smallest_irreducible(std::uint32_t p, unsigned m) {
    std::uint64_t count = 1;
    for (unsigned i = 0; i < m; ++i) count *= p;
    std::vector<std::uint32_t> f(m + 1, 0);
    f[m] = 1;
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        std::uint64_t rest = idx;
        for (unsigned i = 0; i < m; ++i) {
            f[i] = static_cast<std::uint32_t>(rest % p);
            rest /= p;
        }
        if (is_irreducible(f, p)) return f;
    }
    fail(ErrorCode::InvariantViolation, "no irreducible polynomial found");
}

std::uint64_t checked_power(std::uint64_t p, unsigned m) {
    std::uint64_t q = 1;
    for (unsigned i = 0; i < m; ++i) {
        if (q > kMaxCardinality / p) return kMaxCardinality + 1;
        q *= p;
    }
    return q;
}

std::string poly_to_string(std::span<const std::uint32_t> coeffs) {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = coeffs.size(); i-- > 0;) {
        const std::uint32_t c = coeffs[i];
        if (c == 0) continue;
        if (!first) os << '+';
        first = false;
        if (i == 0) {
            os << c;
            continue;
        }
        if (c != 1) os << c << '*';
        os << 'x';
        if (i > 1) os << '^' << i;
    }
    if (first) os << '0';
    return os.str();
}

// Gauss-Jordan over GF(p). a is n x c row-major with full column rank expected.
// Returns R (n x n) with R * a = [I_c; 0], or nullopt if the rank is below c.
std::optional<std::vector<std::uint32_t>> left_transform(std::vector<std::uint32_t> a, unsigned n,
                                                         unsigned c, std::uint64_t p) {
    const unsigned width = c + n;
    std::vector<std::uint64_t> aug(static_cast<std::size_t>(n) * width, 0);
    for (unsigned r = 0; r < n; ++r) {
        for (unsigned j = 0; j < c; ++j) aug[r * width + j] = a[r * c + j];
        aug[r * width + c + r] = 1;
    }
    for (unsigned j = 0; j < c; ++j) {
        unsigned pivot = j;
        while (pivot < n && aug[pivot * width + j] == 0) ++pivot;
        if (pivot == n) return std::nullopt;
        if (pivot != j) {
            for (unsigned k = 0; k < width; ++k) std::swap(aug[pivot * width + k], aug[j * width + k]);
        }
        const std::uint64_t inv = mod_inv(aug[j * width + j], p);
        for (unsigned k = 0; k < width; ++k) aug[j * width + k] = aug[j * width + k] * inv % p;
        for (unsigned r = 0; r < n; ++r) {
            if (r == j) continue;
            const std::uint64_t f = aug[r * width + j];
            if (f == 0) continue;
            for (unsigned k = 0; k < width; ++k) {
                aug[r * width + k] = (aug[r * width + k] + (p - f) * aug[j * width + k]) % p;
            }
        }
    }
    std::vector<std::uint32_t> result(static_cast<std::size_t>(n) * n);
    for (unsigned r = 0; r < n; ++r) {
        for (unsigned k = 0; k < n; ++k) result[r * n + k] = static_cast<std::uint32_t>(aug[r * width + c + k]);
    }
    return result;
}

std::uint64_t clmul(std::uint32_t a, std::uint32_t b) {
    std::uint64_t result = 0;
    std::uint64_t aa = a;
    while (b) {
        if (b & 1) result ^= aa;
        aa <<= 1;
        b >>= 1;
    }
    return result;
}

}  // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

std::vector<PrimePower> factorize(std::uint64_t n) {
    std::vector<PrimePower> out;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d) continue;
        PrimePower pp{d, 0};
        while (n % d == 0) {
            n /= d;
            ++pp.exponent;
        }
        out.push_back(pp);
    }
    if (n > 1) out.push_back({n, 1});
    return out;
}

Field::Field(Token, std::uint32_t p, unsigned m, std::vector<std::uint32_t> modulus, bool conway)
    : p_(p), m_(m), q_(checked_power(p, m)), modulus_(std::move(modulus)), conway_(conway) {
    if (modulus_.size() != m + 1 || modulus_.back() != 1) {
        fail(ErrorCode::InvariantViolation, "modulus must be monic of degree m");
    }
    if (!is_irreducible(modulus_, p_)) fail(ErrorCode::InvariantViolation, "modulus is reducible");
    factored_order_ = factorize(q_ - 1);
    std::uint64_t check = 1;
    for (const auto& pp : factored_order_) {
        for (unsigned i = 0; i < pp.exponent; ++i) check *= pp.prime;
    }
    if (check != q_ - 1) fail(ErrorCode::InvariantViolation, "factored order does not multiply back");

    pow_p_.resize(m_ + 1);
    pow_p_[0] = 1;
    for (unsigned i = 1; i <= m_ && i < 32; ++i) {
        pow_p_[i] = static_cast<std::uint32_t>(std::min<std::uint64_t>(std::uint64_t{pow_p_[i - 1]} * p_, 0xffffffffu));
    }
    if (p_ == 2) {
        for (unsigned i = 0; i < m_; ++i) {
            if (modulus_[i]) reduction_mask_ |= std::uint64_t{1} << i;
        }
    }
    if (p_ != 2 && m_ > 1 && q_ <= kAddTableLimit) {
        add_.resize(q_ * q_);
        for (std::uint32_t a = 0; a < q_; ++a) {
            for (std::uint32_t b = 0; b < q_; ++b) add_[a * q_ + b] = add_digits(Elem{a}, Elem{b}, false).v;
        }
    }

    // Least-index primitive element; the table-free multiplication is used here.
    if (q_ > 2) {
        for (std::uint64_t idx = 2; idx < q_; ++idx) {
            const Elem g{static_cast<std::uint32_t>(idx)};
            bool full = true;
            for (const auto& pp : factored_order_) {
                if (pow_slow(g, (q_ - 1) / pp.prime) == one()) {
                    full = false;
                    break;
                }
            }
            if (full) {
                primitive_ = g;
                break;
            }
        }
    }

    if (q_ <= kTableLimit && q_ > 2) {
        const std::uint64_t n = q_ - 1;
        exp_.resize(2 * n);
        log_.assign(q_, 0);
        Elem x = one();
        for (std::uint64_t i = 0; i < n; ++i) {
            exp_[i] = x.v;
            exp_[i + n] = x.v;
            log_[x.v] = static_cast<std::uint32_t>(i);
            x = mul_slow(x, primitive_);
        }
        if (x != one()) fail(ErrorCode::InvariantViolation, "primitive element has wrong order");
    }
}

Elem Field::element(std::uint64_t index) const {
    if (index >= q_) fail(ErrorCode::InvalidParameters, "element index out of range");
    return Elem{static_cast<std::uint32_t>(index)};
}

Elem Field::from_integer(std::int64_t n) const {
    std::int64_t r = n % static_cast<std::int64_t>(p_);
    if (r < 0) r += p_;
    return Elem{static_cast<std::uint32_t>(r)};
}

std::uint32_t Field::coefficient(Elem x, unsigned i) const {
    if (i >= m_) return 0;
    if (p_ == 2) return (x.v >> i) & 1u;
    return (x.v / pow_p_[i]) % p_;
}

std::vector<std::uint32_t> Field::coefficients(Elem x) const {
    std::vector<std::uint32_t> out(m_);
    std::uint64_t rest = x.v;
    for (unsigned i = 0; i < m_; ++i) {
        out[i] = static_cast<std::uint32_t>(rest % p_);
        rest /= p_;
    }
    return out;
}

Elem Field::from_coefficients(std::span<const std::uint32_t> coeffs) const {
    if (coeffs.size() != m_) fail(ErrorCode::LengthMismatch, "coefficient vector length differs from degree");
    std::uint64_t v = 0;
    for (std::size_t i = m_; i-- > 0;) {
        if (coeffs[i] >= p_) fail(ErrorCode::InvalidParameters, "coefficient out of range");
        v = v * p_ + coeffs[i];
    }
    return Elem{static_cast<std::uint32_t>(v)};
}

Elem Field::generator_root() const {
    if (m_ > 1) return Elem{p_};
    return from_integer(-static_cast<std::int64_t>(modulus_[0]));
}

Elem Field::add_digits(Elem a, Elem b, bool subtract) const {
    std::uint64_t x = a.v;
    std::uint64_t y = b.v;
    std::uint64_t out = 0;
    std::uint64_t place = 1;
    for (unsigned i = 0; i < m_; ++i) {
        const std::uint64_t da = x % p_;
        const std::uint64_t db = y % p_;
        x /= p_;
        y /= p_;
        const std::uint64_t d = subtract ? (da + p_ - db) % p_ : (da + db) % p_;
        out += d * place;
        place *= p_;
    }
    return Elem{static_cast<std::uint32_t>(out)};
}

Elem Field::add(Elem a, Elem b) const noexcept {
    if (p_ == 2) return Elem{a.v ^ b.v};
    if (m_ == 1) return Elem{static_cast<std::uint32_t>((std::uint64_t{a.v} + b.v) % p_)};
    if (!add_.empty()) return Elem{add_[a.v * q_ + b.v]};
    return add_digits(a, b, false);
}

Elem Field::neg(Elem a) const noexcept {
    if (p_ == 2 || a.v == 0) return a;
    if (m_ == 1) return Elem{p_ - a.v};
    return add_digits(Elem{0}, a, true);
}

Elem Field::sub(Elem a, Elem b) const noexcept {
    if (p_ == 2) return Elem{a.v ^ b.v};
    if (m_ == 1) return Elem{static_cast<std::uint32_t>((std::uint64_t{a.v} + p_ - b.v) % p_)};
    if (!add_.empty()) return add(a, neg(b));
    return add_digits(a, b, true);
}

Elem Field::mul_slow(Elem a, Elem b) const {
    if (a.v == 0 || b.v == 0) return Elem{0};
    if (m_ == 1) return Elem{static_cast<std::uint32_t>(std::uint64_t{a.v} * b.v % p_)};
    if (p_ == 2) {
        std::uint64_t prod = clmul(a.v, b.v);
        for (int bit = 2 * static_cast<int>(m_) - 2; bit >= static_cast<int>(m_); --bit) {
            if ((prod >> bit) & 1u) {
                prod ^= std::uint64_t{1} << bit;
                prod ^= reduction_mask_ << (bit - m_);
            }
        }
        return Elem{static_cast<std::uint32_t>(prod)};
    }
    std::array<std::uint64_t, 64> da{}, db{}, prod{};
    std::uint64_t x = a.v, y = b.v;
    for (unsigned i = 0; i < m_; ++i) {
        da[i] = x % p_;
        db[i] = y % p_;
        x /= p_;
        y /= p_;
    }
    for (unsigned i = 0; i < m_; ++i) {
        if (!da[i]) continue;
        for (unsigned j = 0; j < m_; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p_;
    }
    for (unsigned deg = 2 * m_ - 2; deg >= m_; --deg) {
        const std::uint64_t c = prod[deg];
        if (c == 0) continue;
        prod[deg] = 0;
        for (unsigned i = 0; i < m_; ++i) {
            prod[deg - m_ + i] = (prod[deg - m_ + i] + (p_ - c) * modulus_[i]) % p_;
        }
    }
    std::uint64_t out = 0;
    for (unsigned i = m_; i-- > 0;) out = out * p_ + prod[i];
    return Elem{static_cast<std::uint32_t>(out)};
}

Elem Field::mul(Elem a, Elem b) const noexcept {
    if (a.v == 0 || b.v == 0) return Elem{0};
    if (!exp_.empty()) return Elem{exp_[log_[a.v] + log_[b.v]]};
    return mul_slow(a, b);
}

Elem Field::pow_slow(Elem a, std::uint64_t e) const {
    Elem result = one();
    while (e) {
        if (e & 1) result = mul_slow(result, a);
        a = mul_slow(a, a);
        e >>= 1;
    }
    return result;
}

Elem Field::pow(Elem a, std::int64_t e) const {
    if (a.v == 0) {
        if (e < 0) fail(ErrorCode::DivisionByZero, "negative power of zero");
        return e == 0 ? one() : zero();
    }
    const std::int64_t n = static_cast<std::int64_t>(q_ - 1);
    std::int64_t r = e % n;
    if (r < 0) r += n;
    const auto ue = static_cast<std::uint64_t>(r);
    if (!exp_.empty()) return Elem{exp_[(std::uint64_t{log_[a.v]} * ue) % (q_ - 1)]};
    Elem result = one();
    std::uint64_t k = ue;
    while (k) {
        if (k & 1) result = mul(result, a);
        a = mul(a, a);
        k >>= 1;
    }
    return result;
}

Elem Field::inv(Elem a) const {
    if (a.v == 0) fail(ErrorCode::DivisionByZero, "inverse of zero");
    if (!exp_.empty()) {
        const std::uint32_t l = log_[a.v];
        return Elem{exp_[l == 0 ? 0 : (q_ - 1) - l]};
    }
    return pow(a, -1);
}

Elem Field::div(Elem a, Elem b) const { return mul(a, inv(b)); }

Elem Field::frobenius(Elem a, unsigned k) const {
    k %= m_;
    if (k == 0 || a.v == 0) return a;
    if (p_ == 2) {
        for (unsigned i = 0; i < k; ++i) a = mul(a, a);
        return a;
    }
    return pow(a, static_cast<std::int64_t>(pow_p_[k]));
}

std::uint64_t Field::order(Elem a) const {
    if (a.v == 0) return 0;
    std::uint64_t n = q_ - 1;
    for (const auto& pp : factored_order_) {
        for (unsigned i = 0; i < pp.exponent; ++i) {
            if (pow(a, static_cast<std::int64_t>(n / pp.prime)) != one()) break;
            n /= pp.prime;
        }
    }
    return n;
}

bool Field::is_primitive(Elem a) const { return a.v != 0 && order(a) == q_ - 1; }

bool Field::is_square(Elem a) const {
    if (a.v == 0 || p_ == 2) return true;
    return pow(a, static_cast<std::int64_t>((q_ - 1) / 2)) == one();
}

std::optional<Elem> Field::sqrt(Elem a) const {
    if (a.v == 0) return a;
    if (p_ == 2) return pow(a, static_cast<std::int64_t>(q_ / 2));
    if (!is_square(a)) return std::nullopt;
    // Tonelli-Shanks in the multiplicative group.
    std::uint64_t odd = q_ - 1;
    unsigned s = 0;
    while (odd % 2 == 0) {
        odd /= 2;
        ++s;
    }
    Elem z{2};
    for (std::uint64_t idx = 2; idx < q_; ++idx) {
        z = Elem{static_cast<std::uint32_t>(idx)};
        if (!is_square(z)) break;
    }
    Elem c = pow(z, static_cast<std::int64_t>(odd));
    Elem x = pow(a, static_cast<std::int64_t>((odd + 1) / 2));
    Elem t = pow(a, static_cast<std::int64_t>(odd));
    unsigned mm = s;
    while (t != one()) {
        unsigned i = 0;
        Elem tt = t;
        while (tt != one()) {
            tt = mul(tt, tt);
            ++i;
        }
        Elem b = c;
        for (unsigned j = 0; j + i + 1 < mm; ++j) b = mul(b, b);
        x = mul(x, b);
        c = mul(b, b);
        t = mul(t, c);
        mm = i;
    }
    const Elem other = neg(x);
    return std::min(x, other);
}

bool Field::same_as(const Field& other) const noexcept {
    return this == &other || (p_ == other.p_ && m_ == other.m_ && modulus_ == other.modulus_);
}

std::string Field::describe() const {
    std::ostringstream os;
    os << "GF(" << q_ << ")";
    if (m_ > 1) os << " = GF(" << p_ << ")[x]/(" << poly_to_string(modulus_) << ")";
    return os.str();
}

std::string Field::to_string(Elem a) const {
    if (m_ == 1) return std::to_string(a.v);
    const auto c = coefficients(a);
    return poly_to_string(c);
}

FieldPtr make_field(std::uint32_t p, unsigned m) {
    if (!is_prime(p)) fail(ErrorCode::NonPrimeCharacteristic, std::to_string(p) + " is not prime");
    if (m == 0) fail(ErrorCode::InvalidParameters, "extension degree must be positive");
    if (checked_power(p, m) > kMaxCardinality) fail(ErrorCode::UnsupportedSize, "field larger than 2^32");

    static std::mutex mutex;
    static std::map<std::pair<std::uint32_t, unsigned>, FieldPtr> cache;
    std::lock_guard lock(mutex);
    const auto key = std::make_pair(p, m);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    std::vector<std::uint32_t> modulus;
    bool conway = false;
    for (const auto& entry : kConway) {
        if (entry.p == p && entry.m == m) {
            modulus.assign(entry.coeffs.begin(), entry.coeffs.begin() + m + 1);
            conway = true;
            break;
        }
    }
    if (!conway) modulus = smallest_irreducible(p, m);
    auto field = std::make_shared<const Field>(Field::Token{}, p, m, std::move(modulus), conway);
    cache.emplace(key, field);
    return field;
}

FieldPtr make_field_of_order(std::uint64_t q) {
    if (q < 2) fail(ErrorCode::NonPrimeCharacteristic, "field order must be a prime power");
    if (q > kMaxCardinality) fail(ErrorCode::UnsupportedSize, "field larger than 2^32");
    const auto f = factorize(q);
    if (f.size() != 1) fail(ErrorCode::NonPrimeCharacteristic, std::to_string(q) + " is not a prime power");
    return make_field(static_cast<std::uint32_t>(f[0].prime), f[0].exponent);
}

// FieldElement

FieldElement::FieldElement(FieldPtr field, Elem value) : field_(std::move(field)), value_(value) {
    if (value_.v >= field_->cardinality()) fail(ErrorCode::InvalidParameters, "element index out of range");
}

FieldElement::FieldElement(FieldPtr field, std::span<const std::uint32_t> coefficients)
    : field_(std::move(field)), value_(field_->from_coefficients(coefficients)) {}

void FieldElement::require_same(const FieldElement& o) const {
    if (!field_->same_as(*o.field_)) fail(ErrorCode::MixedFields, "operands belong to different fields");
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
    require_same(o);
    return {field_, field_->add(value_, o.value_)};
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
    require_same(o);
    return {field_, field_->sub(value_, o.value_)};
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
    require_same(o);
    return {field_, field_->mul(value_, o.value_)};
}

FieldElement FieldElement::operator/(const FieldElement& o) const {
    require_same(o);
    return {field_, field_->div(value_, o.value_)};
}

FieldElement FieldElement::operator-() const { return {field_, field_->neg(value_)}; }

FieldElement FieldElement::pow(std::int64_t e) const { return {field_, field_->pow(value_, e)}; }

FieldElement FieldElement::inverse() const { return {field_, field_->inv(value_)}; }

bool FieldElement::operator==(const FieldElement& o) const {
    return field_->same_as(*o.field_) && value_ == o.value_;
}

// SubfieldEmbedding

SubfieldEmbedding::SubfieldEmbedding(FieldPtr source, FieldPtr target)
    : source_(std::move(source)), target_(std::move(target)) {
    const Field& s = *source_;
    const Field& t = *target_;
    if (s.characteristic() != t.characteristic() || t.degree() % s.degree() != 0) {
        fail(ErrorCode::NotASubfield, "GF(" + std::to_string(t.cardinality()) + ") does not contain GF(" +
                                          std::to_string(s.cardinality()) + ")");
    }
    k_ = t.degree() / s.degree();

    const auto& mod = s.modulus();
    auto eval_modulus = [&](Elem x) {
        Elem acc = t.zero();
        for (std::size_t i = mod.size(); i-- > 0;) acc = t.add(t.mul(acc, x), t.from_integer(mod[i]));
        return acc;
    };
    if (s.degree() == 1) {
        generator_image_ = t.from_integer(-static_cast<std::int64_t>(mod[0]));
    } else if (s.same_as(t)) {
        generator_image_ = t.generator_root();
    } else {
        // Roots lie in the unique subfield of order |source|: {0} and powers of gamma.
        const Elem gamma = t.pow(t.primitive_element(),
                                 static_cast<std::int64_t>((t.cardinality() - 1) / (s.cardinality() - 1)));
        std::optional<Elem> best;
        Elem x = t.one();
        for (std::uint64_t i = 0; i + 1 < s.cardinality(); ++i) {
            if (eval_modulus(x) == t.zero() && (!best || x < *best)) best = x;
            x = t.mul(x, gamma);
        }
        if (!best) fail(ErrorCode::InvariantViolation, "source modulus has no root in target");
        generator_image_ = *best;
    }

    basis_images_.resize(s.degree());
    Elem g = t.one();
    for (unsigned j = 0; j < s.degree(); ++j) {
        basis_images_[j] = g;
        g = t.mul(g, generator_image_);
    }
    if (s.cardinality() <= (1u << 16)) {
        table_.resize(s.cardinality());
        for (std::uint64_t i = 0; i < s.cardinality(); ++i) {
            Elem acc = t.zero();
            std::uint64_t rest = i;
            for (unsigned j = 0; j < s.degree(); ++j) {
                const auto c = static_cast<std::int64_t>(rest % s.characteristic());
                rest /= s.characteristic();
                if (c) acc = t.add(acc, t.mul(t.from_integer(c), basis_images_[j]));
            }
            table_[i] = acc;
        }
    }

    const unsigned n = t.degree();
    const unsigned c = s.degree();
    std::vector<std::uint32_t> a(static_cast<std::size_t>(n) * c);
    for (unsigned j = 0; j < c; ++j) {
        const auto digits = t.coefficients(basis_images_[j]);
        for (unsigned r = 0; r < n; ++r) a[r * c + j] = digits[r];
    }
    auto r = left_transform(std::move(a), n, c, t.characteristic());
    if (!r) fail(ErrorCode::InvariantViolation, "embedded power basis is dependent");
    left_inverse_ = std::move(*r);
}

Elem SubfieldEmbedding::embed(Elem x) const {
    if (!table_.empty()) return table_.at(x.v);
    const Field& s = *source_;
    const Field& t = *target_;
    Elem acc = t.zero();
    std::uint64_t rest = x.v;
    for (unsigned j = 0; j < s.degree(); ++j) {
        const auto c = static_cast<std::int64_t>(rest % s.characteristic());
        rest /= s.characteristic();
        if (c) acc = t.add(acc, t.mul(t.from_integer(c), basis_images_[j]));
    }
    return acc;
}

std::optional<Elem> SubfieldEmbedding::restrict_to_source(Elem y) const {
    const Field& s = *source_;
    const Field& t = *target_;
    const unsigned n = t.degree();
    const unsigned c = s.degree();
    const std::uint64_t p = t.characteristic();
    const auto digits = t.coefficients(y);
    std::vector<std::uint32_t> out(c);
    for (unsigned r = 0; r < n; ++r) {
        std::uint64_t acc = 0;
        for (unsigned k = 0; k < n; ++k) acc = (acc + std::uint64_t{left_inverse_[r * n + k]} * digits[k]) % p;
        if (r < c) {
            out[r] = static_cast<std::uint32_t>(acc);
        } else if (acc != 0) {
            return std::nullopt;
        }
    }
    return s.from_coefficients(out);
}

bool SubfieldEmbedding::in_subfield(Elem y) const { return relative_frobenius(y, 1) == y; }

Elem SubfieldEmbedding::relative_frobenius(Elem y, unsigned i) const {
    const unsigned steps = static_cast<unsigned>((std::uint64_t{source_->degree()} * i) % target_->degree());
    return target_->frobenius(y, steps);
}

// RelativeBasis

RelativeBasis::RelativeBasis(const SubfieldEmbedding& embedding, std::vector<Elem> family)
    : embedding_(&embedding), source_(embedding.source()), target_(embedding.target()), family_(std::move(family)) {
    const Field& t = *target_;
    const unsigned ms = source_->degree();
    rows_ = t.degree();
    cols_ = static_cast<unsigned>(ms * family_.size());
    if (cols_ > rows_) fail(ErrorCode::InvariantViolation, "family larger than the relative degree");
    std::vector<std::uint32_t> a(static_cast<std::size_t>(rows_) * cols_);
    for (std::size_t i = 0; i < family_.size(); ++i) {
        for (unsigned j = 0; j < ms; ++j) {
            const unsigned col = static_cast<unsigned>(i * ms + j);
            const Elem basis_elem = t.mul(t.pow(embedding.generator_image(), j), family_[i]);
            const auto d = t.coefficients(basis_elem);
            for (unsigned r = 0; r < rows_; ++r) a[r * cols_ + col] = d[r];
        }
    }
    auto r = left_transform(std::move(a), rows_, cols_, t.characteristic());
    if (!r) fail(ErrorCode::InvariantViolation, "family is linearly dependent over the subfield");
    transform_ = std::move(*r);
    if (t.characteristic() == 2) {
        transform_bits_.assign(rows_, 0);
        for (unsigned row = 0; row < rows_; ++row) {
            for (unsigned k = 0; k < rows_; ++k) {
                if (transform_[row * rows_ + k]) transform_bits_[row] |= 1u << k;
            }
        }
    }
}

bool RelativeBasis::spans_target() const noexcept { return cols_ == rows_; }

bool RelativeBasis::coordinates_into(Elem y, std::span<Elem> out) const {
    const unsigned ms = source_->degree();
    if (!transform_bits_.empty()) {
        for (auto& o : out) o = Elem{0};
        for (unsigned row = 0; row < rows_; ++row) {
            const unsigned bit = std::popcount(transform_bits_[row] & y.v) & 1u;
            if (!bit) continue;
            if (row >= cols_) return false;
            out[row / ms].v |= 1u << (row % ms);
        }
        return true;
    }
    const Field& t = *target_;
    const std::uint64_t p = t.characteristic();
    const auto digits = t.coefficients(y);
    std::vector<std::uint32_t> coeffs(ms);
    for (unsigned row = 0; row < rows_; ++row) {
        std::uint64_t acc = 0;
        for (unsigned k = 0; k < rows_; ++k) acc = (acc + std::uint64_t{transform_[row * rows_ + k]} * digits[k]) % p;
        if (row >= cols_) {
            if (acc != 0) return false;
            continue;
        }
        coeffs[row % ms] = static_cast<std::uint32_t>(acc);
        if (row % ms == ms - 1) out[row / ms] = source_->from_coefficients(coeffs);
    }
    return true;
}

std::optional<std::vector<Elem>> RelativeBasis::coordinates(Elem y) const {
    std::vector<Elem> out(family_.size());
    if (!coordinates_into(y, out)) return std::nullopt;
    return out;
}

Elem RelativeBasis::combine(std::span<const Elem> coords) const {
    if (coords.size() != family_.size()) fail(ErrorCode::LengthMismatch, "coordinate count differs from family size");
    const Field& t = *target_;
    Elem acc = t.zero();
    for (std::size_t i = 0; i < coords.size(); ++i) acc = t.add(acc, t.mul(embedding_->embed(coords[i]), family_[i]));
    return acc;
}

// Galois data

GaloisData galois_data(Elem x, const SubfieldEmbedding& sub) {
    const Field& t = *sub.target();
    GaloisData out;
    Elem trace = t.zero();
    Elem norm = t.one();
    for (unsigned i = 0; i < sub.relative_degree(); ++i) {
        const Elem c = sub.relative_frobenius(x, i);
        trace = t.add(trace, c);
        norm = t.mul(norm, c);
        if (std::find(out.frobenius_orbit.begin(), out.frobenius_orbit.end(), c) == out.frobenius_orbit.end()) {
            out.frobenius_orbit.push_back(c);
        }
    }
    const auto tr = sub.restrict_to_source(trace);
    const auto nm = sub.restrict_to_source(norm);
    if (!tr || !nm) fail(ErrorCode::InvariantViolation, "trace or norm outside the subfield");
    out.trace = *tr;
    out.norm = *nm;
    out.order = t.order(x);
    return out;
}

Elem first_nonsquare(const Field& field) {
    if (field.characteristic() == 2) fail(ErrorCode::EvenCharacteristic, "every element is a square");
    for (std::uint64_t idx = 2; idx < field.cardinality(); ++idx) {
        const Elem x = field.element(idx);
        if (!field.is_square(x)) return x;
    }
    fail(ErrorCode::InvariantViolation, "no nonsquare found");
}

SpecialMultiplier find_special_multiplier(const FieldPtr& field, Elem t) {
    const Field& f = *field;
    if (f.characteristic() == 2) fail(ErrorCode::EvenCharacteristic, "requires odd characteristic");
    if (t.v == 0 || f.is_square(t)) fail(ErrorCode::NotANonSquare, f.to_string(t) + " is a square");
    SpecialMultiplier out;
    out.quadratic = make_field(f.characteristic(), 2 * f.degree());
    const Field& big = *out.quadratic;
    const SubfieldEmbedding emb(field, out.quadratic);
    const auto s = big.sqrt(big.inv(emb.embed(t)));
    if (!s) fail(ErrorCode::InvariantViolation, "1/t has no square root in the quadratic extension");
    out.sqrt_t_inverse = *s;
    const Elem t_inv = f.inv(t);
    for (std::uint64_t ia = 0; ia < f.cardinality(); ++ia) {
        const Elem alpha = f.element(ia);
        // beta^2 = (alpha^2 - 1) / t
        const Elem b2 = f.mul(f.sub(f.mul(alpha, alpha), f.one()), t_inv);
        const auto root = f.sqrt(b2);
        if (!root) continue;
        std::vector<Elem> betas{*root};
        if (f.neg(*root) != *root) betas.push_back(f.neg(*root));
        std::sort(betas.begin(), betas.end());
        for (const Elem beta : betas) {
            const Elem mult = big.add(emb.embed(beta), big.mul(big.sub(emb.embed(alpha), big.one()), *s));
            if (big.is_primitive(mult)) {
                out.alpha = alpha;
                out.beta = beta;
                out.multiplier = mult;
                return out;
            }
        }
    }
    fail(ErrorCode::InvariantViolation, "no primitive multiplier on the conic");
}

}  // namespace cremona
