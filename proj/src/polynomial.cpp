#include "cremona/polynomial.hpp"

#include <cctype>
#include <charconv>
#include <numeric>
#include <sstream>

#include "cremona/error.hpp"

namespace cremona {

Polynomial::Polynomial(FieldPtr field, unsigned nvars) : field_(std::move(field)), nvars_(nvars) {
    if (nvars_ == 0) fail(ErrorCode::InvalidParameters, "polynomials need at least one variable");
}

Polynomial Polynomial::constant(FieldPtr field, unsigned nvars, Elem c) {
    Polynomial p(std::move(field), nvars);
    p.add_term(Exponents(nvars, 0), c);
    return p;
}

Polynomial Polynomial::variable(FieldPtr field, unsigned nvars, unsigned i) {
    if (i >= nvars) fail(ErrorCode::DimensionMismatch, "variable index out of range");
    Polynomial p(std::move(field), nvars);
    Exponents e(nvars, 0);
    e[i] = 1;
    p.add_term(e, Elem{1});
    return p;
}

Polynomial Polynomial::monomial(FieldPtr field, Exponents exps, Elem c) {
    Polynomial p(std::move(field), static_cast<unsigned>(exps.size()));
    p.add_term(exps, c);
    return p;
}

unsigned Polynomial::degree() const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, std::accumulate(e.begin(), e.end(), 0u));
    return d;
}

bool Polynomial::is_homogeneous() const {
    if (terms_.empty()) return true;
    const unsigned d = degree();
    for (const auto& [e, c] : terms_) {
        if (std::accumulate(e.begin(), e.end(), 0u) != d) return false;
    }
    return true;
}

Elem Polynomial::coefficient(const Exponents& e) const {
    const auto it = terms_.find(e);
    return it == terms_.end() ? Elem{0} : it->second;
}

void Polynomial::add_term(const Exponents& e, Elem c) {
    if (e.size() != nvars_) fail(ErrorCode::DimensionMismatch, "exponent vector length differs from variable count");
    if (c.v == 0) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second = field_->add(it->second, c);
        if (it->second.v == 0) terms_.erase(it);
    }
}

void Polynomial::require_compatible(const Polynomial& o) const {
    if (!field_->same_as(*o.field_)) fail(ErrorCode::MixedFields, "polynomials over different fields");
    if (nvars_ != o.nvars_) fail(ErrorCode::DimensionMismatch, "polynomials in different numbers of variables");
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    require_compatible(o);
    Polynomial out = *this;
    for (const auto& [e, c] : o.terms_) out.add_term(e, c);
    return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    require_compatible(o);
    Polynomial out = *this;
    for (const auto& [e, c] : o.terms_) out.add_term(e, field_->neg(c));
    return out;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    require_compatible(o);
    Polynomial out(field_, nvars_);
    Exponents e(nvars_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            for (unsigned i = 0; i < nvars_; ++i) e[i] = ea[i] + eb[i];
            out.add_term(e, field_->mul(ca, cb));
        }
    }
    return out;
}

Polynomial Polynomial::scaled(Elem c) const {
    Polynomial out(field_, nvars_);
    for (const auto& [e, a] : terms_) out.add_term(e, field_->mul(a, c));
    return out;
}

Polynomial Polynomial::pow(unsigned e) const {
    Polynomial result = constant(field_, nvars_, field_->one());
    Polynomial base = *this;
    while (e) {
        if (e & 1) result = result * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return result;
}

Elem Polynomial::eval(std::span<const Elem> x) const {
    if (x.size() != nvars_) fail(ErrorCode::DimensionMismatch, "point has the wrong number of coordinates");
    const Field& f = *field_;
    Elem acc{0};
    for (const auto& [e, c] : terms_) {
        Elem term = c;
        for (unsigned i = 0; i < nvars_ && term.v != 0; ++i) {
            if (e[i]) term = f.mul(term, f.pow(x[i], e[i]));
        }
        acc = f.add(acc, term);
    }
    return acc;
}

Elem Polynomial::eval_in(const SubfieldEmbedding& emb, std::span<const Elem> x) const {
    if (!emb.source()->same_as(*field_)) fail(ErrorCode::MixedFields, "embedding source differs from coefficient field");
    if (x.size() != nvars_) fail(ErrorCode::DimensionMismatch, "point has the wrong number of coordinates");
    const Field& t = *emb.target();
    Elem acc{0};
    for (const auto& [e, c] : terms_) {
        Elem term = emb.embed(c);
        for (unsigned i = 0; i < nvars_ && term.v != 0; ++i) {
            if (e[i]) term = t.mul(term, t.pow(x[i], e[i]));
        }
        acc = t.add(acc, term);
    }
    return acc;
}

Polynomial Polynomial::derivative(unsigned var) const {
    if (var >= nvars_) fail(ErrorCode::DimensionMismatch, "variable index out of range");
    Polynomial out(field_, nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponents d = e;
        --d[var];
        out.add_term(d, field_->mul(field_->from_integer(e[var]), c));
    }
    return out;
}

Polynomial Polynomial::substitute(const std::vector<Polynomial>& images) const {
    if (images.size() != nvars_) fail(ErrorCode::DimensionMismatch, "one image per variable");
    const unsigned m = images.front().nvars();
    for (const auto& img : images) {
        if (!img.field()->same_as(*field_)) fail(ErrorCode::MixedFields, "substitution over a different field");
        if (img.nvars() != m) fail(ErrorCode::DimensionMismatch, "substituted polynomials disagree on variables");
    }
    // Cache powers of each image.
    std::vector<std::map<unsigned, Polynomial>> powers(nvars_);
    auto power = [&](unsigned i, unsigned e) -> const Polynomial& {
        auto it = powers[i].find(e);
        if (it == powers[i].end()) it = powers[i].emplace(e, images[i].pow(e)).first;
        return it->second;
    };
    Polynomial out(field_, m);
    for (const auto& [e, c] : terms_) {
        Polynomial term = constant(field_, m, c);
        for (unsigned i = 0; i < nvars_; ++i) {
            if (e[i]) term = term * power(i, e[i]);
        }
        out = out + term;
    }
    return out;
}

std::string Polynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        if (!first) os << " + ";
        first = false;
        os << it->second.v;
        for (unsigned i = 0; i < nvars_; ++i) {
            if (it->first[i] == 0) continue;
            os << "*x" << i;
            if (it->first[i] > 1) os << '^' << it->first[i];
        }
    }
    return os.str();
}

namespace {

class Parser {
public:
    Parser(std::string_view text, const Field& field, unsigned nvars) : s_(text), f_(field), nvars_(nvars) {}

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool done() {
        skip();
        return pos_ >= s_.size();
    }
    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    std::uint64_t number() {
        skip();
        std::uint64_t v = 0;
        const auto* begin = s_.data() + pos_;
        const auto [ptr, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
        if (ec != std::errc{} || ptr == begin) error("expected a number");
        pos_ += static_cast<std::size_t>(ptr - begin);
        return v;
    }
    [[noreturn]] void error(const std::string& what) const {
        fail(ErrorCode::ParseError, what + " at offset " + std::to_string(pos_));
    }

    // factor := number | 'x' number ('^' number)?
    void factor(Elem& coeff, Exponents& e) {
        skip();
        if (accept('x')) {
            const std::uint64_t i = number();
            if (i >= nvars_) error("variable x" + std::to_string(i) + " out of range");
            std::uint64_t power = 1;
            if (accept('^')) power = number();
            e[i] += static_cast<unsigned>(power);
        } else {
            const std::uint64_t c = number();
            if (c >= f_.cardinality()) error("coefficient index out of range");
            coeff = f_.mul(coeff, Elem{static_cast<std::uint32_t>(c)});
        }
    }

    Polynomial parse(FieldPtr field) {
        Polynomial out(std::move(field), nvars_);
        if (done()) error("empty polynomial");
        do {
            Elem coeff = f_.one();
            Exponents e(nvars_, 0);
            factor(coeff, e);
            while (accept('*')) factor(coeff, e);
            out.add_term(e, coeff);
        } while (accept('+'));
        if (!done()) error("unexpected character");
        return out;
    }

private:
    std::string_view s_;
    const Field& f_;
    unsigned nvars_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<Exponents> monomials_of_degree(unsigned nvars, unsigned d) {
    std::vector<Exponents> out;
    if (nvars == 0) return out;
    Exponents e(nvars, 0);
    const auto rec = [&](auto&& self, unsigned i, unsigned left) -> void {
        if (i + 1 == nvars) {
            e[i] = left;
            out.push_back(e);
            return;
        }
        for (unsigned k = left + 1; k-- > 0;) {
            e[i] = k;
            self(self, i + 1, left - k);
        }
    };
    rec(rec, 0, d);
    return out;
}

Polynomial random_form(const FieldPtr& field, unsigned nvars, unsigned d, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::uint64_t> pick(0, field->cardinality() - 1);
    Polynomial p(field, nvars);
    for (const auto& m : monomials_of_degree(nvars, d)) p.add_term(m, field->element(pick(rng)));
    return p;
}

Polynomial parse_polynomial(FieldPtr field, unsigned nvars, std::string_view text) {
    Parser p(text, *field, nvars);
    return p.parse(field);
}

// RationalMap

RationalMap::RationalMap(std::vector<Polynomial> components, std::string label)
    : components_(std::move(components)), label_(std::move(label)) {
    if (components_.empty()) fail(ErrorCode::DegenerateInput, "a rational map needs components");
    const auto& first = components_.front();
    bool all_zero = true;
    std::optional<unsigned> deg;
    for (const auto& c : components_) {
        if (!c.field()->same_as(*first.field())) fail(ErrorCode::MixedFields, "components over different fields");
        if (c.nvars() != first.nvars()) fail(ErrorCode::DimensionMismatch, "components in different variables");
        if (!c.is_homogeneous()) fail(ErrorCode::DegenerateInput, "components must be homogeneous");
        if (c.is_zero()) continue;
        all_zero = false;
        if (deg && *deg != c.degree()) fail(ErrorCode::DegenerateInput, "components must share a degree");
        deg = c.degree();
    }
    if (all_zero) fail(ErrorCode::DegenerateInput, "all components vanish");
    degree_ = *deg;
}

std::optional<Point> RationalMap::evaluate(std::span<const Elem> p) const {
    if (p.size() != source_dimension() + 1) fail(ErrorCode::DimensionMismatch, "point dimension differs from source");
    Point image(components_.size());
    for (std::size_t i = 0; i < components_.size(); ++i) image[i] = components_[i].eval(p);
    if (is_zero_tuple(image)) return std::nullopt;
    return normalize(*field(), image);
}

std::optional<Point> RationalMap::evaluate_in(const SubfieldEmbedding& emb, std::span<const Elem> p) const {
    if (p.size() != source_dimension() + 1) fail(ErrorCode::DimensionMismatch, "point dimension differs from source");
    Point image(components_.size());
    for (std::size_t i = 0; i < components_.size(); ++i) image[i] = components_[i].eval_in(emb, p);
    if (is_zero_tuple(image)) return std::nullopt;
    return normalize(*emb.target(), image);
}

InducedMapReport induced_permutation(const RationalMap& map, const PointTable& table) {
    if (map.source_dimension() != table.dimension() || map.target_dimension() != table.dimension()) {
        fail(ErrorCode::DimensionMismatch, "map and table dimensions differ");
    }
    if (!map.field()->same_as(*table.field())) fail(ErrorCode::MixedFields, "map and table over different fields");
    InducedMapReport report;
    constexpr auto kNone = static_cast<std::uint32_t>(-1);
    std::vector<std::uint32_t> img(table.size(), kNone);
    std::vector<std::vector<std::size_t>> preimages(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto image = map.evaluate(table.point(i));
        if (!image) {
            report.base_points.push_back(i);
            continue;
        }
        const std::size_t j = table.index_of(*image);
        img[i] = static_cast<std::uint32_t>(j);
        preimages[j].push_back(i);
    }
    for (std::size_t j = 0; j < table.size(); ++j) {
        if (preimages[j].size() > 1) report.collisions.push_back({j, preimages[j]});
    }
    if (report.base_points.empty() && report.collisions.empty()) {
        report.permutation = Permutation(std::move(img));
        if (table.dimension() == 2) report.collinearity = collinearity_witness(*report.permutation, table);
    }
    return report;
}

std::optional<CollinearityWitness> collinearity_witness(const Permutation& perm, const PointTable& table) {
    if (table.dimension() != 2) fail(ErrorCode::DimensionMismatch, "collinearity is checked in P^2");
    if (perm.size() != table.size()) fail(ErrorCode::LengthMismatch, "permutation and table sizes differ");
    const Field& f = *table.field();
    for (std::size_t l = 0; l < table.size(); ++l) {
        const auto pts = points_on_line(table, table.point(l));
        const auto a = table.point(perm(pts[0]));
        const auto b = table.point(perm(pts[1]));
        for (std::size_t k = 2; k < pts.size(); ++k) {
            if (!collinear(f, a, b, table.point(perm(pts[k])))) {
                return CollinearityWitness{{pts[0], pts[1], pts[k]}, {perm(pts[0]), perm(pts[1]), perm(pts[k])}};
            }
        }
    }
    return std::nullopt;
}

}  // namespace cremona
