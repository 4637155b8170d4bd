#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sosmat/rational.hpp"

namespace sosmat {

/// Exponent multi-index of a monomial x^alpha in a fixed number of variables.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::size_t n) : e_(n, 0u) {}
    explicit MultiIndex(std::vector<unsigned> e) : e_(std::move(e)) {}

    std::size_t size() const { return e_.size(); }
    unsigned operator[](std::size_t i) const { return e_[i]; }
    unsigned& operator[](std::size_t i) { return e_[i]; }
    const std::vector<unsigned>& exponents() const { return e_; }

    unsigned degree() const {
        unsigned d = 0;
        for (unsigned x : e_) d += x;
        return d;
    }

    bool is_even() const {
        for (unsigned x : e_)
            if (x % 2 != 0) return false;
        return true;
    }

    MultiIndex operator+(const MultiIndex& o) const {
        MultiIndex r(e_.size());
        for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i] + o.e_[i];
        return r;
    }

    bool operator==(const MultiIndex& o) const { return e_ == o.e_; }
    bool operator!=(const MultiIndex& o) const { return e_ != o.e_; }

private:
    std::vector<unsigned> e_;
};

/// Graded lexicographic order: compare total degree first, then lex.
struct GradedLexLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const {
        unsigned da = a.degree(), db = b.degree();
        if (da != db) return da < db;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] != b[i]) return a[i] > b[i]; // x1 before x2 within a degree
        }
        return false;
    }
};

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// The zero polynomial stores no terms; its degree is 0 by convention and
/// is_zero() distinguishes it from nonzero constants.
class Polynomial {
public:
    using TermMap = std::map<MultiIndex, Rational, GradedLexLess>;

    Polynomial() : n_(0) {}
    explicit Polynomial(int n) : n_(n) {}

    static Polynomial constant(int n, const Rational& c) {
        Polynomial p(n);
        p.add_term(MultiIndex(static_cast<std::size_t>(n)), c);
        return p;
    }

    /// The monomial x_{var+1} (0-based var index).
    static Polynomial variable(int n, int var, unsigned power = 1) {
        Polynomial p(n);
        MultiIndex mi(static_cast<std::size_t>(n));
        mi[static_cast<std::size_t>(var)] = power;
        p.add_term(mi, 1);
        return p;
    }

    int var_count() const { return n_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    unsigned degree() const {
        unsigned d = 0;
        for (const auto& [mi, c] : terms_) d = std::max(d, mi.degree());
        return d;
    }

    Rational coeff(const MultiIndex& mi) const {
        auto it = terms_.find(mi);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add_term(const MultiIndex& mi, const Rational& c) {
        if (mi.size() != static_cast<std::size_t>(n_))
            throw std::invalid_argument("multi-index length mismatch");
        if (c == 0) return;
        auto [it, inserted] = terms_.emplace(mi, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Polynomial operator-() const {
        Polynomial r(n_);
        for (const auto& [mi, c] : terms_) r.terms_.emplace(mi, -c);
        return r;
    }

    Polynomial& operator+=(const Polynomial& o) {
        check_vars(o);
        for (const auto& [mi, c] : o.terms_) add_term(mi, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        check_vars(o);
        for (const auto& [mi, c] : o.terms_) add_term(mi, -c);
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.check_vars(b);
        Polynomial r(a.n_);
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) r.add_term(ma + mb, ca * cb);
        return r;
    }

    friend Polynomial operator*(const Rational& c, const Polynomial& p) {
        Polynomial r(p.n_);
        if (c == 0) return r;
        for (const auto& [mi, pc] : p.terms_) r.terms_.emplace(mi, c * pc);
        return r;
    }

    Polynomial pow(unsigned k) const {
        Polynomial r = constant(n_, 1);
        for (unsigned i = 0; i < k; ++i) r = r * (*this);
        return r;
    }

    bool operator==(const Polynomial& o) const { return n_ == o.n_ && terms_ == o.terms_; }
    bool operator!=(const Polynomial& o) const { return !(*this == o); }

    double eval(std::span<const double> x) const;
    Rational eval_exact(std::span<const Rational> x) const;

    bool is_even() const {
        for (const auto& [mi, c] : terms_)
            if (!mi.is_even()) return false;
        return true;
    }

    /// Homogeneous iff all terms share one total degree (zero counts as degree 0).
    bool is_homogeneous(unsigned* degree_out = nullptr) const {
        if (terms_.empty()) {
            if (degree_out) *degree_out = 0;
            return true;
        }
        unsigned d = terms_.begin()->first.degree();
        for (const auto& [mi, c] : terms_)
            if (mi.degree() != d) return false;
        if (degree_out) *degree_out = d;
        return true;
    }

    /// Halve every exponent; requires an even polynomial.
    Polynomial halve_exponents() const;

    /// Substitute x_i -> x_i^2.
    Polynomial square_variables() const;

    /// Reinterpret over n_new >= n variables (existing variables keep their slots).
    Polynomial extend_vars(int n_new) const;

    std::string to_string(const std::vector<std::string>& names = {}) const;

private:
    void check_vars(const Polynomial& o) const {
        if (n_ != o.n_) throw std::invalid_argument("variable count mismatch");
    }

    int n_;
    TermMap terms_;
};

} // namespace sosmat
