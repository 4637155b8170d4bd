#include "sosmat/polynomial.hpp"

#include <cmath>
#include <sstream>

namespace sosmat {

double Polynomial::eval(std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(n_))
        throw std::invalid_argument("eval: point dimension mismatch");
    double acc = 0.0;
    for (const auto& [mi, c] : terms_) {
        double t = to_double(c);
        for (std::size_t i = 0; i < mi.size(); ++i)
            for (unsigned k = 0; k < mi[i]; ++k) t *= x[i];
        acc += t;
    }
    return acc;
}

Rational Polynomial::eval_exact(std::span<const Rational> x) const {
    if (x.size() != static_cast<std::size_t>(n_))
        throw std::invalid_argument("eval_exact: point dimension mismatch");
    Rational acc = 0;
    for (const auto& [mi, c] : terms_) {
        Rational t = c;
        for (std::size_t i = 0; i < mi.size(); ++i)
            for (unsigned k = 0; k < mi[i]; ++k) t *= x[i];
        acc += t;
    }
    return acc;
}

Polynomial Polynomial::halve_exponents() const {
    Polynomial r(n_);
    for (const auto& [mi, c] : terms_) {
        MultiIndex h(mi.size());
        for (std::size_t i = 0; i < mi.size(); ++i) {
            if (mi[i] % 2 != 0) throw std::invalid_argument("halve_exponents: odd exponent");
            h[i] = mi[i] / 2;
        }
        r.terms_.emplace(h, c);
    }
    return r;
}

Polynomial Polynomial::square_variables() const {
    Polynomial r(n_);
    for (const auto& [mi, c] : terms_) {
        MultiIndex d(mi.size());
        for (std::size_t i = 0; i < mi.size(); ++i) d[i] = 2 * mi[i];
        r.terms_.emplace(d, c);
    }
    return r;
}

Polynomial Polynomial::extend_vars(int n_new) const {
    if (n_new < n_) throw std::invalid_argument("extend_vars: cannot shrink");
    Polynomial r(n_new);
    for (const auto& [mi, c] : terms_) {
        MultiIndex e(static_cast<std::size_t>(n_new));
        for (std::size_t i = 0; i < mi.size(); ++i) e[i] = mi[i];
        r.terms_.emplace(e, c);
    }
    return r;
}

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // highest degree first reads more naturally
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [mi, c] = *it;
        Rational a = c;
        if (first) {
            if (a < 0) { os << "-"; a = -a; }
        } else {
            os << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        bool any_var = mi.degree() > 0;
        if (!any_var || a != 1) {
            os << a.str();
            if (any_var) os << "*";
        }
        bool need_star = false;
        for (std::size_t i = 0; i < mi.size(); ++i) {
            if (mi[i] == 0) continue;
            if (need_star) os << "*";
            if (i < names.size()) os << names[i];
            else os << "x" << (i + 1);
            if (mi[i] > 1) os << "^" << mi[i];
            need_star = true;
        }
    }
    return os.str();
}

} // namespace sosmat
