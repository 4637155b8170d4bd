#include "sosmat/io.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace sosmat {

namespace {

std::string rational_to_string(const Rational& r) {
    std::ostringstream os;
    os << boost::multiprecision::numerator(r);
    if (boost::multiprecision::denominator(r) != 1)
        os << "/" << boost::multiprecision::denominator(r);
    return os.str();
}

Rational rational_from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(BigInt(s));
    return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

Rational rational_from_json(const json& j) {
    if (j.is_string()) return rational_from_string(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number()) return Rational(j.get<double>());
    throw std::invalid_argument("expected a rational number");
}

} // namespace

SparsityGraph graph_from_json(const json& j) {
    SparsityGraph g(j.at("m").get<int>());
    for (const auto& e : j.at("edges")) g.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
    return g;
}

json graph_to_json(const SparsityGraph& g) {
    json edges = json::array();
    for (const auto& [i, j] : g.edges()) edges.push_back({i, j});
    return {{"m", g.vertex_count()}, {"edges", edges}};
}

json polynomial_to_json(const Polynomial& p) {
    json terms = json::array();
    for (const auto& [mi, c] : p.terms()) terms.push_back({mi.exponents(), rational_to_string(c)});
    return terms;
}

Polynomial polynomial_from_json(const json& j, int n) {
    if (j.is_string()) return parse_polynomial(j.get<std::string>(), n);
    Polynomial p(n);
    for (const auto& t : j) {
        std::vector<unsigned> e = t.at(0).get<std::vector<unsigned>>();
        if (static_cast<int>(e.size()) != n)
            throw std::invalid_argument("exponent vector length mismatch");
        p.add_term(MultiIndex(std::move(e)), rational_from_json(t.at(1)));
    }
    return p;
}

Polynomial parse_polynomial(const std::string& text, int n) {
    Polynomial out(n);
    std::size_t pos = 0;
    auto skip = [&] { while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos; };
    auto number = [&]() -> BigInt {
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) throw std::invalid_argument("parse_polynomial: expected a number");
        return BigInt(text.substr(start, pos - start));
    };
    skip();
    bool first = true;
    while (pos < text.size()) {
        Rational sign = 1;
        skip();
        if (text[pos] == '+' || text[pos] == '-') {
            if (text[pos] == '-') sign = -1;
            ++pos;
        } else if (!first) {
            throw std::invalid_argument("parse_polynomial: expected + or - between terms");
        }
        first = false;
        Rational coeff = sign;
        MultiIndex mi(static_cast<std::size_t>(n));
        bool expect_factor = true;
        while (expect_factor) {
            skip();
            if (pos >= text.size()) break;
            if (std::isdigit(static_cast<unsigned char>(text[pos]))) {
                BigInt num = number();
                if (pos < text.size() && text[pos] == '/') {
                    ++pos;
                    coeff *= Rational(num, number());
                } else {
                    coeff *= Rational(num);
                }
            } else if (text[pos] == 'x') {
                ++pos;
                BigInt idx = number();
                if (idx < 1 || idx > n) throw std::invalid_argument("parse_polynomial: variable index out of range");
                unsigned power = 1;
                skip();
                if (pos < text.size() && text[pos] == '^') {
                    ++pos;
                    skip();
                    power = static_cast<unsigned>(number());
                }
                mi[static_cast<std::size_t>(static_cast<int>(idx) - 1)] += power;
            } else {
                throw std::invalid_argument(std::string("parse_polynomial: unexpected character '") +
                                            text[pos] + "'");
            }
            skip();
            if (pos < text.size() && text[pos] == '*') {
                ++pos;
            } else {
                expect_factor = false;
            }
        }
        out.add_term(mi, coeff);
        skip();
    }
    return out;
}

json polymatrix_to_json(const PolyMatrix& P) {
    json entries = json::array();
    for (const auto& [ij, p] : P.entries())
        entries.push_back({{ij.first, ij.second}, polynomial_to_json(p)});
    return {{"m", P.size()}, {"n", P.var_count()}, {"entries", entries}};
}

PolyMatrix polymatrix_from_json(const json& j) {
    int m = j.at("m").get<int>(), n = j.at("n").get<int>();
    PolyMatrix P(m, n);
    for (const auto& e : j.at("entries"))
        P.set_entry(e.at(0).at(0).get<int>(), e.at(0).at(1).get<int>(),
                    polynomial_from_json(e.at(1), n));
    return P;
}

ProblemBundle bundle_from_json(const json& j) {
    ProblemBundle b;
    b.pm.base = polymatrix_from_json(j.at("P0"));
    int n = b.pm.base.var_count();
    if (j.contains("directions"))
        for (const auto& d : j.at("directions")) b.pm.directions.push_back(polymatrix_from_json(d));
    if (j.contains("objective")) {
        auto v = j.at("objective").get<std::vector<double>>();
        b.pm.objective = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    if (j.contains("sigma")) b.sigma = polynomial_from_json(j.at("sigma"), n);
    else b.sigma = Polynomial::constant(n, 1);
    if (j.contains("weights"))
        for (const auto& w : j.at("weights")) b.weights.push_back(polynomial_from_json(w, n));
    if (j.contains("cliques") && !j.at("cliques").is_string()) {
        std::vector<Clique> cs;
        for (const auto& c : j.at("cliques")) cs.push_back({c.get<std::vector<int>>()});
        b.cliques = std::move(cs);
    }
    b.hierarchy = j.value("hierarchy", std::string("dense"));
    b.degree = j.value("degree", 2);
    b.nu = j.value("nu", 1u);
    return b;
}

SosProgram build_from_bundle(const ProblemBundle& b) {
    std::vector<Clique> cliques;
    if (b.cliques) {
        cliques = *b.cliques;
    } else {
        SparsityGraph g = b.pm.base.sparsity_graph();
        for (const auto& D : b.pm.directions)
            for (const auto& e : D.sparsity_graph().edges()) g.add_edge(e.first, e.second);
        auto [ext, peo] = chordal_extension(g);
        cliques = maximal_cliques(ext, peo);
    }
    if (b.hierarchy == "dense") return build_dense(b.pm, b.weights, b.degree);
    if (b.hierarchy == "basic") return build_basic_sparse(b.pm, cliques, b.degree);
    if (b.hierarchy == "weighted") return build_weighted_sparse(b.pm, b.sigma, cliques, b.degree);
    if (b.hierarchy == "even") return build_even_hierarchy(b.pm, b.nu, cliques);
    if (b.hierarchy == "putinar") return build_sparse_putinar(b.pm, b.weights, cliques, b.degree);
    throw std::invalid_argument("unknown hierarchy: " + b.hierarchy);
}

json certificate_to_json(const Certificate& c) {
    json blocks = json::array();
    for (const auto& b : c.blocks) {
        json basis = json::array();
        for (const auto& mi : b.basis.monomials) basis.push_back(mi.exponents());
        json gram = json::array(); // row-major
        for (Eigen::Index i = 0; i < b.gram.rows(); ++i)
            for (Eigen::Index j = 0; j < b.gram.cols(); ++j) gram.push_back(b.gram(i, j));
        json jb = {{"clique", b.clique.vertices},
                   {"weight", polynomial_to_json(b.weight)},
                   {"basis", basis},
                   {"gram", gram}};
        if (b.gram_exact) {
            json ge = json::array();
            for (const auto& row : *b.gram_exact) {
                json jr = json::array();
                for (const auto& v : row) jr.push_back(rational_to_string(v));
                ge.push_back(jr);
            }
            jb["gram_exact"] = ge;
        }
        blocks.push_back(std::move(jb));
    }
    json out = {{"n", c.sigma.var_count()},
                {"sigma", polynomial_to_json(c.sigma)},
                {"blocks", blocks}};
    if (c.lambda.size() > 0) {
        std::vector<double> l(c.lambda.data(), c.lambda.data() + c.lambda.size());
        out["lambda"] = l;
    }
    if (c.lambda_exact) {
        json jl = json::array();
        for (const auto& v : *c.lambda_exact) jl.push_back(rational_to_string(v));
        out["lambda_exact"] = jl;
    }
    return out;
}

Certificate certificate_from_json(const json& j) {
    Certificate c;
    int n = j.at("n").get<int>();
    c.sigma = polynomial_from_json(j.at("sigma"), n);
    for (const auto& jb : j.at("blocks")) {
        CertBlock b;
        b.clique.vertices = jb.at("clique").get<std::vector<int>>();
        b.weight = polynomial_from_json(jb.at("weight"), n);
        b.basis.n = n;
        for (const auto& e : jb.at("basis")) b.basis.monomials.emplace_back(e.get<std::vector<unsigned>>());
        int dim = b.clique.size() * b.basis.size();
        b.gram = Eigen::MatrixXd::Zero(dim, dim);
        const auto& g = jb.at("gram");
        if (static_cast<int>(g.size()) != dim * dim)
            throw std::invalid_argument("certificate gram size mismatch");
        for (int i = 0; i < dim; ++i)
            for (int k = 0; k < dim; ++k) b.gram(i, k) = g.at(static_cast<std::size_t>(i * dim + k)).get<double>();
        if (jb.contains("gram_exact")) {
            RatMatrix Q;
            for (const auto& row : jb.at("gram_exact")) {
                std::vector<Rational> r;
                for (const auto& v : row) r.push_back(rational_from_json(v));
                Q.push_back(std::move(r));
            }
            b.gram_exact = std::move(Q);
        }
        c.blocks.push_back(std::move(b));
    }
    if (j.contains("lambda")) {
        auto l = j.at("lambda").get<std::vector<double>>();
        c.lambda = Eigen::Map<Eigen::VectorXd>(l.data(), static_cast<Eigen::Index>(l.size()));
    }
    if (j.contains("lambda_exact")) {
        std::vector<Rational> l;
        for (const auto& v : j.at("lambda_exact")) l.push_back(rational_from_json(v));
        c.lambda_exact = std::move(l);
    }
    return c;
}

json residual_to_json(const ResidualReport& r) {
    return {{"max_coeff_residual", r.max_coeff_residual},
            {"min_gram_eig", r.min_gram_eig},
            {"pass", r.pass},
            {"worst", r.worst}};
}

} // namespace sosmat
