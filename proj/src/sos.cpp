#include "sosmat/sos.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace sosmat {

namespace {

void enumerate_rec(int n, int var, unsigned left, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (var == n) {
        out.push_back(cur);
        return;
    }
    for (unsigned e = 0; e <= left; ++e) {
        cur[static_cast<std::size_t>(var)] = e;
        enumerate_rec(n, var + 1, left - e, cur, out);
    }
    cur[static_cast<std::size_t>(var)] = 0;
}

} // namespace

MonomialBasis monomial_basis(int n, int d) {
    if (n < 1 || d < 0) throw std::invalid_argument("monomial_basis: bad arguments");
    MonomialBasis b;
    b.n = n;
    MultiIndex cur(static_cast<std::size_t>(n));
    enumerate_rec(n, 0, static_cast<unsigned>(d), cur, b.monomials);
    std::sort(b.monomials.begin(), b.monomials.end(), GradedLexLess{});
    return b;
}

MonomialBasis homogeneous_basis(int n, int d) {
    MonomialBasis full = monomial_basis(n, d);
    MonomialBasis b;
    b.n = n;
    for (const auto& mi : full.monomials)
        if (mi.degree() == static_cast<unsigned>(d)) b.monomials.push_back(mi);
    return b;
}

PolyMatrix ParamPolyMatrix::at(const Eigen::VectorXd& lambda) const {
    PolyMatrix out = base;
    for (std::size_t i = 0; i < directions.size(); ++i)
        out = out + Rational(lambda[static_cast<Eigen::Index>(i)]) * directions[i];
    return out;
}

namespace {

template <typename Scalar, typename Access>
PolyMatrix gram_realize(int dim, Access G, const GramBlockSpec& spec, int m) {
    int r = spec.rows(), B = spec.basis.size();
    if (dim != r * B) throw std::invalid_argument("gram_to_polymatrix: size mismatch");
    int n = spec.basis.n;
    PolyMatrix out(m, n);
    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j) {
            Polynomial s(n);
            for (int a = 0; a < B; ++a)
                for (int b = 0; b < B; ++b) {
                    Rational v = G(i * B + a, j * B + b);
                    if (v != 0)
                        s.add_term(spec.basis.monomials[static_cast<std::size_t>(a)] +
                                       spec.basis.monomials[static_cast<std::size_t>(b)],
                                   v);
                }
            s = spec.weight * s;
            if (!s.is_zero())
                out.add_to_entry(spec.clique.vertices[static_cast<std::size_t>(i)],
                                 spec.clique.vertices[static_cast<std::size_t>(j)], s);
        }
    return out;
}

} // namespace

PolyMatrix gram_to_polymatrix(const Eigen::MatrixXd& G, const GramBlockSpec& spec, int m) {
    return gram_realize<double>(static_cast<int>(G.rows()),
                                [&](int i, int j) { return Rational(G(i, j)); }, spec, m);
}

PolyMatrix gram_to_polymatrix_exact(const RatMatrix& G, const GramBlockSpec& spec, int m) {
    return gram_realize<Rational>(static_cast<int>(G.size()),
                                  [&](int i, int j) {
                                      return G[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                                  },
                                  spec, m);
}

namespace {

struct TargetInfo {
    bool homogeneous = false;
    unsigned homog_degree = 0;
    bool even = false;
    unsigned max_degree = 0;
};

TargetInfo target_info(const PolyMatrix& T0, const std::vector<PolyMatrix>& TL) {
    TargetInfo info;
    info.homogeneous = true;
    info.even = true;
    bool seen = false;
    auto absorb = [&](const PolyMatrix& T) {
        if (T.is_zero()) return;
        auto f = T.structure_flags();
        info.max_degree = std::max(info.max_degree, T.degree());
        if (!f.even) info.even = false;
        if (!f.homogeneous || (seen && f.degree != info.homog_degree)) info.homogeneous = false;
        if (f.homogeneous && !seen) info.homog_degree = f.degree;
        seen = true;
    };
    absorb(T0);
    for (const auto& T : TL) absorb(T);
    return info;
}

// basis for an SOS block of half-degree `d`, restricted to a single homogeneous
// degree when the whole identity is homogeneous with weight-free blocks
MonomialBasis choose_basis(int n, int d, bool allow_homog, const TargetInfo& info) {
    if (allow_homog && info.homogeneous && info.homog_degree % 2 == 0 &&
        info.homog_degree / 2 <= static_cast<unsigned>(d))
        return homogeneous_basis(n, static_cast<int>(info.homog_degree / 2));
    return monomial_basis(n, d);
}

void check_cover(const ParamPolyMatrix& P, const std::vector<Clique>& cliques) {
    SparsityGraph g(P.size());
    for (const auto& c : cliques)
        for (std::size_t a = 0; a < c.vertices.size(); ++a)
            for (std::size_t b = a + 1; b < c.vertices.size(); ++b)
                g.add_edge(c.vertices[a], c.vertices[b]);
    auto check = [&](const PolyMatrix& M) {
        for (const auto& [ij, p] : M.entries())
            if (ij.first != ij.second && !g.has_edge(ij.first, ij.second))
                throw std::invalid_argument("cliques do not cover the matrix sparsity");
    };
    check(P.base);
    for (const auto& D : P.directions) check(D);
}

std::string entry_label(int i, int j, const MultiIndex& alpha) {
    std::ostringstream os;
    os << "(" << i << "," << j << ") @ [";
    for (std::size_t k = 0; k < alpha.size(); ++k) os << (k ? "," : "") << alpha[k];
    os << "]";
    return os.str();
}

SosProgram assemble(const ParamPolyMatrix& P, const Polynomial& sigma,
                    std::vector<GramBlockSpec> specs) {
    SosProgram prog;
    prog.sigma = sigma;
    prog.ambient = P.size();
    prog.params = P.param_count();
    prog.objective = P.objective.size() ? P.objective : Eigen::VectorXd::Zero(prog.params);
    if (prog.objective.size() != prog.params)
        throw std::invalid_argument("objective length does not match direction count");

    PolyMatrix T0 = sigma * P.base;
    std::vector<PolyMatrix> TL;
    for (const auto& D : P.directions) TL.push_back(sigma * D);
    TargetInfo info = target_info(T0, TL);
    bool weights_even = true;
    for (const auto& s : specs)
        if (!s.weight.is_even()) weights_even = false;
    bool parity = info.even && weights_even;

    prog.gram_blocks = std::move(specs);

    struct KeyLess {
        bool operator()(const std::tuple<int, int, MultiIndex>& a,
                        const std::tuple<int, int, MultiIndex>& b) const {
            if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
            if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
            return GradedLexLess{}(std::get<2>(a), std::get<2>(b));
        }
    };
    using Key = std::tuple<int, int, MultiIndex>;

    // diagonal-consistency reduction: a target coefficient that is zero, does
    // not depend on lambda, and can only be produced by same-sign diagonal Gram
    // entries forces those entries (hence their rows and columns) to zero.
    // Iterating this to a fixpoint prunes basis monomials that no feasible Gram
    // can use; it also exposes infeasibility hidden behind weakly feasible
    // high-degree relaxations.
    std::vector<std::vector<char>> dead(prog.gram_blocks.size());
    {
        std::set<Key, KeyLess> pinned;
        for (const auto& [ij, p] : T0.entries())
            for (const auto& [mi, c] : p.terms())
                if (c != 0) pinned.insert({ij.first, ij.second, mi});
        for (const auto& T : TL)
            for (const auto& [ij, p] : T.entries())
                for (const auto& [mi, c] : p.terms())
                    if (c != 0) pinned.insert({ij.first, ij.second, mi});

        std::map<Key, std::map<std::tuple<int, int, int>, Rational>, KeyLess> contrib;
        for (std::size_t s = 0; s < prog.gram_blocks.size(); ++s) {
            const auto& spec = prog.gram_blocks[s];
            int r = spec.rows(), B = spec.basis.size();
            dead[s].assign(static_cast<std::size_t>(r * B), 0);
            for (int p = 0; p < r * B; ++p) {
                int i = p / B, a = p % B;
                int I = spec.clique.vertices[static_cast<std::size_t>(i)];
                for (int q = p; q < r * B; ++q) {
                    int j = q / B, b = q % B;
                    int J = spec.clique.vertices[static_cast<std::size_t>(j)];
                    MultiIndex ab = spec.basis.monomials[static_cast<std::size_t>(a)] +
                                    spec.basis.monomials[static_cast<std::size_t>(b)];
                    for (const auto& [wm, wc] : spec.weight.terms()) {
                        Key key{std::min(I, J), std::max(I, J), ab + wm};
                        if (pinned.count(key)) continue;
                        contrib[key][{static_cast<int>(s), p, q}] += wc;
                    }
                }
            }
        }

        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& [key, ents] : contrib) {
                bool diag_only = true;
                int sign = 0;
                std::vector<std::pair<int, int>> hits;
                for (const auto& [pos, v] : ents) {
                    auto [s, p, q] = pos;
                    if (v == 0 || dead[static_cast<std::size_t>(s)][static_cast<std::size_t>(p)] ||
                        dead[static_cast<std::size_t>(s)][static_cast<std::size_t>(q)])
                        continue;
                    int sg = v > 0 ? 1 : -1;
                    if (p != q || (sign != 0 && sg != sign)) {
                        diag_only = false;
                        break;
                    }
                    sign = sg;
                    hits.push_back({s, p});
                }
                if (!diag_only || hits.empty()) continue;
                for (auto [s, p] : hits)
                    dead[static_cast<std::size_t>(s)][static_cast<std::size_t>(p)] = 1;
                changed = true;
            }
        }
    }

    for (std::size_t si = 0; si < prog.gram_blocks.size(); ++si) {
        const auto& spec = prog.gram_blocks[si];
        int r = spec.rows(), B = spec.basis.size();
        std::vector<std::vector<int>> classes;
        if (parity) {
            std::map<std::vector<unsigned>, std::vector<int>> groups;
            for (int a = 0; a < B; ++a) {
                std::vector<unsigned> par;
                for (unsigned e : spec.basis.monomials[static_cast<std::size_t>(a)].exponents())
                    par.push_back(e % 2);
                groups[par].push_back(a);
            }
            for (auto& [par, idx] : groups) classes.push_back(std::move(idx));
        } else {
            std::vector<int> all(static_cast<std::size_t>(B));
            for (int a = 0; a < B; ++a) all[static_cast<std::size_t>(a)] = a;
            classes.push_back(std::move(all));
        }
        std::vector<int> blk_ids;
        std::vector<std::vector<int>> mems;
        for (auto& cls : classes) {
            std::vector<int> mem;
            for (int i = 0; i < r; ++i)
                for (int a : cls)
                    if (!dead[si][static_cast<std::size_t>(i * B + a)]) mem.push_back(i * B + a);
            blk_ids.push_back(static_cast<int>(prog.sdp.blocks.size()));
            prog.sdp.blocks.push_back(static_cast<int>(mem.size()));
            mems.push_back(std::move(mem));
        }
        prog.sdp_blocks.push_back(std::move(blk_ids));
        prog.members.push_back(std::move(mems));
    }

    // one scalar constraint per (entry, monomial) pair on either side
    struct Row {
        std::map<std::tuple<int, int, int>, Rational> F; // (block, p<=q) -> value
        Rational c0;
        std::map<int, Rational> dirs;
    };
    std::map<Key, Row, KeyLess> rows;

    for (const auto& [ij, p] : T0.entries())
        for (const auto& [mi, c] : p.terms()) rows[{ij.first, ij.second, mi}].c0 = c;
    for (std::size_t l = 0; l < TL.size(); ++l)
        for (const auto& [ij, p] : TL[l].entries())
            for (const auto& [mi, c] : p.terms())
                rows[{ij.first, ij.second, mi}].dirs[static_cast<int>(l)] = c;

    for (std::size_t s = 0; s < prog.gram_blocks.size(); ++s) {
        const auto& spec = prog.gram_blocks[s];
        int B = spec.basis.size();
        for (std::size_t c = 0; c < prog.members[s].size(); ++c) {
            int blk = prog.sdp_blocks[s][c];
            const auto& mem = prog.members[s][c];
            int sz = static_cast<int>(mem.size());
            for (int p = 0; p < sz; ++p) {
                int i = mem[static_cast<std::size_t>(p)] / B, a = mem[static_cast<std::size_t>(p)] % B;
                int I = spec.clique.vertices[static_cast<std::size_t>(i)];
                for (int q = 0; q < sz; ++q) {
                    int j = mem[static_cast<std::size_t>(q)] / B,
                        b = mem[static_cast<std::size_t>(q)] % B;
                    int J = spec.clique.vertices[static_cast<std::size_t>(j)];
                    if (I > J) continue;
                    MultiIndex ab = spec.basis.monomials[static_cast<std::size_t>(a)] +
                                    spec.basis.monomials[static_cast<std::size_t>(b)];
                    for (const auto& [wm, wc] : spec.weight.terms()) {
                        auto& val = rows[{I, J, ab + wm}].F[{blk, std::min(p, q), std::max(p, q)}];
                        val += p == q ? wc : wc / 2;
                    }
                }
            }
        }
    }

    int ell = static_cast<int>(rows.size());
    prog.sdp.free_vars = prog.params;
    prog.sdp.b = Eigen::VectorXd::Zero(ell);
    prog.sdp.f0 = prog.objective;
    prog.sdp.G = Eigen::MatrixXd::Zero(ell, prog.params);
    prog.sdp.F.resize(static_cast<std::size_t>(ell));

    int t = 0;
    for (auto& [key, row] : rows) {
        if (row.F.empty() && row.dirs.empty() && row.c0 != 0 && !prog.structurally_infeasible) {
            prog.structurally_infeasible = true;
            prog.infeasibility_note =
                "no Gram term can produce entry " +
                entry_label(std::get<0>(key), std::get<1>(key), std::get<2>(key));
        }
        // common-denominator scaling keeps the float problem well-conditioned
        BigInt den = 1, num = 0;
        auto absorb = [&](const Rational& v) {
            if (v == 0) return;
            den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(v));
            num = boost::multiprecision::gcd(num, boost::multiprecision::numerator(v));
        };
        for (const auto& [pos, v] : row.F) absorb(v);
        absorb(row.c0);
        for (const auto& [l, v] : row.dirs) absorb(v);
        Rational factor = num == 0 ? Rational(1) : Rational(den, boost::multiprecision::abs(num));

        for (const auto& [pos, v] : row.F)
            prog.sdp.F[static_cast<std::size_t>(t)].push_back(
                {std::get<0>(pos), std::get<1>(pos), std::get<2>(pos), to_double(v * factor)});
        prog.sdp.b[t] = to_double(row.c0 * factor);
        for (const auto& [l, v] : row.dirs) prog.sdp.G(t, l) = to_double(v * factor);
        ++t;
    }
    return prog;
}

unsigned even_ceil(unsigned x) { return x + (x % 2); }

} // namespace

SosProgram build_basic_sparse(const ParamPolyMatrix& P, const std::vector<Clique>& cliques, int d) {
    if (d < 0) throw std::invalid_argument("build_basic_sparse: negative degree");
    check_cover(P, cliques);
    int n = P.var_count();
    Polynomial one = Polynomial::constant(n, 1);
    TargetInfo info = target_info(P.base, P.directions);
    std::vector<GramBlockSpec> specs;
    for (const auto& c : cliques) specs.push_back({c, one, choose_basis(n, d, true, info)});
    return assemble(P, one, specs);
}

SosProgram build_weighted_sparse(const ParamPolyMatrix& P, const Polynomial& sigma,
                                 const std::vector<Clique>& cliques, int d) {
    if (d < 0) throw std::invalid_argument("build_weighted_sparse: negative degree");
    check_cover(P, cliques);
    int n = P.var_count();
    Polynomial one = Polynomial::constant(n, 1);
    PolyMatrix T0 = sigma * P.base;
    std::vector<PolyMatrix> TL;
    for (const auto& D : P.directions) TL.push_back(sigma * D);
    TargetInfo info = target_info(T0, TL);
    std::vector<GramBlockSpec> specs;
    for (const auto& c : cliques) specs.push_back({c, one, choose_basis(n, d, true, info)});
    return assemble(P, sigma, specs);
}

SosProgram build_even_hierarchy(const ParamPolyMatrix& P, unsigned nu,
                                const std::vector<Clique>& cliques) {
    auto fb = P.base.structure_flags();
    if (!fb.even || !fb.homogeneous)
        throw std::invalid_argument("build_even_hierarchy: base must be even and homogeneous");
    unsigned deg = P.base.is_zero() ? 0 : P.base.degree();
    for (const auto& D : P.directions) {
        auto f = D.structure_flags();
        if (!f.even || !f.homogeneous)
            throw std::invalid_argument("build_even_hierarchy: directions must be even and homogeneous");
        deg = std::max(deg, D.degree());
    }
    int n = P.var_count();
    Polynomial sq(n);
    for (int i = 0; i < n; ++i) sq += Polynomial::variable(n, i, 2);
    unsigned dnu = even_ceil(2 * nu + deg);
    return build_weighted_sparse(P, sq.pow(nu), cliques, static_cast<int>(dnu / 2));
}

SosProgram build_even_hierarchy(const ParamPolyMatrix& P, unsigned nu) {
    SparsityGraph g = P.base.sparsity_graph();
    for (const auto& D : P.directions) {
        SparsityGraph gd = D.sparsity_graph();
        for (const auto& e : gd.edges()) g.add_edge(e.first, e.second);
    }
    auto [ext, peo] = chordal_extension(g);
    return build_even_hierarchy(P, nu, maximal_cliques(ext, peo));
}

SosProgram build_sparse_putinar(const ParamPolyMatrix& P, const std::vector<Polynomial>& weights,
                                const std::vector<Clique>& cliques, int d) {
    if (d < 0) throw std::invalid_argument("build_sparse_putinar: negative degree");
    check_cover(P, cliques);
    int n = P.var_count();
    Polynomial one = Polynomial::constant(n, 1);
    TargetInfo info = target_info(P.base, P.directions);
    unsigned D = std::max(static_cast<unsigned>(d), even_ceil(info.max_degree));
    bool allow_homog = weights.empty();
    std::vector<GramBlockSpec> specs;
    for (const auto& c : cliques) {
        specs.push_back({c, one, choose_basis(n, static_cast<int>(D / 2), allow_homog, info)});
        for (const auto& g : weights) {
            unsigned gd = g.degree();
            if (gd > D) continue; // this weight exceeds the matching budget
            specs.push_back({c, g, monomial_basis(n, static_cast<int>((D - gd) / 2))});
        }
    }
    if (specs.empty()) throw std::invalid_argument("build_sparse_putinar: degree budget too small");
    return assemble(P, one, specs);
}

SosProgram build_dense(const ParamPolyMatrix& P, const std::vector<Polynomial>& weights, int d) {
    Clique full;
    for (int i = 1; i <= P.size(); ++i) full.vertices.push_back(i);
    return build_sparse_putinar(P, weights, {full}, d);
}

Eigen::MatrixXd recover_gram(const SosProgram& prog, const SdpSolution& sol, int spec_index) {
    const auto& spec = prog.gram_blocks[static_cast<std::size_t>(spec_index)];
    int dim = spec.block_size();
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(dim, dim);
    const auto& blks = prog.sdp_blocks[static_cast<std::size_t>(spec_index)];
    const auto& mems = prog.members[static_cast<std::size_t>(spec_index)];
    for (std::size_t c = 0; c < blks.size(); ++c) {
        const Eigen::MatrixXd& X = sol.dual_blocks[static_cast<std::size_t>(blks[c])];
        const auto& mem = mems[c];
        for (std::size_t p = 0; p < mem.size(); ++p)
            for (std::size_t q = 0; q < mem.size(); ++q)
                Q(mem[p], mem[q]) = X(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
    }
    return Q;
}

} // namespace sosmat
