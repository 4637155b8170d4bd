#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "sosmat/sdp.hpp"

using namespace sosmat;

namespace {

// minimize y s.t. [[y,1],[1,y]] >= 0
SdpProblem toy_min() {
    SdpProblem p;
    p.blocks = {2};
    p.F0 = {{0, 0, 1, 1.0}};
    p.F.push_back({{0, 0, 0, 1.0}, {0, 1, 1, 1.0}});
    p.b = Eigen::VectorXd::Constant(1, 1.0);
    return p;
}

// [[0,1],[1,y]] >= 0 has no solution
SdpProblem toy_infeasible() {
    SdpProblem p;
    p.blocks = {2};
    p.F0 = {{0, 0, 1, 1.0}};
    p.F.push_back({{0, 1, 1, 1.0}});
    p.b = Eigen::VectorXd::Zero(1);
    return p;
}

} // namespace

TEST_CASE("toy optimum y* = 1") {
    auto sol = solve(toy_min());
    REQUIRE(sol.status == SdpStatus::Optimal);
    CHECK(sol.y[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.primal_residual <= 1e-7);
    CHECK(sol.dual_residual <= 1e-7);
    CHECK(sol.gap <= 1e-7);
}

TEST_CASE("determinant trap is infeasible") {
    auto sol = solve(toy_infeasible());
    CHECK(sol.status == SdpStatus::PrimalInfeasible);
}

TEST_CASE("free variable equality rows") {
    // minimize y s.t. [[y,1],[1,y]] >= 0 and y = 2 via a free multiplier:
    // equality row G^T y = f0 with G = 1, f0 = 2 forces y = 2.
    SdpProblem p = toy_min();
    p.free_vars = 1;
    p.f0 = Eigen::VectorXd::Constant(1, 2.0);
    p.G = Eigen::MatrixXd::Constant(1, 1, 1.0);
    auto sol = solve(p);
    REQUIRE(sol.status == SdpStatus::Optimal);
    CHECK(sol.y[0] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("LP blocks") {
    // minimize y s.t. y - 1 >= 0, 3 - y >= 0 (diagonal block)
    SdpProblem p;
    p.blocks = {-2};
    p.F0 = {{0, 0, 0, -1.0}, {0, 1, 1, 3.0}};
    p.F.push_back({{0, 0, 0, 1.0}, {0, 1, 1, -1.0}});
    p.b = Eigen::VectorXd::Constant(1, 1.0);
    auto sol = solve(p);
    REQUIRE(sol.status == SdpStatus::Optimal);
    CHECK(sol.y[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("objective scaling leaves the argmin") {
    auto p = toy_min();
    auto s1 = solve(p);
    p.b *= 7.0;
    auto s2 = solve(p);
    REQUIRE(s1.status == SdpStatus::Optimal);
    REQUIRE(s2.status == SdpStatus::Optimal);
    CHECK(s2.objective == doctest::Approx(7.0 * s1.objective).epsilon(1e-6));
    CHECK(std::abs(s1.y[0] - s2.y[0]) <= 1e-6);
}

TEST_CASE("deterministic runs") {
    auto a = solve(toy_min());
    auto b = solve(toy_min());
    CHECK(a.y == b.y);
    CHECK(a.iterations == b.iterations);
    CHECK(a.objective == b.objective);
}

TEST_CASE("infeasibility certificate is checkable") {
    auto p = toy_infeasible();
    auto sol = solve(p);
    REQUIRE(sol.status == SdpStatus::PrimalInfeasible);
    CHECK(verify_infeasibility_certificate(p, sol) <= 1e-6);
}

namespace {

SdpProblem random_problem(std::mt19937& rng) {
    std::uniform_int_distribution<int> nb(1, 3), bs(1, 3), ell_d(1, 4);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    SdpProblem p;
    int blocks = nb(rng);
    for (int i = 0; i < blocks; ++i) {
        int s = bs(rng);
        p.blocks.push_back(rng() % 3 == 0 ? -s : s);
    }
    int ell = ell_d(rng);
    p.b = Eigen::VectorXd::Zero(ell);
    for (int i = 0; i < ell; ++i) p.b[i] = val(rng);
    auto fill = [&](std::vector<SdpProblem::Triplet>& F) {
        for (std::size_t k = 0; k < p.blocks.size(); ++k) {
            int s = std::abs(p.blocks[k]);
            for (int r = 0; r < s; ++r)
                for (int c = r; c < s; ++c) {
                    if (p.blocks[k] < 0 && r != c) continue;
                    if (rng() % 2 == 0) F.push_back({static_cast<int>(k), r, c, val(rng)});
                }
        }
    };
    fill(p.F0);
    p.F.resize(static_cast<std::size_t>(ell));
    for (auto& F : p.F) fill(F);
    return p;
}

} // namespace

TEST_CASE("SDPA export/parse round-trip on 50 random problems") {
    std::mt19937 rng(20240817);
    for (int trial = 0; trial < 50; ++trial) {
        SdpProblem p = random_problem(rng);
        SdpProblem q = parse_sdpa(export_sdpa(p));
        REQUIRE(q.blocks == p.blocks);
        REQUIRE(q.var_count() == p.var_count());
        CHECK((q.b - p.b).cwiseAbs().maxCoeff() == 0.0);
        auto flat = [](const std::vector<SdpProblem::Triplet>& F) {
            std::ostringstream os;
            for (const auto& t : F) os << t.block << ":" << t.row << "," << t.col << "=" << t.value << ";";
            return os.str();
        };
        CHECK(flat(q.F0) == flat(p.F0));
        for (int i = 0; i < p.var_count(); ++i)
            CHECK(flat(q.F[static_cast<std::size_t>(i)]) == flat(p.F[static_cast<std::size_t>(i)]));
    }
}

TEST_CASE("SDPA reader tolerates comments") {
    std::string text = "* header comment\n\" quoted comment\n1\n1\n2\n1.0\n0 1 1 2 1.0\n1 1 1 1 1.0\n1 1 2 2 1.0\n";
    SdpProblem p = parse_sdpa(text);
    CHECK(p.var_count() == 1);
    REQUIRE(p.blocks.size() == 1);
    CHECK(p.blocks[0] == 2);
    auto sol = solve(p);
    CHECK(sol.status == SdpStatus::Optimal);
}
