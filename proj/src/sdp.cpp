#include "sosmat/sdp.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace sosmat {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

// SDPA sparse convention: min c^T x s.t. X = sum_i x_i F_i - F0 >= 0, so our
// constant term is written negated. Free equality rows G^T y = f0 become a
// trailing diagonal block with paired +/- inequality entries.
std::string export_sdpa(const SdpProblem& p) {
    int ell = p.var_count();
    int nblocks = static_cast<int>(p.blocks.size()) + (p.free_vars > 0 ? 1 : 0);
    std::ostringstream os;
    os << "* generated by sosmat\n";
    os << ell << " = mDIM\n";
    os << nblocks << " = nBLOCK\n";
    for (std::size_t k = 0; k < p.blocks.size(); ++k) os << (k ? " " : "") << p.blocks[k];
    if (p.free_vars > 0) os << (p.blocks.empty() ? "" : " ") << -(2 * p.free_vars);
    os << " = bLOCKsTRUCT\n";
    for (int i = 0; i < ell; ++i) os << (i ? " " : "") << fmt(p.b.size() ? p.b[i] : 0.0);
    os << "\n";

    auto emit = [&](int mat, int blk, int r, int c, double v) {
        if (v == 0.0) return;
        os << mat << " " << blk + 1 << " " << r + 1 << " " << c + 1 << " " << fmt(v) << "\n";
    };
    int fb = static_cast<int>(p.blocks.size()); // free-variable block index
    for (const auto& t : p.F0) emit(0, t.block, t.row, t.col, -t.value);
    for (int j = 0; j < p.free_vars; ++j) {
        emit(0, fb, 2 * j, 2 * j, p.f0[j]);
        emit(0, fb, 2 * j + 1, 2 * j + 1, -p.f0[j]);
    }
    for (int i = 0; i < ell; ++i) {
        for (const auto& t : p.F[static_cast<std::size_t>(i)]) emit(i + 1, t.block, t.row, t.col, t.value);
        for (int j = 0; j < p.free_vars; ++j) {
            emit(i + 1, fb, 2 * j, 2 * j, p.G(i, j));
            emit(i + 1, fb, 2 * j + 1, 2 * j + 1, -p.G(i, j));
        }
    }
    return os.str();
}

SdpProblem parse_sdpa(const std::string& text) {
    // strip comments, treat SDPA punctuation as whitespace
    std::vector<double> tokens;
    std::istringstream lines(text);
    std::string line;
    std::string cleaned;
    while (std::getline(lines, line)) {
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        if (line[start] == '*' || line[start] == '"') continue;
        if (std::size_t eq = line.find('='); eq != std::string::npos) line.resize(eq);
        for (char& ch : line)
            if (ch == ',' || ch == '(' || ch == ')' || ch == '{' || ch == '}') ch = ' ';
        cleaned += line;
        cleaned += ' ';
    }
    std::istringstream in(cleaned);
    double v;
    while (in >> v) tokens.push_back(v);

    std::size_t pos = 0;
    auto next = [&]() {
        if (pos >= tokens.size()) throw std::invalid_argument("parse_sdpa: truncated input");
        return tokens[pos++];
    };
    int ell = static_cast<int>(next());
    int nblocks = static_cast<int>(next());
    SdpProblem p;
    for (int k = 0; k < nblocks; ++k) {
        int bs = static_cast<int>(next());
        if (bs == 0) throw std::invalid_argument("parse_sdpa: zero block size");
        if (bs == 1) bs = 1; // 1x1 blocks stay PSD unless written negative
        p.blocks.push_back(bs);
    }
    p.b = Eigen::VectorXd(ell);
    for (int i = 0; i < ell; ++i) p.b[i] = next();
    p.F.resize(static_cast<std::size_t>(ell));

    while (pos + 5 <= tokens.size()) {
        int mat = static_cast<int>(next());
        int blk = static_cast<int>(next()) - 1;
        int r = static_cast<int>(next()) - 1;
        int c = static_cast<int>(next()) - 1;
        double val = next();
        if (blk < 0 || blk >= nblocks || mat < 0 || mat > ell)
            throw std::invalid_argument("parse_sdpa: entry out of range");
        SdpProblem::Triplet t{blk, std::min(r, c), std::max(r, c), mat == 0 ? -val : val};
        if (mat == 0)
            p.F0.push_back(t);
        else
            p.F[static_cast<std::size_t>(mat - 1)].push_back(t);
    }
    if (pos != tokens.size()) throw std::invalid_argument("parse_sdpa: trailing tokens");
    return p;
}

} // namespace sosmat
