#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "sosmat/certificate.hpp"
#include "sosmat/examples.hpp"
#include "sosmat/sos.hpp"

namespace sosmat {

using nlohmann::json;

// graphs: {"m": 3, "edges": [[1,2],[2,3]]}
SparsityGraph graph_from_json(const json& j);
json graph_to_json(const SparsityGraph& g);

// polynomials as term lists [[[e1,...,en], "num/den"], ...]
json polynomial_to_json(const Polynomial& p);
Polynomial polynomial_from_json(const json& j, int n);

/// Plain-text expressions such as "x1^2*x2 - 3*x2" (sums of monomial products).
Polynomial parse_polynomial(const std::string& text, int n);

// matrices: {"m":…, "n":…, "entries": [[[i,j], <terms>], ...]}
json polymatrix_to_json(const PolyMatrix& P);
PolyMatrix polymatrix_from_json(const json& j);

struct ProblemBundle {
    ParamPolyMatrix pm;
    Polynomial sigma;                         // for the weighted hierarchy
    std::vector<Polynomial> weights;          // g_j for putinar
    std::optional<std::vector<Clique>> cliques; // nullopt = "auto"
    std::string hierarchy;                    // dense|basic|weighted|even|putinar
    int degree = 2;
    unsigned nu = 1;
};

ProblemBundle bundle_from_json(const json& j);
SosProgram build_from_bundle(const ProblemBundle& b);

json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const json& j);
json residual_to_json(const ResidualReport& r);

} // namespace sosmat
