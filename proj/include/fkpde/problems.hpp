#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fkpde/interp.hpp"
#include "fkpde/problem.hpp"

namespace fkpde {

/// -Laplace(u) = g in the box, u = f on its boundary: b = 0, sigma = sqrt(2) I,
/// k = 0, g = -laplacian, f = exact = u on all of R^d.
DiffusionProblem make_manufactured(std::string name, std::size_t dimension, ScalarField u, ScalarField laplacian,
                                   Box domain = {});

/// Manufactured problem whose solution is the polynomial p.
DiffusionProblem manufactured_from_expansion(std::string name, const PolynomialExpansion& p);

/// d = 5: x1^2 + sin x2 + exp x3 + sin(x4)(x5 + 1).
DiffusionProblem tc1();
/// d = 10, Henon-Heiles potential (a degree-4 polynomial).
DiffusionProblem tc2();
/// d = 20: the tc1 structure on coordinates 1, 12, 5, 15, 8 (one-based).
DiffusionProblem tc3();

struct ProblemInfo {
  std::string name;
  std::size_t dimension = 0;  // 0 when it depends on the argument
  std::string description;
};

std::vector<ProblemInfo> list_problems();

/// "tc1", "tc2", "tc3" or "manufactured:<path to an expansion file>".
DiffusionProblem make_problem(std::string_view name);

}  // namespace fkpde
