#pragma once

#include <vector>

#include "nmv/empirical_law.hpp"

namespace nmv {

/// Exact minimum-cost assignment value for a square cost matrix
/// (Kuhn-Munkres with potentials, O(n^3)).
double assignment_cost(const std::vector<std::vector<double>>& cost);

/// Exact Wasserstein-2 distance between two uniform empirical laws with the
/// same atom count, ground cost ||xi - eta||_inf.  Laws larger than
/// `max_atoms` are rejected: the artifact only needs W2 at desk scale and
/// exactness is the point.
double wasserstein2(const EmpiricalLaw& a, const EmpiricalLaw& b, long max_atoms = 64);

}  // namespace nmv
