#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "varlab/energy.hpp"

namespace varlab::catalog {

// J(x) = x^2 - x^4 on R.
FunctionalOracle doublewell1d();

// J(x) = |x|^2 on R^dim. alpha* = beta* = 1, so the lambda interval is empty.
FunctionalOracle quadratic(std::size_t dim);

// J == 0 on the given space.
FunctionalOracle zero(const SpacePtr& space);

// f(xi) = xi - xi^3, F(xi) = xi^2/2 - xi^4/4.
NonlinearitySpec cubic_nonlinearity();

// J_f for the cubic nonlinearity on H^1_0 with m interior nodes.
FunctionalOracle pde_cubic(std::size_t m);

// Piecewise-linear f through tabulated (xi, f) pairs; F integrates the
// interpolant exactly so F' = f holds everywhere. Linear extrapolation
// outside the table. f does not depend on x.
NonlinearitySpec tabulated_nonlinearity(std::vector<double> xi, std::vector<double> f, std::string label = "tabulated");

// CSV with one "xi,f" pair per line; '#' comments and a non-numeric header
// line are skipped.
NonlinearitySpec load_tabulated_nonlinearity(const std::filesystem::path& csv);

const std::vector<std::string>& oracle_names();

}  // namespace varlab::catalog
