#include "varlab/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <sstream>

#include "varlab/errors.hpp"

namespace varlab::catalog {

FunctionalOracle doublewell1d() {
  FunctionalOracle J;
  J.label = "doublewell1d";
  J.space = Space::euclidean(1);
  J.parity = Parity::even;
  J.value = [](const Vector& x) {
    const double s = x[0] * x[0];
    return s - s * s;
  };
  J.grad = [space = J.space](const Vector& x) {
    space->check(x);
    Vector g = space->zero();
    g[0] = 2.0 * x[0] - 4.0 * x[0] * x[0] * x[0];
    return g;
  };
  return J;
}

FunctionalOracle quadratic(std::size_t dim) {
  FunctionalOracle J;
  J.label = "quadratic";
  J.space = Space::euclidean(dim);
  J.parity = Parity::even;
  J.value = [space = J.space](const Vector& x) { return space->norm_squared(x); };
  J.grad = [](const Vector& x) { return 2.0 * Vector(x); };
  return J;
}

FunctionalOracle zero(const SpacePtr& space) {
  FunctionalOracle J;
  J.label = "zero";
  J.space = space;
  J.parity = Parity::even;
  J.value = [space](const Vector& x) {
    space->check(x);
    return 0.0;
  };
  J.grad = [space](const Vector& x) {
    space->check(x);
    return space->zero();
  };
  return J;
}

NonlinearitySpec cubic_nonlinearity() {
  NonlinearitySpec spec;
  spec.label = "pde-cubic";
  spec.f = [](double, double xi) { return xi - xi * xi * xi; };
  spec.F = [](double, double xi) {
    const double s = xi * xi;
    return 0.5 * s - 0.25 * s * s;
  };
  spec.growth_exponent = 3.0;
  spec.is_cubic = true;
  return spec;
}

FunctionalOracle pde_cubic(std::size_t m) {
  return pde_functional(cubic_nonlinearity(), Space::dirichlet_h10(Grid1D(m)));
}

namespace {

struct Table {
  std::vector<double> xi;
  std::vector<double> f;
  std::vector<double> F;  // F at the knots, F(0) = 0

  std::size_t segment(double x) const {
    const auto it = std::upper_bound(xi.begin(), xi.end(), x);
    const std::size_t k = it == xi.begin() ? 0 : static_cast<std::size_t>(it - xi.begin()) - 1;
    return std::min(k, xi.size() - 2);
  }
  double slope(std::size_t k) const { return (f[k + 1] - f[k]) / (xi[k + 1] - xi[k]); }
  double f_at(double x) const {
    const std::size_t k = segment(x);
    return f[k] + slope(k) * (x - xi[k]);
  }
  // Exact integral of the linear piece from the knot xi[k] to x.
  double F_at(double x) const {
    const std::size_t k = segment(x);
    const double d = x - xi[k];
    return F[k] + d * (f[k] + 0.5 * slope(k) * d);
  }
};

}  // namespace

NonlinearitySpec tabulated_nonlinearity(std::vector<double> xi, std::vector<double> f, std::string label) {
  require(xi.size() == f.size() && xi.size() >= 2, "tabulated nonlinearity needs at least two (xi, f) pairs");
  for (std::size_t i = 1; i < xi.size(); ++i) {
    require(xi[i] > xi[i - 1], "tabulated xi values must be strictly increasing");
  }
  auto table = std::make_shared<Table>();
  table->xi = std::move(xi);
  table->f = std::move(f);
  table->F.assign(table->xi.size(), 0.0);
  // Trapezoid accumulation, anchored so that F(0) = 0.
  for (std::size_t k = 1; k < table->xi.size(); ++k) {
    table->F[k] = table->F[k - 1] + 0.5 * (table->f[k] + table->f[k - 1]) * (table->xi[k] - table->xi[k - 1]);
  }
  const double offset = table->F_at(0.0);
  for (double& v : table->F) v -= offset;

  NonlinearitySpec spec;
  spec.label = std::move(label);
  spec.f = [table](double, double x) { return table->f_at(x); };
  spec.F = [table](double, double x) { return table->F_at(x); };
  spec.growth_exponent = 1.0;
  return spec;
}

NonlinearitySpec load_tabulated_nonlinearity(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) fail(ErrorCode::parse, "cannot open nonlinearity table " + csv.string());
  std::vector<double> xi;
  std::vector<double> f;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double a = 0.0;
    double b = 0.0;
    if (!(fields >> a >> b)) {
      if (xi.empty() && line_no == 1) continue;  // header
      fail(ErrorCode::parse, csv.string() + ":" + std::to_string(line_no) + ": expected 'xi,f'");
    }
    xi.push_back(a);
    f.push_back(b);
  }
  return tabulated_nonlinearity(std::move(xi), std::move(f), "pde-tabulated");
}

const std::vector<std::string>& oracle_names() {
  static const std::vector<std::string> names{"doublewell1d", "pde-cubic", "quadratic", "pde-tabulated"};
  return names;
}

}  // namespace varlab::catalog
