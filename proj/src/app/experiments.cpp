#include "varlab/app/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>

#include "varlab/catalog.hpp"
#include "varlab/convex.hpp"
#include "varlab/decomposable.hpp"
#include "varlab/errors.hpp"
#include "varlab/minimax.hpp"
#include "varlab/solve.hpp"
#include "varlab/ysearch.hpp"

namespace varlab::app {

using nlohmann::json;

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"constants",     "three-solutions", "pde-demo",
                                              "minimax-audit", "decomposable",    "sweep"};
  return names;
}

namespace {

// ---- configuration helpers ----

struct OracleSetup {
  FunctionalOracle J;
  std::optional<Grid1D> grid;
};

OracleSetup make_oracle(const Config& c, const std::string& fallback) {
  const std::string name = c.get_string("oracle", fallback);
  if (name == "doublewell1d") return {catalog::doublewell1d(), std::nullopt};
  if (name == "quadratic") {
    const std::size_t dim = c.get_size("dim", 1);
    if (dim == 0) fail(ErrorCode::parse, "dim must be positive");
    return {catalog::quadratic(dim), std::nullopt};
  }
  if (name == "pde-cubic" || name == "pde-tabulated") {
    const std::size_t m = c.get_size("grid_m", 63);
    if (m < 2) fail(ErrorCode::parse, "grid_m must be at least 2");
    const Grid1D grid(m);
    if (name == "pde-cubic") return {catalog::pde_cubic(m), grid};
    if (!c.has("nonlinearity_csv")) fail(ErrorCode::parse, "oracle pde-tabulated needs nonlinearity_csv");
    const NonlinearitySpec spec = catalog::load_tabulated_nonlinearity(c.get_path("nonlinearity_csv"));
    return {pde_functional(spec, Space::dirichlet_h10(grid)), grid};
  }
  fail(ErrorCode::parse, "unknown oracle '" + name + "'");
}

double positive(const Config& c, const std::string& key, double fallback) {
  const double v = c.get_double(key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::parse, key + " must be positive and finite");
  return v;
}

std::size_t positive_size(const Config& c, const std::string& key, std::size_t fallback) {
  const std::size_t v = c.get_size(key, fallback);
  if (v == 0) fail(ErrorCode::parse, key + " must be positive");
  return v;
}

SolverTolerances tolerances(const Config& c) {
  SolverTolerances t;
  t.residual_tol = positive(c, "residual_tol", t.residual_tol);
  t.cluster_dist_tol = positive(c, "cluster_dist_tol", t.cluster_dist_tol);
  t.cluster_energy_rel = positive(c, "cluster_energy_rel", t.cluster_energy_rel);
  t.max_iterations = positive_size(c, "max_iterations", t.max_iterations);
  t.hess_tol = positive(c, "hess_tol", t.hess_tol);
  t.barrier_margin_rel = positive(c, "barrier_margin_rel", t.barrier_margin_rel);
  t.path_nodes = positive_size(c, "path_nodes", t.path_nodes);
  if (t.path_nodes < 16) fail(ErrorCode::parse, "path_nodes must be at least 16");
  t.path_step = positive(c, "path_step", t.path_step);
  t.newton_max_dim = positive_size(c, "newton_max_dim", t.newton_max_dim);
  return t;
}

std::uint64_t require_seed(const Config& c, const std::string& experiment) {
  const auto seed = c.get_seed();
  if (!seed) fail(ErrorCode::parse, "experiment " + experiment + " is randomized and needs a seed (config key or --seed)");
  return *seed;
}

BetaStarOptions beta_options(const Config& c, std::uint64_t seed) {
  BetaStarOptions o;
  o.directions = positive_size(c, "beta_directions", o.directions);
  o.scan_points = positive_size(c, "beta_scan_points", o.scan_points);
  o.seed = seed;
  return o;
}

AlphaStarOptions alpha_options(const Config& c, std::uint64_t seed) {
  AlphaStarOptions o;
  o.r0 = positive(c, "alpha_r0", o.r0);
  o.levels = positive_size(c, "alpha_levels", o.levels);
  o.directions = positive_size(c, "alpha_directions", o.directions);
  o.analytic_override = c.get_optional_double("alpha_override");
  if (o.analytic_override && !(*o.analytic_override >= 0.0)) fail(ErrorCode::parse, "alpha_override must be >= 0");
  o.seed = seed ^ 0x5bd1e995ULL;
  return o;
}

MultistartOptions multistart(const Config& c, std::uint64_t seed) {
  MultistartOptions o;
  o.n_starts = positive_size(c, "n_starts", o.n_starts);
  o.seed = seed;
  return o;
}

double lambda_unit(const Config& c, const OracleSetup& o, const std::string& fallback = "1") {
  const std::string unit = c.get_string("lambda_unit", fallback);
  if (unit == "1") return 1.0;
  if (unit == "pi2") return std::numbers::pi * std::numbers::pi;
  if (unit == "lambda1h") {
    if (!o.grid) fail(ErrorCode::parse, "lambda_unit lambda1h needs a grid oracle");
    return discrete_laplacian_lowest_eigenvalue(*o.grid);
  }
  fail(ErrorCode::parse, "lambda_unit must be 1, pi2 or lambda1h");
}

Vector vector_from(const Space& X, const std::vector<double>& values, const std::string& key) {
  if (values.size() == 1) return X.make(std::vector<double>(X.dim(), values.front()));
  if (values.size() != X.dim()) {
    fail(ErrorCode::parse, key + " needs 1 or " + std::to_string(X.dim()) + " values, got " + std::to_string(values.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::parse, key + " values must be finite");
  }
  return X.make(values);
}

Vector start_y(const Config& c, const Space& X, double fallback, std::uint64_t seed) {
  if (c.has("y0_scale")) {
    const double scale = positive(c, "y0_scale", 1.0);
    Rng rng = make_stream(seed, 0x79300ULL);
    Vector d = sample_directions(X, 1, rng).front();
    d *= scale;
    return d;
  }
  return vector_from(X, c.get_list("y0", {fallback}), "y0");
}

ConvexSetSpec convex_set(const Config& c, const SpacePtr& space) {
  const std::string kind = c.get_string("convex_set", "whole_space");
  const Space& X = *space;
  if (kind == "whole_space") return ConvexSetSpec::whole_space(space);
  if (kind == "ball") {
    return ConvexSetSpec::ball(space, vector_from(X, c.get_list("convex_center", {0.0}), "convex_center"),
                               positive(c, "convex_radius", 1.0));
  }
  if (kind == "affine_subspace") {
    std::vector<Vector> basis;
    for (const auto& v : c.get_vectors("convex_basis")) basis.push_back(vector_from(X, v, "convex_basis"));
    return ConvexSetSpec::affine_subspace(space, vector_from(X, c.get_list("convex_point", {0.0}), "convex_point"),
                                          std::move(basis));
  }
  if (kind == "halfspace_intersection") {
    std::vector<Vector> normals;
    for (const auto& v : c.get_vectors("convex_normals")) normals.push_back(vector_from(X, v, "convex_normals"));
    std::vector<double> offsets = c.get_list("convex_offsets", {});
    if (normals.size() != offsets.size()) fail(ErrorCode::parse, "convex_normals and convex_offsets differ in count");
    return ConvexSetSpec::halfspace_intersection(space, std::move(normals), std::move(offsets));
  }
  fail(ErrorCode::parse, "unknown convex_set '" + kind + "'");
}

// ---- output helpers ----

json to_json(const Vector& v) { return json(std::vector<double>(v.coords().begin(), v.coords().end())); }

json to_json(const CriticalPoint& p, const Space& X) {
  return json{{"kind", to_string(p.kind)},  {"energy", p.energy},         {"residual", p.residual},
              {"converged", p.converged},  {"iterations", p.iterations}, {"basin_seed", p.basin_seed},
              {"norm", X.norm(p.x)},       {"x", to_json(p.x)}};
}

json to_json(const GrowthConstants& g) {
  json sweep = json::array();
  for (const RadiusRatio& r : g.alpha.sweep) sweep.push_back({{"radius", r.radius}, {"max_ratio", r.max_ratio}});
  const LambdaInterval I = g.lambda_interval();
  return json{{"beta_star", g.beta_star()},
              {"alpha_star", g.alpha_star()},
              {"alpha_reliable", g.alpha.reliable},
              {"alpha_overridden", g.alpha.overridden},
              {"alpha_sweep", sweep},
              {"lambda_interval", {{"lower", I.lower}, {"upper", I.upper ? json(*I.upper) : json(nullptr)}}}};
}

json error_json(const Error& e) { return json{{"code", std::string(to_string(e.code()))}, {"message", e.what()}}; }

std::filesystem::path side_path(const Config& c, const RunOptions& o, const std::string& key, const std::string& suffix) {
  if (c.has(key)) return c.get_string(key, "");
  std::filesystem::path base = o.out ? *o.out : std::filesystem::path("varlab");
  base.replace_extension("");
  return base.string() + suffix;
}

class Csv {
 public:
  Csv(const std::filesystem::path& path, const std::string& header) : out_(path) {
    if (!out_) fail(ErrorCode::parse, "cannot write " + path.string());
    out_.precision(17);
    out_ << header << '\n';
  }
  template <class... T>
  void row(const T&... fields) {
    std::size_t i = 0;
    ((out_ << (i++ ? "," : "") << fields), ...);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

struct Context {
  const Config& config;
  const RunOptions& options;
  RunResult& result;

  ResultRecord record(const std::string& experiment) const {
    ResultRecord r;
    r.config_hash = config.hash();
    r.experiment = experiment;
    r.timestamp = utc_timestamp();
    return r;
  }
  void emit(ResultRecord r) {
    result.status = worst(result.status, r.status);
    result.records.push_back(std::move(r));
  }
};

// ---- constants ----

void run_constants(Context& ctx) {
  const Config& c = ctx.config;
  const std::uint64_t seed = require_seed(c, "constants");
  const OracleSetup o = make_oracle(c, "doublewell1d");
  ResultRecord r = ctx.record("constants");
  r.payload["oracle"] = o.J.label;
  r.payload["dim"] = o.J.space->dim();
  try {
    const GrowthConstants g = estimate_growth_constants(o.J, beta_options(c, seed), alpha_options(c, seed));
    r.payload["constants"] = to_json(g);
    if (o.grid) {
      const double l1 = discrete_laplacian_lowest_eigenvalue(*o.grid);
      r.payload["lambda1h"] = l1;
      r.payload["beta_star_reference"] = 1.0 / (2.0 * l1);
    }
    require_three_solution_hypotheses(g);
  } catch (const Error& e) {
    if (!e.is_refusal()) throw;
    r.status = Status::refused;
    r.payload["refusal"] = error_json(e);
  }
  ctx.emit(std::move(r));
}

// ---- three solutions / pde demo ----

void run_three_solutions(Context& ctx, const std::string& experiment) {
  const Config& c = ctx.config;
  const bool pde = experiment == "pde-demo";
  const std::uint64_t seed = require_seed(c, experiment);
  const OracleSetup o = make_oracle(c, pde ? "pde-cubic" : "doublewell1d");
  const FunctionalOracle& J = o.J;
  const Space& X = *J.space;
  const SolverTolerances tol = tolerances(c);
  // pde-demo defaults to lambda = 2 pi^2.
  const double lambda_value = c.get_double("lambda", pde ? 2.0 : 1.0) * lambda_unit(c, o, pde ? "pi2" : "1");
  const Vector y0 = start_y(c, X, pde ? 0.0 : 0.1, seed);

  ResultRecord r = ctx.record(experiment);
  r.payload["oracle"] = J.label;
  r.payload["dim"] = X.dim();
  r.payload["lambda"] = lambda_value;
  r.payload["y0"] = to_json(y0);

  GrowthConstants g;
  try {
    g = estimate_growth_constants(J, beta_options(c, seed), alpha_options(c, seed));
    r.payload["constants"] = to_json(g);
    require_three_solution_hypotheses(g);
    require_admissible_lambda(g, lambda_value);
  } catch (const Error& e) {
    if (!e.is_refusal()) throw;
    r.status = Status::refused;
    r.payload["refusal"] = error_json(e);
    ctx.emit(std::move(r));
    return;
  }

  const ConvexSetSpec C = convex_set(c, J.space);
  AscentOptions ao;
  ao.inner = multistart(c, seed);
  ao.grad_tol = positive(c, "grad_tol", ao.grad_tol);
  ao.max_steps = positive_size(c, "max_ascent_steps", ao.max_steps);
  r.payload["convex_set"] = to_string(C.kind());

  try {
    AscentResult ascent = ascend_to_tilde_y(J, lambda_value, C, y0, ao, tol);
    r.payload["ascent"] = {{"outcome", to_string(ascent.outcome)},
                           {"steps", ascent.trace.size()},
                           {"root_refinements", ascent.root_refinements},
                           {"tilde_y_norm", X.norm(ascent.tilde_y)},
                           {"tilde_y", to_json(ascent.tilde_y)},
                           {"value", ascent.value},
                           {"in_C", C.contains(ascent.tilde_y)}};
    const SolveReport& rep = ascent.report;
    r.payload["solve"] = {{"distinct_minima_count", rep.distinct_minima_count},
                          {"starts", rep.diagnostics.starts},
                          {"converged", rep.diagnostics.converged},
                          {"unconverged", rep.diagnostics.unconverged},
                          {"total_iterations", rep.diagnostics.total_iterations},
                          {"ball_radius", rep.diagnostics.ball_radius}};
    if (ctx.options.trace) {
      const auto ascent_csv = side_path(c, ctx.options, "trace_path", ".trace.csv");
      Csv trace(ascent_csv, "k,y_norm,value,minima_count");
      for (const AscentStep& s : ascent.trace) trace.row(s.k, s.y_norm, s.value, s.minima_count);
      const auto starts_csv = side_path(c, ctx.options, "csv_path", ".starts.csv");
      Csv starts(starts_csv, "start,converged,energy,residual");
      for (const StartRecord& s : rep.starts) {
        starts.row(s.index, s.result.converged ? 1 : 0, s.result.energy, s.result.residual);
      }
      ctx.result.files.push_back(ascent_csv);
      ctx.result.files.push_back(starts_csv);
    }
    if (ascent.outcome != AscentOutcome::tie_found) {
      r.status = Status::inconclusive;
      ctx.emit(std::move(r));
      return;
    }

    const EnergyParams p{lambda_value, ascent.tilde_y};
    const CriticalPoint& a = rep.points[0];
    const CriticalPoint& b = rep.points[1];
    const CriticalPoint mp = mountain_pass(J, p, a, b, tol);
    std::vector<CriticalPoint> three{a, b, mp};

    json points = json::array();
    bool verified = true;
    for (const CriticalPoint& cp : three) {
      const Verification v = verify_solution(J, p, cp.x, tol);
      json pj = to_json(cp, X);
      pj["verified"] = v.is_equation_solution;
      pj["weak_residual"] = v.weak_residual;
      verified = verified && v.is_equation_solution;
      points.push_back(pj);
    }
    r.payload["points"] = points;
    const double gap = std::abs(a.energy - b.energy);
    const bool barrier = mp.energy > std::max(a.energy, b.energy);
    bool distinct = true;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = i + 1; j < 3; ++j) distinct = distinct && X.distance(three[i].x, three[j].x) > tol.cluster_dist_tol;
    }
    r.payload["checks"] = {{"verified", verified},
                           {"minima_energy_gap", gap},
                           {"minima_tie", gap <= tol.cluster_energy_tol(std::min(a.energy, b.energy))},
                           {"barrier", barrier},
                           {"distinct", distinct}};

    if (X.dim() <= tol.newton_max_dim) {
      Vector seed_x = a.x;
      seed_x.axpy(0.4, b.x - a.x);
      const CriticalPoint dn = deflated_newton(J, p, {a, b}, seed_x, tol);
      r.payload["deflated_newton"] = {{"converged", dn.converged},
                                      {"energy", dn.energy},
                                      {"residual", dn.residual},
                                      {"distance_to_mountain_pass", X.distance(dn.x, mp.x)},
                                      {"agrees", dn.converged && X.distance(dn.x, mp.x) <= tol.cluster_dist_tol}};
    }
    if (X.dim() <= 256) {
      auto min_eig = [&](const CriticalPoint& cp) { return energy_hessian_eigenvalues(J, p, cp.x).minCoeff(); };
      r.payload["hessian"] = {{"min_eigenvalue_minima", std::min(min_eig(a), min_eig(b))},
                              {"min_eigenvalue_mountain_pass", min_eig(mp)},
                              {"hess_tol", tol.hess_tol}};
    }
    {
      // Finite sample around tilde_y, shared by both sides.
      std::vector<Vector> ys{ascent.tilde_y};
      Rng rng = make_stream(seed, 0x5a3b1eULL);
      for (const Vector& d : sample_directions(X, 2, rng)) {
        for (double s : {0.1, -0.1}) {
          Vector y = ascent.tilde_y;
          y.axpy(s, d);
          ys.push_back(C.project(y));
        }
      }
      const StrictInequalityWitness w =
          strict_inequality_witness(J, lambda_value, {a, b}, ys, multistart(c, seed), tol);
      r.payload["strict_inequality"] = {{"sup_inf", w.sup_inf}, {"inf_sup", w.inf_sup}, {"strict", w.strict}};
    }
    if (pde) {
      const double zero_norm = X.norm(mp.x);
      Vector neg = -a.x;
      const Verification vn = verify_solution(J, p, neg, tol);
      r.payload["pde"] = {{"lambda1h", discrete_laplacian_lowest_eigenvalue(*o.grid)},
                          {"third_is_zero", zero_norm <= tol.cluster_dist_tol},
                          {"third_norm", zero_norm},
                          {"negation_verifies", vn.is_equation_solution},
                          {"negation_energy_gap", std::abs(energy(J, p, neg) - a.energy)}};
    }
    if (!(verified && barrier && distinct)) r.status = Status::inconclusive;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::no_barrier && e.code() != ErrorCode::no_convergence) throw;
    r.status = Status::inconclusive;
    r.payload["failure"] = error_json(e);
  }
  ctx.emit(std::move(r));
}

// ---- sweep ----

void run_sweep(Context& ctx) {
  const Config& c = ctx.config;
  const std::uint64_t seed = require_seed(c, "sweep");
  const OracleSetup o = make_oracle(c, "pde-cubic");
  const FunctionalOracle& J = o.J;
  const SolverTolerances tol = tolerances(c);
  const std::string unit_name = c.get_string("lambda_unit", c.has("lambdas") ? "1" : "pi2");
  Config unit_config;
  unit_config.set("lambda_unit", unit_name);
  const double unit = lambda_unit(unit_config, o);
  const std::vector<double> lambdas = c.get_list("lambdas", {0.5, 1.0, 1.5, 2.0});
  const std::vector<double> y_values = c.get_list("y0", {0.0});
  const Vector y = vector_from(*J.space, y_values, "y0");

  std::optional<GrowthConstants> g;
  std::optional<Error> gate_error;
  try {
    g = estimate_growth_constants(J, beta_options(c, seed), alpha_options(c, seed));
    require_three_solution_hypotheses(*g);
  } catch (const Error& e) {
    if (!e.is_refusal()) throw;
    gate_error = e;
  }

  const auto csv_path = side_path(c, ctx.options, "csv_path", ".sweep.csv");
  std::optional<Csv> csv;
  if (!lambdas.empty()) {
    csv.emplace(csv_path, "lambda,minima_count,barrier_energy");
    ctx.result.files.push_back(csv_path);
  }

  for (double factor : lambdas) {
    const double lambda = factor * unit;
    ResultRecord r = ctx.record("sweep");
    r.payload["oracle"] = J.label;
    r.payload["lambda"] = lambda;
    r.payload["lambda_factor"] = factor;
    r.payload["lambda_unit"] = unit_name;
    if (o.grid) r.payload["lambda1h"] = discrete_laplacian_lowest_eigenvalue(*o.grid);
    if (g) r.payload["constants"] = to_json(*g);
    try {
      if (gate_error) throw *gate_error;
      require_admissible_lambda(*g, lambda);
    } catch (const Error& e) {
      if (!e.is_refusal()) throw;
      r.status = Status::refused;
      r.payload["refusal"] = error_json(e);
    }
    json barrier = nullptr;
    try {
      const SolveReport rep = find_global_minima(J, EnergyParams{lambda, y}, multistart(c, seed), tol);
      r.payload["minima_count"] = rep.distinct_minima_count;
      r.payload["minima_energy"] = rep.points.front().energy;
      r.payload["minima_norms"] = json::array();
      for (const CriticalPoint& cp : rep.points) {
        if (cp.kind == PointKind::global_min) r.payload["minima_norms"].push_back(J.space->norm(cp.x));
      }
      if (rep.distinct_minima_count >= 2) {
        try {
          const CriticalPoint mp = mountain_pass(J, EnergyParams{lambda, y}, rep.points[0], rep.points[1], tol);
          barrier = mp.energy;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::no_barrier && e.code() != ErrorCode::no_convergence) throw;
          r.payload["barrier_failure"] = error_json(e);
        }
      }
      if (csv) csv->row(lambda, rep.distinct_minima_count, barrier.is_null() ? std::string("") : barrier.dump());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::no_convergence) throw;
      r.status = worst(r.status, Status::inconclusive);
      r.payload["failure"] = error_json(e);
      if (csv) csv->row(lambda, std::string(""), std::string(""));
    }
    r.payload["barrier_energy"] = barrier;
    ctx.emit(std::move(r));
  }
}

// ---- minimax ----

json to_json(const minimax::RVector& v) {
  json out = json::array();
  for (const auto& q : v) out.push_back(minimax::format_rational(q));
  return out;
}

json to_json(const minimax::AuditResult& a, const minimax::FiniteInstance& inst) {
  auto labels = [&](const minimax::Subset& s) {
    json out = json::array();
    for (std::size_t i : s) out.push_back(inst.points[i].label);
    return out;
  };
  json covers = json::array();
  for (const auto& cover : a.covers) {
    json sets = json::array();
    for (const auto& s : cover.sets) {
      sets.push_back({{"set", labels(s.set)},
                      {"lhs", minimax::format_rational(s.lhs.value)},
                      {"lhs_argmax", to_json(s.lhs.argmax)},
                      {"rhs", minimax::format_rational(s.rhs.value)},
                      {"rhs_argmin", inst.points[s.rhs.argmin].label},
                      {"strict", s.strict}});
    }
    covers.push_back({{"witness", cover.witness ? json(*cover.witness) : json(nullptr)}, {"sets", sets}});
  }
  json j{{"check", a.check},
         {"instance", a.instance},
         {"branch", to_string(a.branch)},
         {"a_holds", a.a_holds},
         {"b_holds", a.b_holds},
         {"global_minima", labels(a.global_minima)},
         {"violation", a.violation},
         {"covers", covers}};
  if (a.b1_holds) j["b1_holds"] = *a.b1_holds;
  if (!a.message.empty()) j["message"] = a.message;
  return j;
}

void run_minimax(Context& ctx) {
  const Config& c = ctx.config;
  std::vector<minimax::FiniteInstance> instances;
  if (c.has("instances")) {
    instances = minimax::load_instances(c.get_path("instances"));
  } else {
    instances = {minimax::two_point_instance(), minimax::symmetric_three_point_instance()};
  }
  for (const auto& inst : instances) {
    ResultRecord r = ctx.record("minimax-audit");
    r.payload["instance"] = inst.name;
    json audits = json::array();
    std::vector<std::function<minimax::AuditResult()>> checks{[&] { return minimax::audit_dichotomy(inst); }};
    if (inst.origin) checks.emplace_back([&] { return minimax::audit_strict_gap(inst); });
    if (inst.involution) checks.emplace_back([&] { return minimax::audit_symmetric(inst); });
    for (const auto& check : checks) {
      try {
        const minimax::AuditResult a = check();
        audits.push_back(to_json(a, inst));
        if (a.violation) r.status = Status::violation;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::hypothesis_violated) throw;
        audits.push_back({{"refusal", error_json(e)}});
        if (!r.payload.contains("refusal")) r.payload["refusal"] = error_json(e);
        r.status = worst(r.status, Status::refused);
      }
    }
    r.payload["audits"] = audits;
    ctx.emit(std::move(r));
  }

  const std::size_t n_random = c.get_size("random_instances", 0);
  if (n_random == 0) return;
  const std::uint64_t seed = require_seed(c, "minimax-audit");
  ResultRecord r = ctx.record("minimax-audit");
  r.payload["random_instances_per_check"] = n_random;
  json summary = json::object();
  using Generator = minimax::FiniteInstance (*)(Rng&, const minimax::RandomInstanceOptions&);
  using Audit = minimax::AuditResult (*)(const minimax::FiniteInstance&);
  const std::vector<std::tuple<std::string, Generator, Audit>> batches{
      {"dichotomy", minimax::random_dichotomy_instance, minimax::audit_dichotomy},
      {"strict-gap", minimax::random_strict_gap_instance, minimax::audit_strict_gap},
      {"symmetric", minimax::random_symmetric_instance, minimax::audit_symmetric}};
  std::uint64_t stream = 0;
  for (const auto& [name, generate, audit] : batches) {
    Rng rng = make_stream(seed, stream++);
    std::map<std::string, std::size_t> branches;
    std::size_t violations = 0;
    std::size_t covers = 0;
    for (std::size_t i = 0; i < n_random; ++i) {
      const minimax::AuditResult a = audit(generate(rng, {}));
      ++branches[to_string(a.branch)];
      covers += a.covers.size();
      if (a.violation) ++violations;
    }
    summary[name] = {{"instances", n_random}, {"covers", covers}, {"violations", violations}, {"branches", branches}};
    if (violations) r.status = Status::violation;
  }
  r.payload["random"] = summary;
  ctx.emit(std::move(r));
}

// ---- decomposable ----

void run_decomposable(Context& ctx) {
  using namespace decomposable;
  const Config& c = ctx.config;
  const std::uint64_t seed = require_seed(c, "decomposable");
  const std::size_t dim = positive_size(c, "dim", 1);
  if (dim > 3) fail(ErrorCode::parse, "decomposable supports dim <= 3");
  const T16Functionals F = catalog_functionals(c.get_string("catalog_f", "inverse"), dim);
  const std::size_t n = positive_size(c, "cells", 2);
  MeasurePartition P = MeasurePartition::uniform(n);
  if (c.has("weights")) {
    std::vector<double> w = c.get_list("weights", {});
    if (w.size() != n) fail(ErrorCode::parse, "weights must list one value per cell");
    for (double x : w) {
      if (!(x > 0.0) || !std::isfinite(x)) fail(ErrorCode::parse, "weights must be positive");
    }
    P = MeasurePartition(std::move(w));
  }
  const double bound = c.get_double("bound", std::numeric_limits<double>::infinity());
  if (!(bound > 0.0)) fail(ErrorCode::parse, "bound must be positive");
  const DecomposableSetSpec X{std::vector<double>(n, bound), true};
  DescentOptions dopt;
  dopt.strict_margin = positive(c, "strict_margin", dopt.strict_margin);

  ResultRecord r = ctx.record("decomposable");
  r.payload["catalog"] = F.label;
  r.payload["dim"] = dim;
  r.payload["weights"] = P.weights;
  r.payload["bound"] = std::isinf(bound) ? json("inf") : json(bound);

  Rng rng = make_stream(seed, 0);
  const HypothesisCheck hyp = check_hypotheses(F, n, 256, rng);
  r.payload["hypotheses"] = {{"parity_f", hyp.parity_f}, {"parity_g", hyp.parity_g}, {"growth", hyp.growth},
                             {"pass", hyp.pass()}};

  try {
    const std::size_t steps = c.get_size("descent_steps", 5);
    const auto trace = iterate_descent(P, F, SimpleFunction::constant(n, Point(dim, 0.0)), X, steps, dopt);
    json rows = json::array();
    for (const auto& t : trace) rows.push_back({{"k", t.k}, {"J", t.J}, {"phi", t.phi}, {"max_norm", t.max_norm}});
    r.payload["descent"] = rows;
    if (ctx.options.trace) {
      const auto path = side_path(c, ctx.options, "trace_path", ".trace.csv");
      Csv csv(path, "k,J,phi,max_norm");
      for (const auto& t : trace) csv.row(t.k, t.J, t.phi, t.max_norm);
      ctx.result.files.push_back(path);
    }

    std::vector<SimpleFunction> candidates;
    for (double v : {-1.0, 0.0, 1.0}) candidates.push_back(SimpleFunction::constant(n, Point(dim, v)));
    const std::size_t extra = c.get_size("candidates", 100);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> log_scale(-2.0, 2.0);
    for (std::size_t k = 0; k < extra; ++k) {
      SimpleFunction u;
      for (std::size_t i = 0; i < n; ++i) {
        Point x(dim);
        const double s = std::pow(10.0, log_scale(rng));
        for (double& v : x) v = s * normal(rng);
        u.values.push_back(std::move(x));
      }
      candidates.push_back(std::move(u));
    }
    const NoMinReport report = no_min_audit(P, F, X, candidates, rng, dopt);
    double min_margin = std::numeric_limits<double>::infinity();
    std::size_t phi_zero = 0;
    for (const NoMinRow& row : report.rows) {
      min_margin = std::min(min_margin, row.margin);
      phi_zero += row.phi_zero ? 1 : 0;
    }
    r.payload["no_min"] = {{"candidates", report.rows.size()},
                           {"alarms", report.alarms},
                           {"min_margin", min_margin},
                           {"phi_zero_candidates", phi_zero},
                           {"per_cell_min_unsatisfiable", report.per_cell_min_unsatisfiable}};
    if (report.alarms) r.status = Status::violation;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::hypothesis_violated) {
      r.status = Status::refused;
      r.payload["refusal"] = error_json(e);
    } else if (e.code() == ErrorCode::descent_blocked) {
      r.status = Status::inconclusive;
      r.payload["failure"] = error_json(e);
    } else {
      throw;
    }
  }

  MinimaxCheckOptions mopt;
  mopt.grid_points = c.get_size("minimax_grid", 201);
  if (mopt.grid_points < 2) fail(ErrorCode::parse, "minimax_grid must be at least 2");
  const double mbound = positive(c, "minimax_bound", 1.0);
  json checks = json::array();
  for (double cells : c.get_list("minimax_cells", {2.0})) {
    if (!(cells >= 1.0) || cells != std::floor(cells)) fail(ErrorCode::parse, "minimax_cells must be positive integers");
    const auto m = static_cast<std::size_t>(cells);
    const MinimaxCheck mc = lambda_interval_minimax_check(MeasurePartition::uniform(m), F,
                                                          {std::vector<double>(m, mbound), true}, mopt);
    checks.push_back({{"cells", m},
                      {"lhs", mc.lhs},
                      {"rhs", mc.rhs},
                      {"lambda_interval", {mc.lambda_lo, mc.lambda_hi}},
                      {"sampling_gap", mc.sampling_gap},
                      {"samples", mc.samples},
                      {"inconclusive", mc.inconclusive},
                      {"pass", mc.pass}});
    if (!mc.pass) r.status = worst(r.status, Status::inconclusive);
  }
  r.payload["lambda_minimax"] = checks;
  ctx.emit(std::move(r));
}

}  // namespace

RunResult run(const Config& config, const RunOptions& options) {
  RunResult result;
  Context ctx{config, options, result};
  const std::string experiment = config.get_string("experiment", "");
  if (experiment == "constants") {
    run_constants(ctx);
  } else if (experiment == "three-solutions" || experiment == "pde-demo") {
    run_three_solutions(ctx, experiment);
  } else if (experiment == "sweep") {
    run_sweep(ctx);
  } else if (experiment == "minimax-audit") {
    run_minimax(ctx);
  } else if (experiment == "decomposable") {
    run_decomposable(ctx);
  } else {
    fail(ErrorCode::parse, experiment.empty() ? "no experiment selected" : "unknown experiment '" + experiment + "'");
  }
  if (options.out) {
    for (const ResultRecord& r : result.records) append_jsonl(*options.out, r);
  }
  return result;
}

}  // namespace varlab::app
