#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

#include "varlab/random.hpp"

namespace varlab::minimax {

using Rational = boost::multiprecision::mpq_rational;
using RVector = std::vector<Rational>;

// "3", "-1/8", "0.25", "-1.5e-3": every accepted spelling is converted exactly.
Rational parse_rational(const std::string& text);
std::string format_rational(const Rational& q);
double to_double(const Rational& q);

struct FinitePoint {
  std::string label;
  Rational I;
  RVector phi;  // Phi(x) in Y = Q^d
};

using Subset = std::vector<std::size_t>;  // sorted point indices

// Family of subsets of X. Valid when the union is X and every pair has a
// superset in the family (for finite families this forces X itself in).
class FilteringCover {
 public:
  FilteringCover() = default;
  // Validates; throws contract on an invalid family.
  FilteringCover(std::size_t n_points, std::vector<Subset> sets);

  const std::vector<Subset>& sets() const { return sets_; }
  static FilteringCover trivial(std::size_t n_points);
  static bool is_filtering(std::size_t n_points, const std::vector<Subset>& sets);

 private:
  std::vector<Subset> sets_;
};

struct FiniteInstance {
  std::string name;
  Rational mu{1};
  std::size_t dim = 1;
  std::vector<FinitePoint> points;
  std::optional<std::size_t> origin;                   // I = 0 and Phi = 0 there
  std::optional<std::vector<std::size_t>> involution;  // x -> -x as an index map
  std::vector<FilteringCover> covers;                  // {X} when none are given

  // mu > 0, consistent dimensions, origin and involution well formed.
  void validate() const;
  std::vector<FilteringCover> effective_covers() const;
};

// I(x) + mu (2 <Phi(x), y> - |y|^2)
Rational coupling(const FiniteInstance& inst, std::size_t x, const RVector& y);

struct SupInf {
  Rational value;
  RVector argmax;  // a maximizing y
};

// sup over y in Q^d of min over x in A of the coupling. Exact: the maximizer
// is the projection of some Phi(x_s) onto an equalization set
// { y : l_s(y) = l_t(y), t in S } for an affinely independent active set S.
SupInf lhs_sup_inf(const FiniteInstance& inst, const Subset& A);

struct InfSup {
  Rational value;
  std::size_t argmin = 0;  // minimizing x
};

// inf over x in A of max over y in Phi(B) of the coupling; B = A by default.
InfSup rhs_inf_sup(const FiniteInstance& inst, const Subset& A);
InfSup rhs_inf_sup(const FiniteInstance& inst, const Subset& A, const Subset& B);

// sup over y in Phi(A) of min over x in A of the coupling.
Rational sup_inf_on_images(const FiniteInstance& inst, const Subset& A);

struct SetAudit {
  Subset set;
  SupInf lhs;
  InfSup rhs;
  bool strict = false;  // lhs < rhs
};

struct CoverAudit {
  std::vector<SetAudit> sets;
  std::optional<std::size_t> witness;  // first set with strict inequality
};

enum class Branch { a_holds, b_holds, both, neither };
const char* to_string(Branch branch);

struct AuditResult {
  std::string check;  // "dichotomy", "strict-gap" or "symmetric"
  std::string instance;
  std::vector<CoverAudit> covers;
  bool a_holds = false;  // every supplied cover has a witness
  bool b_holds = false;  // inequality at every global minimum of I + mu |Phi|^2
  Branch branch = Branch::neither;
  std::vector<std::size_t> global_minima;  // of I + mu |Phi|^2
  // Symmetric check: (b1) evaluated when some cover lacks a witness.
  std::optional<bool> b1_holds;
  bool violation = false;
  std::string message;
};

// Branch (b): every global minimum u of I + mu|Phi|^2 satisfies
// I(u) <= I(x) + 2 mu (<Phi(x), Phi(u)> - |Phi(u)|^2) for all x.
bool branch_b_holds(const FiniteInstance& inst, const std::vector<std::size_t>& global_minima);
std::vector<std::size_t> penalized_global_minima(const FiniteInstance& inst);

// At least one of (a), (b) must hold on the supplied covers.
AuditResult audit_dichotomy(const FiniteInstance& inst);
// Needs an origin and inf I < 0 <= inf (I + mu|Phi|^2); otherwise throws
// hypothesis_violated. Every cover must contain a witness.
AuditResult audit_strict_gap(const FiniteInstance& inst);
// Needs an involution with I even and Phi odd; otherwise throws
// hypothesis_violated. Where (a1) fails on a cover, (b1) must hold exactly.
AuditResult audit_symmetric(const FiniteInstance& inst);

// Text format: see docs/instance-format.md.
std::vector<FiniteInstance> parse_instances(const std::string& text);
std::vector<FiniteInstance> load_instances(const std::filesystem::path& path);
std::string format_instance(const FiniteInstance& inst);

struct RandomInstanceOptions {
  std::size_t max_points = 9;
  std::size_t max_dim = 2;
  int value_range = 4;   // numerators drawn from [-value_range, value_range]
  int denominator = 4;   // denominators drawn from [1, denominator]
  std::size_t extra_cover_sets = 3;
};

// Generators draw until the target check's hypotheses hold (rejection sampling).
FiniteInstance random_dichotomy_instance(Rng& rng, const RandomInstanceOptions& options);
FiniteInstance random_strict_gap_instance(Rng& rng, const RandomInstanceOptions& options);
FiniteInstance random_symmetric_instance(Rng& rng, const RandomInstanceOptions& options);

// Hand-audited examples.
FiniteInstance two_point_instance();
FiniteInstance symmetric_three_point_instance();

}  // namespace varlab::minimax
