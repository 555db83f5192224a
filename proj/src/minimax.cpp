#include "varlab/minimax.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "varlab/errors.hpp"

namespace varlab::minimax {

using Integer = boost::multiprecision::mpz_int;

Rational parse_rational(const std::string& text) {
  auto bad = [&]() -> Rational { fail(ErrorCode::parse, "not a rational number: '" + text + "'"); };
  if (text.empty()) return bad();
  std::string s = text;
  bool negative = false;
  if (s[0] == '-' || s[0] == '+') {
    negative = s[0] == '-';
    s.erase(0, 1);
  }
  auto digits_only = [](const std::string& d) {
    return !d.empty() && std::all_of(d.begin(), d.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
  };
  // GMP reads a leading 0 as an octal prefix.
  auto decimal = [](const std::string& d) {
    const auto first = d.find_first_not_of('0');
    return Integer(first == std::string::npos ? std::string("0") : d.substr(first));
  };
  Rational value;
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    const std::string num = s.substr(0, slash);
    const std::string den = s.substr(slash + 1);
    if (!digits_only(num) || !digits_only(den)) return bad();
    const Integer d = decimal(den);
    if (d == 0) fail(ErrorCode::parse, "zero denominator in '" + text + "'");
    value = Rational(decimal(num), d);
  } else {
    std::string mantissa = s;
    long exponent = 0;
    if (const auto e = s.find_first_of("eE"); e != std::string::npos) {
      mantissa = s.substr(0, e);
      std::string exp = s.substr(e + 1);
      bool exp_negative = false;
      if (!exp.empty() && (exp[0] == '-' || exp[0] == '+')) {
        exp_negative = exp[0] == '-';
        exp.erase(0, 1);
      }
      if (!digits_only(exp) || exp.size() > 6) return bad();
      exponent = std::stol(exp) * (exp_negative ? -1 : 1);
    }
    std::string whole = mantissa;
    std::string frac;
    if (const auto dot = mantissa.find('.'); dot != std::string::npos) {
      whole = mantissa.substr(0, dot);
      frac = mantissa.substr(dot + 1);
    }
    if (whole.empty() && frac.empty()) return bad();
    if ((!whole.empty() && !digits_only(whole)) || (!frac.empty() && !digits_only(frac))) return bad();
    const Integer digits = decimal(whole + frac);
    exponent -= static_cast<long>(frac.size());
    const Integer scale = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(std::abs(exponent)));
    value = exponent >= 0 ? Rational(digits * scale) : Rational(digits, scale);
  }
  return negative ? Rational(-value) : value;
}

std::string format_rational(const Rational& q) { return q.str(); }

double to_double(const Rational& q) { return q.convert_to<double>(); }

namespace {

Rational dot(const RVector& a, const RVector& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Rational penalized(const FiniteInstance& inst, std::size_t x) {
  return inst.points[x].I + inst.mu * dot(inst.points[x].phi, inst.points[x].phi);
}

Subset everything(std::size_t n) {
  Subset all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return all;
}

// Solves K z = r exactly; false when K is singular.
bool solve_exact(std::vector<RVector> K, RVector r, RVector& z) {
  const std::size_t n = r.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && K[pivot][c] == 0) ++pivot;
    if (pivot == n) return false;
    std::swap(K[c], K[pivot]);
    std::swap(r[c], r[pivot]);
    for (std::size_t row = 0; row < n; ++row) {
      if (row == c || K[row][c] == 0) continue;
      const Rational factor = K[row][c] / K[c][c];
      for (std::size_t k = c; k < n; ++k) K[row][k] -= factor * K[c][k];
      r[row] -= factor * r[c];
    }
  }
  z.assign(n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / K[i][i];
  return true;
}

Rational envelope(const FiniteInstance& inst, const Subset& A, const RVector& y) {
  Rational best = coupling(inst, A.front(), y);
  for (std::size_t i = 1; i < A.size(); ++i) best = std::min(best, coupling(inst, A[i], y));
  return best;
}

}  // namespace

FilteringCover::FilteringCover(std::size_t n_points, std::vector<Subset> sets) {
  for (Subset& s : sets) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    require(!s.empty(), "cover sets must be non-empty");
    require(s.back() < n_points, "cover set refers to a point outside X");
  }
  require(is_filtering(n_points, sets), "cover is not filtering: the union must be X and every pair needs a superset");
  sets_ = std::move(sets);
}

FilteringCover FilteringCover::trivial(std::size_t n_points) { return FilteringCover(n_points, {everything(n_points)}); }

bool FilteringCover::is_filtering(std::size_t n_points, const std::vector<Subset>& sets) {
  if (sets.empty()) return false;
  std::set<std::size_t> all;
  for (const Subset& s : sets) all.insert(s.begin(), s.end());
  if (all.size() != n_points) return false;
  for (const Subset& a : sets) {
    for (const Subset& b : sets) {
      Subset u;
      std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
      const bool covered = std::any_of(sets.begin(), sets.end(), [&](const Subset& c) {
        return std::includes(c.begin(), c.end(), u.begin(), u.end());
      });
      if (!covered) return false;
    }
  }
  return true;
}

void FiniteInstance::validate() const {
  require(mu > 0, "instance " + name + ": mu must be positive");
  require(!points.empty(), "instance " + name + ": X must be non-empty");
  for (const FinitePoint& p : points) {
    require(p.phi.size() == dim, "instance " + name + ": point " + p.label + " has the wrong Phi dimension");
  }
  std::set<std::string> labels;
  for (const FinitePoint& p : points) {
    require(labels.insert(p.label).second, "instance " + name + ": duplicate label " + p.label);
  }
  if (origin) {
    require(*origin < points.size(), "instance " + name + ": origin out of range");
    const FinitePoint& o = points[*origin];
    require(o.I == 0 && std::all_of(o.phi.begin(), o.phi.end(), [](const Rational& q) { return q == 0; }),
            "instance " + name + ": origin must have I = 0 and Phi = 0");
  }
  if (involution) {
    require(involution->size() == points.size(), "instance " + name + ": involution must map every point");
    for (std::size_t i = 0; i < points.size(); ++i) {
      require((*involution)[i] < points.size(), "instance " + name + ": involution index out of range");
    }
  }
  for (const FilteringCover& c : covers) {
    require(FilteringCover::is_filtering(points.size(), c.sets()), "instance " + name + ": invalid cover");
  }
}

std::vector<FilteringCover> FiniteInstance::effective_covers() const {
  if (covers.empty()) return {FilteringCover::trivial(points.size())};
  return covers;
}

Rational coupling(const FiniteInstance& inst, std::size_t x, const RVector& y) {
  const RVector& p = inst.points[x].phi;
  return inst.points[x].I + inst.mu * (2 * dot(p, y) - dot(y, y));
}

SupInf lhs_sup_inf(const FiniteInstance& inst, const Subset& A) {
  require(!A.empty(), "lhs_sup_inf needs a non-empty set");
  const std::size_t d = inst.dim;
  SupInf best;
  bool have = false;
  auto consider = [&](const RVector& y) {
    Rational v = envelope(inst, A, y);
    if (!have || v > best.value) {
      best.value = std::move(v);
      best.argmax = y;
      have = true;
    }
  };

  // Active sets S = {s0} u T with s0 < every element of T and |T| <= d.
  std::vector<std::size_t> T;
  auto recurse = [&](auto&& self, std::size_t s0_pos, std::size_t next) -> void {
    const std::size_t s0 = A[s0_pos];
    const RVector& p0 = inst.points[s0].phi;
    const std::size_t k = T.size();
    std::vector<RVector> R(k, RVector(d));
    RVector rhs(k);
    for (std::size_t i = 0; i < k; ++i) {
      const FinitePoint& pt = inst.points[T[i]];
      for (std::size_t j = 0; j < d; ++j) R[i][j] = pt.phi[j] - p0[j];
      rhs[i] = (inst.points[s0].I - pt.I) / (2 * inst.mu) - dot(R[i], p0);
    }
    std::vector<RVector> K(k, RVector(k));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) K[i][j] = dot(R[i], R[j]);
    }
    RVector z;
    if (!solve_exact(K, rhs, z)) return;  // dependent rows: covered by a smaller S
    RVector y = p0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < d; ++j) y[j] += z[i] * R[i][j];
    }
    consider(y);
    if (k == d) return;
    for (std::size_t pos = next; pos < A.size(); ++pos) {
      T.push_back(A[pos]);
      self(self, s0_pos, pos + 1);
      T.pop_back();
    }
  };
  for (std::size_t pos = 0; pos < A.size(); ++pos) recurse(recurse, pos, pos + 1);
  return best;
}

InfSup rhs_inf_sup(const FiniteInstance& inst, const Subset& A) { return rhs_inf_sup(inst, A, A); }

InfSup rhs_inf_sup(const FiniteInstance& inst, const Subset& A, const Subset& B) {
  require(!A.empty() && !B.empty(), "rhs_inf_sup needs non-empty sets");
  InfSup out;
  bool have = false;
  for (std::size_t x : A) {
    Rational sup = coupling(inst, x, inst.points[B.front()].phi);
    for (std::size_t b : B) sup = std::max(sup, coupling(inst, x, inst.points[b].phi));
    if (!have || sup < out.value) {
      out.value = sup;
      out.argmin = x;
      have = true;
    }
  }
  return out;
}

Rational sup_inf_on_images(const FiniteInstance& inst, const Subset& A) {
  require(!A.empty(), "sup_inf_on_images needs a non-empty set");
  Rational best = envelope(inst, A, inst.points[A.front()].phi);
  for (std::size_t b : A) best = std::max(best, envelope(inst, A, inst.points[b].phi));
  return best;
}

const char* to_string(Branch branch) {
  switch (branch) {
    case Branch::a_holds: return "a_holds";
    case Branch::b_holds: return "b_holds";
    case Branch::both: return "both";
    case Branch::neither: return "neither";
  }
  return "neither";
}

std::vector<std::size_t> penalized_global_minima(const FiniteInstance& inst) {
  Rational best = penalized(inst, 0);
  for (std::size_t x = 1; x < inst.points.size(); ++x) best = std::min(best, penalized(inst, x));
  std::vector<std::size_t> minima;
  for (std::size_t x = 0; x < inst.points.size(); ++x) {
    if (penalized(inst, x) == best) minima.push_back(x);
  }
  return minima;
}

bool branch_b_holds(const FiniteInstance& inst, const std::vector<std::size_t>& global_minima) {
  for (std::size_t u : global_minima) {
    const RVector& pu = inst.points[u].phi;
    const Rational pu2 = dot(pu, pu);
    for (std::size_t x = 0; x < inst.points.size(); ++x) {
      const Rational bound = inst.points[x].I + 2 * inst.mu * (dot(inst.points[x].phi, pu) - pu2);
      if (inst.points[u].I > bound) return false;
    }
  }
  return true;
}

namespace {

CoverAudit audit_cover(const FiniteInstance& inst, const FilteringCover& cover) {
  CoverAudit out;
  for (const Subset& A : cover.sets()) {
    SetAudit s;
    s.set = A;
    s.lhs = lhs_sup_inf(inst, A);
    s.rhs = rhs_inf_sup(inst, A);
    s.strict = s.lhs.value < s.rhs.value;
    if (s.strict && !out.witness) out.witness = out.sets.size();
    out.sets.push_back(std::move(s));
  }
  return out;
}

AuditResult audit_common(const FiniteInstance& inst, const std::string& check) {
  inst.validate();
  AuditResult r;
  r.check = check;
  r.instance = inst.name;
  for (const FilteringCover& c : inst.effective_covers()) r.covers.push_back(audit_cover(inst, c));
  r.a_holds = std::all_of(r.covers.begin(), r.covers.end(), [](const CoverAudit& c) { return c.witness.has_value(); });
  r.global_minima = penalized_global_minima(inst);
  r.b_holds = branch_b_holds(inst, r.global_minima);
  r.branch = r.a_holds ? (r.b_holds ? Branch::both : Branch::a_holds) : (r.b_holds ? Branch::b_holds : Branch::neither);
  if (r.branch == Branch::neither) {
    r.violation = true;
    r.message = "dichotomy violated: a cover has no strict set and (b) fails";
  }
  return r;
}

}  // namespace

AuditResult audit_dichotomy(const FiniteInstance& inst) { return audit_common(inst, "dichotomy"); }

AuditResult audit_strict_gap(const FiniteInstance& inst) {
  inst.validate();
  if (!inst.origin) fail(ErrorCode::hypothesis_violated, "instance " + inst.name + ": no origin point given");
  Rational inf_I = inst.points[0].I;
  Rational inf_pen = penalized(inst, 0);
  for (std::size_t x = 1; x < inst.points.size(); ++x) {
    inf_I = std::min(inf_I, inst.points[x].I);
    inf_pen = std::min(inf_pen, penalized(inst, x));
  }
  if (!(inf_I < 0)) fail(ErrorCode::hypothesis_violated, "instance " + inst.name + ": inf I is not negative");
  if (inf_pen < 0) {
    fail(ErrorCode::hypothesis_violated, "instance " + inst.name + ": inf (I + mu |Phi|^2) is negative");
  }
  AuditResult r = audit_common(inst, "strict-gap");
  for (std::size_t c = 0; c < r.covers.size(); ++c) {
    if (!r.covers[c].witness) {
      r.violation = true;
      r.message = "cover " + std::to_string(c) + " has no set with strict inequality";
      break;
    }
  }
  return r;
}

AuditResult audit_symmetric(const FiniteInstance& inst) {
  inst.validate();
  if (!inst.involution) fail(ErrorCode::hypothesis_violated, "instance " + inst.name + ": no involution given");
  const auto& inv = *inst.involution;
  for (std::size_t x = 0; x < inst.points.size(); ++x) {
    const FinitePoint& a = inst.points[x];
    const FinitePoint& b = inst.points[inv[x]];
    if (inv[inv[x]] != x) fail(ErrorCode::hypothesis_violated, "instance " + inst.name + ": map is not an involution");
    if (a.I != b.I) fail(ErrorCode::hypothesis_violated, "instance " + inst.name + ": I is not even at " + a.label);
    for (std::size_t j = 0; j < inst.dim; ++j) {
      if (a.phi[j] != -b.phi[j]) {
        fail(ErrorCode::hypothesis_violated, "instance " + inst.name + ": Phi is not odd at " + a.label);
      }
    }
  }
  AuditResult r = audit_common(inst, "symmetric");
  if (!r.a_holds) {
    Rational min_I = inst.points[0].I;
    for (const FinitePoint& p : inst.points) min_I = std::min(min_I, p.I);
    bool b1 = true;
    for (std::size_t u : r.global_minima) {
      const FinitePoint& p = inst.points[u];
      const bool phi_zero = std::all_of(p.phi.begin(), p.phi.end(), [](const Rational& q) { return q == 0; });
      b1 = b1 && phi_zero && p.I == min_I;
    }
    r.b1_holds = b1;
    if (!b1) {
      r.violation = true;
      r.message = "(a1) fails on a cover but a global minimum of I + mu|Phi|^2 has Phi != 0 or is not a minimum of I";
    }
  }
  return r;
}

// ---- text format ----

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<FiniteInstance> parse_instances(const std::string& text) {
  std::vector<FiniteInstance> out;
  std::optional<FiniteInstance> cur;
  std::vector<std::vector<std::string>> pending_covers;
  std::vector<std::pair<std::string, std::string>> pending_pairs;
  std::optional<std::string> pending_origin;
  bool have_involution = false;
  std::size_t line_no = 0;

  auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
  auto index_of = [&](const std::string& label) {
    for (std::size_t i = 0; i < cur->points.size(); ++i) {
      if (cur->points[i].label == label) return i;
    }
    fail(ErrorCode::parse, where() + "unknown point label '" + label + "'");
  };

  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::vector<std::string> tok = split_ws(line);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    if (key == "instance") {
      if (cur) fail(ErrorCode::parse, where() + "'instance' before 'end'");
      if (tok.size() != 2) fail(ErrorCode::parse, where() + "expected 'instance NAME'");
      cur.emplace();
      cur->name = tok[1];
      cur->dim = 0;
      pending_covers.clear();
      pending_pairs.clear();
      pending_origin.reset();
      have_involution = false;
      continue;
    }
    if (!cur) fail(ErrorCode::parse, where() + "'" + key + "' outside an instance block");
    if (key == "mu") {
      if (tok.size() != 2) fail(ErrorCode::parse, where() + "expected 'mu VALUE'");
      cur->mu = parse_rational(tok[1]);
    } else if (key == "dim") {
      if (tok.size() != 2 || tok[1].find_first_not_of("0123456789") != std::string::npos) {
        fail(ErrorCode::parse, where() + "expected 'dim N'");
      }
      cur->dim = std::stoul(tok[1]);
    } else if (key == "point") {
      if (cur->dim == 0) fail(ErrorCode::parse, where() + "'dim' must precede points");
      if (tok.size() != 3 + cur->dim) {
        fail(ErrorCode::parse, where() + "expected 'point LABEL I' followed by " + std::to_string(cur->dim) + " Phi values");
      }
      FinitePoint p;
      p.label = tok[1];
      if (p.label.find(',') != std::string::npos) fail(ErrorCode::parse, where() + "labels may not contain ','");
      p.I = parse_rational(tok[2]);
      for (std::size_t j = 0; j < cur->dim; ++j) p.phi.push_back(parse_rational(tok[3 + j]));
      cur->points.push_back(std::move(p));
    } else if (key == "origin") {
      if (tok.size() != 2) fail(ErrorCode::parse, where() + "expected 'origin LABEL'");
      pending_origin = tok[1];
    } else if (key == "involution") {
      if (tok.size() != 3) fail(ErrorCode::parse, where() + "expected 'involution LABEL LABEL'");
      pending_pairs.emplace_back(tok[1], tok[2]);
      have_involution = true;
    } else if (key == "symmetric") {
      if (tok.size() != 1) fail(ErrorCode::parse, where() + "'symmetric' takes no arguments");
      have_involution = true;
    } else if (key == "cover") {
      if (tok.size() < 2) fail(ErrorCode::parse, where() + "expected 'cover SET...'");
      pending_covers.emplace_back(tok.begin() + 1, tok.end());
    } else if (key == "end") {
      if (tok.size() != 1) fail(ErrorCode::parse, where() + "'end' takes no arguments");
      if (cur->dim == 0) fail(ErrorCode::parse, where() + "instance " + cur->name + " has no 'dim'");
      if (pending_origin) cur->origin = index_of(*pending_origin);
      if (have_involution) {
        std::vector<std::size_t> inv(cur->points.size());
        std::iota(inv.begin(), inv.end(), std::size_t{0});
        for (const auto& [a, b] : pending_pairs) {
          const std::size_t ia = index_of(a);
          const std::size_t ib = index_of(b);
          inv[ia] = ib;
          inv[ib] = ia;
        }
        cur->involution = std::move(inv);
      }
      for (const auto& sets : pending_covers) {
        std::vector<Subset> subsets;
        for (const std::string& s : sets) {
          Subset sub;
          for (const std::string& label : split_on(s, ',')) sub.push_back(index_of(label));
          subsets.push_back(std::move(sub));
        }
        try {
          cur->covers.emplace_back(cur->points.size(), std::move(subsets));
        } catch (const Error& e) {
          fail(ErrorCode::parse, where() + "instance " + cur->name + ": " + e.what());
        }
      }
      try {
        cur->validate();
      } catch (const Error& e) {
        fail(ErrorCode::parse, where() + e.what());
      }
      out.push_back(std::move(*cur));
      cur.reset();
    } else {
      fail(ErrorCode::parse, where() + "unknown keyword '" + key + "'");
    }
  }
  if (cur) fail(ErrorCode::parse, "instance " + cur->name + " is missing 'end'");
  return out;
}

std::vector<FiniteInstance> load_instances(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::parse, "cannot open instance file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_instances(buffer.str());
}

std::string format_instance(const FiniteInstance& inst) {
  std::ostringstream out;
  out << "instance " << inst.name << "\n";
  out << "mu " << format_rational(inst.mu) << "\n";
  out << "dim " << inst.dim << "\n";
  for (const FinitePoint& p : inst.points) {
    out << "point " << p.label << " " << format_rational(p.I);
    for (const Rational& q : p.phi) out << " " << format_rational(q);
    out << "\n";
  }
  if (inst.origin) out << "origin " << inst.points[*inst.origin].label << "\n";
  if (inst.involution) {
    bool any = false;
    for (std::size_t i = 0; i < inst.points.size(); ++i) {
      const std::size_t j = (*inst.involution)[i];
      if (i < j) {
        out << "involution " << inst.points[i].label << " " << inst.points[j].label << "\n";
        any = true;
      }
    }
    if (!any) out << "symmetric\n";
  }
  for (const FilteringCover& c : inst.covers) {
    out << "cover";
    for (const Subset& s : c.sets()) {
      out << " ";
      for (std::size_t k = 0; k < s.size(); ++k) out << (k ? "," : "") << inst.points[s[k]].label;
    }
    out << "\n";
  }
  out << "end\n";
  return out.str();
}

// ---- generators ----

namespace {

std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Rational random_rational(Rng& rng, const RandomInstanceOptions& o) {
  const int num = std::uniform_int_distribution<int>(-o.value_range, o.value_range)(rng);
  const int den = std::uniform_int_distribution<int>(1, o.denominator)(rng);
  return Rational(num, den);
}

Rational random_mu(Rng& rng) {
  return Rational(std::uniform_int_distribution<int>(1, 4)(rng), std::uniform_int_distribution<int>(1, 2)(rng));
}

RVector random_phi(Rng& rng, const RandomInstanceOptions& o, std::size_t d) {
  RVector v(d);
  for (Rational& q : v) q = random_rational(rng, o);
  return v;
}

// {X}, a random chain ending in X, and X plus random subsets.
std::vector<FilteringCover> random_covers(Rng& rng, std::size_t n, const RandomInstanceOptions& o) {
  std::vector<FilteringCover> covers{FilteringCover::trivial(n)};
  if (n >= 2) {
    Subset order = everything(n);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Subset> chain;
    std::size_t len = 0;
    while (len < n) {
      len = std::min(n, len + uniform_index(rng, 1, std::max<std::size_t>(1, n / 2)));
      Subset s(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(len));
      chain.push_back(std::move(s));
    }
    covers.emplace_back(n, std::move(chain));

    std::vector<Subset> family{everything(n)};
    for (std::size_t k = 0; k < o.extra_cover_sets; ++k) {
      Subset s;
      for (std::size_t i = 0; i < n; ++i) {
        if (std::bernoulli_distribution(0.5)(rng)) s.push_back(i);
      }
      if (s.empty()) s.push_back(uniform_index(rng, 0, n - 1));
      family.push_back(std::move(s));
    }
    covers.emplace_back(n, std::move(family));
  }
  return covers;
}

}  // namespace

FiniteInstance random_dichotomy_instance(Rng& rng, const RandomInstanceOptions& o) {
  FiniteInstance inst;
  inst.name = "random-dichotomy";
  inst.dim = uniform_index(rng, 1, o.max_dim);
  inst.mu = random_mu(rng);
  const std::size_t n = uniform_index(rng, 1, o.max_points);
  for (std::size_t i = 0; i < n; ++i) {
    inst.points.push_back({"x" + std::to_string(i), random_rational(rng, o), random_phi(rng, o, inst.dim)});
  }
  inst.covers = random_covers(rng, n, o);
  return inst;
}

FiniteInstance random_strict_gap_instance(Rng& rng, const RandomInstanceOptions& o) {
  for (;;) {
    FiniteInstance inst;
    inst.name = "random-strict-gap";
    inst.dim = uniform_index(rng, 1, o.max_dim);
    inst.mu = random_mu(rng);
    const std::size_t n = uniform_index(rng, 2, o.max_points);
    inst.points.push_back({"x0", Rational(0), RVector(inst.dim, Rational(0))});
    inst.origin = 0;
    const bool shaped = std::bernoulli_distribution(0.75)(rng);
    for (std::size_t i = 1; i < n; ++i) {
      RVector phi = random_phi(rng, o, inst.dim);
      Rational I = random_rational(rng, o);
      // Shaped draws sit on or above the parabola I = -mu |Phi|^2.
      if (shaped) I = -inst.mu * dot(phi, phi) + abs(random_rational(rng, o)) * std::uniform_int_distribution<int>(0, 1)(rng);
      inst.points.push_back({"x" + std::to_string(i), std::move(I), std::move(phi)});
    }
    Rational inf_I = 0;
    Rational inf_pen = 0;
    for (std::size_t x = 0; x < n; ++x) {
      inf_I = std::min(inf_I, inst.points[x].I);
      inf_pen = std::min(inf_pen, penalized(inst, x));
    }
    if (!(inf_I < 0) || inf_pen < 0) continue;
    std::vector<FilteringCover> covers = random_covers(rng, n, o);
    // A chain through the origin, as in the hand example.
    Subset order = everything(n);
    std::shuffle(order.begin() + 1, order.end(), rng);
    std::vector<Subset> chain;
    for (std::size_t len = 1; len <= n; ++len) chain.emplace_back(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(len));
    covers.emplace_back(n, std::move(chain));
    inst.covers = std::move(covers);
    return inst;
  }
}

FiniteInstance random_symmetric_instance(Rng& rng, const RandomInstanceOptions& o) {
  FiniteInstance inst;
  inst.name = "random-symmetric";
  inst.dim = uniform_index(rng, 1, o.max_dim);
  inst.mu = random_mu(rng);
  const bool fixed_point = std::bernoulli_distribution(0.5)(rng);
  const std::size_t max_pairs = (o.max_points - (fixed_point ? 1 : 0)) / 2;
  const std::size_t pairs = uniform_index(rng, fixed_point ? 0 : 1, std::max<std::size_t>(1, max_pairs));
  std::vector<std::size_t> inv;
  if (fixed_point) {
    inst.points.push_back({"z", random_rational(rng, o), RVector(inst.dim, Rational(0))});
    inv.push_back(0);
  }
  for (std::size_t k = 0; k < pairs; ++k) {
    RVector phi = random_phi(rng, o, inst.dim);
    RVector neg(phi.size());
    for (std::size_t j = 0; j < phi.size(); ++j) neg[j] = -phi[j];
    const Rational I = random_rational(rng, o);
    const std::size_t a = inst.points.size();
    inst.points.push_back({"p" + std::to_string(k), I, std::move(phi)});
    inst.points.push_back({"m" + std::to_string(k), I, std::move(neg)});
    inv.push_back(a + 1);
    inv.push_back(a);
  }
  inst.involution = std::move(inv);
  inst.covers = random_covers(rng, inst.points.size(), o);
  return inst;
}

FiniteInstance two_point_instance() {
  FiniteInstance inst;
  inst.name = "two-point";
  inst.mu = 2;
  inst.dim = 1;
  inst.points = {{"x0", Rational(0), {Rational(0)}}, {"x1", Rational(-1), {Rational(1)}}};
  inst.origin = 0;
  inst.covers = {FilteringCover::trivial(2), FilteringCover(2, {{0}, {0, 1}})};
  return inst;
}

FiniteInstance symmetric_three_point_instance() {
  FiniteInstance inst;
  inst.name = "symmetric-three-point";
  inst.mu = 1;
  inst.dim = 1;
  for (int x : {-1, 0, 1}) inst.points.push_back({std::to_string(x), Rational(x * x), {Rational(x)}});
  inst.involution = std::vector<std::size_t>{2, 1, 0};
  inst.covers = {FilteringCover::trivial(3)};
  return inst;
}

}  // namespace varlab::minimax
