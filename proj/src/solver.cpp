#include "hgrd/solver.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>

namespace hgrd {

SymExprPtr seConst(long long value) {
  auto e = std::make_shared<SymExpr>();
  e->kind = SymExpr::Kind::Const;
  e->value = value;
  return e;
}

SymExprPtr seVar(VarId var) {
  auto e = std::make_shared<SymExpr>();
  e->kind = SymExpr::Kind::Var;
  e->var = var;
  return e;
}

static SymExprPtr seBin(SymExpr::Kind kind, SymExprPtr a, SymExprPtr b) {
  auto e = std::make_shared<SymExpr>();
  e->kind = kind;
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}

SymExprPtr seAdd(SymExprPtr a, SymExprPtr b) {
  return seBin(SymExpr::Kind::Add, std::move(a), std::move(b));
}
SymExprPtr seSub(SymExprPtr a, SymExprPtr b) {
  return seBin(SymExpr::Kind::Sub, std::move(a), std::move(b));
}
SymExprPtr seMul(SymExprPtr a, SymExprPtr b) {
  return seBin(SymExpr::Kind::Mul, std::move(a), std::move(b));
}
SymExprPtr seDiv(SymExprPtr a, long long divisor) {
  auto e = std::make_shared<SymExpr>();
  e->kind = SymExpr::Kind::Div;
  e->lhs = std::move(a);
  e->value = divisor;
  return e;
}
SymExprPtr seMod(SymExprPtr a, long long divisor) {
  auto e = std::make_shared<SymExpr>();
  e->kind = SymExpr::Kind::Mod;
  e->lhs = std::move(a);
  e->value = divisor;
  return e;
}

bool symExprEqual(const SymExpr &a, const SymExpr &b) {
  if (a.kind != b.kind)
    return false;
  switch (a.kind) {
  case SymExpr::Kind::Const:
    return a.value == b.value;
  case SymExpr::Kind::Var:
    return a.var == b.var;
  case SymExpr::Kind::Div:
  case SymExpr::Kind::Mod:
    return a.value == b.value && symExprEqual(*a.lhs, *b.lhs);
  default:
    return symExprEqual(*a.lhs, *b.lhs) && symExprEqual(*a.rhs, *b.rhs);
  }
}

namespace {

// Saturation bound keeps interval arithmetic far from long long overflow.
constexpr long long kSat = 1LL << 50;

long long clamp(long long v) { return std::clamp(v, -kSat, kSat); }

long long satMul(long long a, long long b) {
  long long r;
  if (__builtin_mul_overflow(a, b, &r))
    return (a > 0) == (b > 0) ? kSat : -kSat;
  return clamp(r);
}
long long satAdd(long long a, long long b) {
  long long r;
  if (__builtin_add_overflow(a, b, &r))
    return a > 0 ? kSat : -kSat;
  return clamp(r);
}

Interval addI(Interval a, Interval b) {
  return {satAdd(a.lo, b.lo), satAdd(a.hi, b.hi)};
}
Interval subI(Interval a, Interval b) {
  return {satAdd(a.lo, -b.hi), satAdd(a.hi, -b.lo)};
}
Interval mulI(Interval a, Interval b) {
  long long p1 = satMul(a.lo, b.lo), p2 = satMul(a.lo, b.hi);
  long long p3 = satMul(a.hi, b.lo), p4 = satMul(a.hi, b.hi);
  return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
}
// Truncating division by a positive constant is monotone in the dividend.
Interval divI(Interval a, long long c) { return {a.lo / c, a.hi / c}; }

Interval modI(Interval a, long long c) {
  if (a.singleton())
    return {a.lo % c, a.lo % c};
  if (a.lo >= 0 && a.lo / c == a.hi / c)
    return {a.lo % c, a.hi % c};
  if (a.hi <= 0 && a.lo / c == a.hi / c)
    return {a.lo % c, a.hi % c};
  long long lo = a.lo < 0 ? -(c - 1) : 0;
  long long hi = a.hi > 0 ? c - 1 : 0;
  return {lo, hi};
}

Interval intersect(Interval a, Interval b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

constexpr Interval kFull{-kSat, kSat};

long long floorDiv(long long a, long long b) {
  long long q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0)))
    --q;
  return q;
}
long long ceilDiv(long long a, long long b) {
  long long q = a / b;
  if (a % b != 0 && ((a < 0) == (b < 0)))
    ++q;
  return q;
}

class Engine {
public:
  Engine(const std::vector<Constraint> &constraints,
         const std::vector<VarDecl> &vars, const SolverBudget &budget)
      : constraints_(constraints), vars_(vars), budget_(budget) {
    domains_.reserve(vars.size());
    for (const auto &v : vars) {
      if (v.domain.empty())
        throw SolverError("variable '" + v.name + "' has an empty domain");
      domains_.push_back(v.domain);
    }
    for (const auto &c : constraints_) {
      checkVars(*c.lhs);
      checkVars(*c.rhs);
    }
    start_ = std::chrono::steady_clock::now();
  }

  SolveResult run() {
    SolveResult result;
    if (syntacticallyUnsat()) {
      result.status = SolveStatus::Unsat;
      return result;
    }
    if (!propagate()) {
      result.status = SolveStatus::Unsat;
      result.nodes = nodes_;
      return result;
    }
    Status s = search();
    result.nodes = nodes_;
    if (s == Status::Found) {
      result.status = SolveStatus::Sat;
      for (size_t i = 0; i < domains_.size(); ++i)
        result.model[static_cast<VarId>(i)] = domains_[i].lo;
      // Certificate check on every satisfiable answer.
      if (!verifyModel(constraints_, result.model))
        throw SolverError("internal: satisfying model failed verification");
    } else if (s == Status::Exhausted) {
      result.status = SolveStatus::Unsat;
    } else {
      result.status = SolveStatus::Unknown;
    }
    return result;
  }

private:
  enum class Status { Found, Exhausted, Budget };

  // Structural contradictions that interval reasoning cannot see, e.g. an
  // equality and an inequality over identical nonlinear terms.
  bool syntacticallyUnsat() const {
    auto sameSides = [](const Constraint &a, const Constraint &b) {
      return (symExprEqual(*a.lhs, *b.lhs) && symExprEqual(*a.rhs, *b.rhs)) ||
             (symExprEqual(*a.lhs, *b.rhs) && symExprEqual(*a.rhs, *b.lhs));
    };
    for (const auto &c : constraints_) {
      if ((c.rel == Rel::Ne || c.rel == Rel::Lt || c.rel == Rel::Gt) &&
          symExprEqual(*c.lhs, *c.rhs))
        return true;
      if (c.rel != Rel::Ne)
        continue;
      for (const auto &other : constraints_)
        if (other.rel == Rel::Eq && sameSides(c, other))
          return true;
    }
    return false;
  }

  void checkVars(const SymExpr &e) {
    if (e.kind == SymExpr::Kind::Var) {
      if (e.var < 0 || e.var >= static_cast<VarId>(vars_.size()))
        throw SolverError("constraint references unknown variable");
      return;
    }
    if (e.lhs)
      checkVars(*e.lhs);
    if (e.rhs)
      checkVars(*e.rhs);
  }

  Interval eval(const SymExpr &e) const {
    switch (e.kind) {
    case SymExpr::Kind::Const:
      return {e.value, e.value};
    case SymExpr::Kind::Var:
      return domains_[e.var];
    case SymExpr::Kind::Add:
      return addI(eval(*e.lhs), eval(*e.rhs));
    case SymExpr::Kind::Sub:
      return subI(eval(*e.lhs), eval(*e.rhs));
    case SymExpr::Kind::Mul:
      return mulI(eval(*e.lhs), eval(*e.rhs));
    case SymExpr::Kind::Div:
      return divI(eval(*e.lhs), e.value);
    case SymExpr::Kind::Mod:
      return modI(eval(*e.lhs), e.value);
    }
    return kFull;
  }

  // Narrows the variables under e so that e's value can lie in `want`.
  // Conservative: only removes values that provably cannot satisfy it.
  bool narrow(const SymExpr &e, Interval want) {
    want = intersect(want, kFull);
    if (want.empty())
      return false;
    switch (e.kind) {
    case SymExpr::Kind::Const:
      return want.contains(e.value);
    case SymExpr::Kind::Var: {
      Interval next = intersect(domains_[e.var], want);
      if (next.empty())
        return false;
      if (next.lo != domains_[e.var].lo || next.hi != domains_[e.var].hi) {
        domains_[e.var] = next;
        changed_ = true;
      }
      return true;
    }
    case SymExpr::Kind::Add:
      return narrow(*e.lhs, subI(want, eval(*e.rhs))) &&
             narrow(*e.rhs, subI(want, eval(*e.lhs)));
    case SymExpr::Kind::Sub:
      return narrow(*e.lhs, addI(want, eval(*e.rhs))) &&
             narrow(*e.rhs, subI(eval(*e.lhs), want));
    case SymExpr::Kind::Mul: {
      // Divide only by factor intervals of a single sign; widen by one to
      // absorb truncation.
      auto project = [&](const SymExpr &target, Interval factor) -> bool {
        if (factor.lo <= 0 && factor.hi >= 0)
          return true;
        long long q1 = want.lo / factor.lo, q2 = want.lo / factor.hi;
        long long q3 = want.hi / factor.lo, q4 = want.hi / factor.hi;
        Interval t{std::min({q1, q2, q3, q4}) - 1,
                   std::max({q1, q2, q3, q4}) + 1};
        return narrow(target, t);
      };
      return project(*e.lhs, eval(*e.rhs)) && project(*e.rhs, eval(*e.lhs));
    }
    case SymExpr::Kind::Div: {
      long long c = e.value;
      Interval t{satMul(want.lo, c) - (c - 1), satMul(want.hi, c) + (c - 1)};
      return narrow(*e.lhs, t);
    }
    case SymExpr::Kind::Mod: {
      Interval got = modI(eval(*e.lhs), e.value);
      return !intersect(got, want).empty();
    }
    }
    return true;
  }

  // --- linear-form propagation -------------------------------------------
  //
  // Expressions whose multiplications involve at least one compile-time or
  // singleton-domain factor flatten into sum(coef*var) + k. Shared variables
  // cancel exactly, which interval arithmetic alone cannot see, and the
  // per-variable narrowing is exact.

  std::optional<long long> constEval(const SymExpr &e) const {
    switch (e.kind) {
    case SymExpr::Kind::Const:
      return e.value;
    case SymExpr::Kind::Var:
      return domains_[e.var].singleton()
                 ? std::optional<long long>(domains_[e.var].lo)
                 : std::nullopt;
    case SymExpr::Kind::Add: {
      auto l = constEval(*e.lhs), r = constEval(*e.rhs);
      return l && r ? std::optional<long long>(satAdd(*l, *r)) : std::nullopt;
    }
    case SymExpr::Kind::Sub: {
      auto l = constEval(*e.lhs), r = constEval(*e.rhs);
      return l && r ? std::optional<long long>(satAdd(*l, -*r)) : std::nullopt;
    }
    case SymExpr::Kind::Mul: {
      auto l = constEval(*e.lhs), r = constEval(*e.rhs);
      return l && r ? std::optional<long long>(satMul(*l, *r)) : std::nullopt;
    }
    case SymExpr::Kind::Div: {
      auto l = constEval(*e.lhs);
      return l ? std::optional<long long>(*l / e.value) : std::nullopt;
    }
    case SymExpr::Kind::Mod: {
      auto l = constEval(*e.lhs);
      return l ? std::optional<long long>(*l % e.value) : std::nullopt;
    }
    }
    return std::nullopt;
  }

  bool linearize(const SymExpr &e, long long mult,
                 std::map<VarId, long long> &terms, long long &k) const {
    if (mult == 0)
      return true;
    if (std::llabs(mult) >= kSat)
      return false;
    switch (e.kind) {
    case SymExpr::Kind::Const:
      k = satAdd(k, satMul(mult, e.value));
      return true;
    case SymExpr::Kind::Var:
      if (domains_[e.var].singleton()) {
        k = satAdd(k, satMul(mult, domains_[e.var].lo));
      } else {
        terms[e.var] += mult;
      }
      return true;
    case SymExpr::Kind::Add:
      return linearize(*e.lhs, mult, terms, k) &&
             linearize(*e.rhs, mult, terms, k);
    case SymExpr::Kind::Sub:
      return linearize(*e.lhs, mult, terms, k) &&
             linearize(*e.rhs, -mult, terms, k);
    case SymExpr::Kind::Mul:
      if (auto c = constEval(*e.lhs))
        return linearize(*e.rhs, satMul(mult, *c), terms, k);
      if (auto c = constEval(*e.rhs))
        return linearize(*e.lhs, satMul(mult, *c), terms, k);
      return false;
    case SymExpr::Kind::Div:
    case SymExpr::Kind::Mod:
      if (auto c = constEval(e)) {
        k = satAdd(k, satMul(mult, *c));
        return true;
      }
      return false;
    }
    return false;
  }

  // Revises `form REL 0`; true plus narrowed domains, false on conflict.
  bool reviseLinearForm(const std::vector<std::pair<VarId, long long>> &terms,
                        long long k, Rel rel) {
    long long lo = k, hi = k;
    bool saturated = std::llabs(k) >= kSat;
    for (const auto &[v, a] : terms) {
      const Interval &d = domains_[v];
      long long tLo = a > 0 ? satMul(a, d.lo) : satMul(a, d.hi);
      long long tHi = a > 0 ? satMul(a, d.hi) : satMul(a, d.lo);
      saturated = saturated || std::llabs(tLo) >= kSat ||
                  std::llabs(tHi) >= kSat;
      lo = satAdd(lo, tLo);
      hi = satAdd(hi, tHi);
    }
    // With clamped magnitudes the running bounds stay valid for the
    // feasibility checks below (clamping lands at +-kSat, far from zero),
    // but per-term rests are not; narrowing is skipped then.
    switch (rel) {
    case Rel::Eq:
      if (lo > 0 || hi < 0)
        return false;
      break;
    case Rel::Ne:
      if (lo == 0 && hi == 0)
        return false;
      break;
    case Rel::Lt:
      if (lo >= 0)
        return false;
      break;
    case Rel::Le:
      if (lo > 0)
        return false;
      break;
    case Rel::Gt:
      if (hi <= 0)
        return false;
      break;
    case Rel::Ge:
      if (hi < 0)
        return false;
      break;
    }
    if (rel == Rel::Ne) {
      // Narrow only the single-variable shape: v != value.
      if (terms.size() == 1 && !saturated) {
        auto [v, a] = terms[0];
        if ((-k) % a == 0)
          if (!clipValue(v, (-k) / a))
            return false;
      }
      return true;
    }
    if (saturated)
      return true;
    for (const auto &[v, a] : terms) {
      const Interval &d = domains_[v];
      long long termLo = a > 0 ? satMul(a, d.lo) : satMul(a, d.hi);
      long long termHi = a > 0 ? satMul(a, d.hi) : satMul(a, d.lo);
      long long restLo = satAdd(lo, -termLo);
      long long restHi = satAdd(hi, -termHi);
      // Allowed range of a*v given the relation and the rest's range.
      long long prodLo = -kSat, prodHi = kSat;
      switch (rel) {
      case Rel::Eq:
        prodLo = satAdd(0, -restHi);
        prodHi = satAdd(0, -restLo);
        break;
      case Rel::Lt:
        prodHi = satAdd(-restLo, -1);
        break;
      case Rel::Le:
        prodHi = -restLo;
        break;
      case Rel::Gt:
        prodLo = satAdd(-restHi, 1);
        break;
      case Rel::Ge:
        prodLo = -restHi;
        break;
      default:
        break;
      }
      Interval want = a > 0 ? Interval{ceilDiv(prodLo, a), floorDiv(prodHi, a)}
                            : Interval{ceilDiv(prodHi, a), floorDiv(prodLo, a)};
      Interval next = intersect(domains_[v], want);
      if (next.empty())
        return false;
      if (next.lo != domains_[v].lo || next.hi != domains_[v].hi) {
        domains_[v] = next;
        changed_ = true;
        // Recompute the running bounds with the narrowed domain.
        long long newLo = a > 0 ? satMul(a, next.lo) : satMul(a, next.hi);
        long long newHi = a > 0 ? satMul(a, next.hi) : satMul(a, next.lo);
        lo = satAdd(restLo, newLo);
        hi = satAdd(restHi, newHi);
      }
    }
    return true;
  }

  bool clipValue(VarId v, long long value) {
    Interval &d = domains_[v];
    if (d.singleton())
      return d.lo != value;
    if (d.lo == value) {
      ++d.lo;
      changed_ = true;
    } else if (d.hi == value) {
      --d.hi;
      changed_ = true;
    }
    return !d.empty();
  }

  bool revise(const Constraint &c) {
    {
      std::map<VarId, long long> termMap;
      long long k = 0;
      if (linearize(*c.lhs, 1, termMap, k) &&
          linearize(*c.rhs, -1, termMap, k)) {
        std::vector<std::pair<VarId, long long>> terms;
        for (const auto &[v, a] : termMap)
          if (a != 0)
            terms.emplace_back(v, a);
        return reviseLinearForm(terms, k, c.rel);
      }
    }
    Interval l = eval(*c.lhs);
    Interval r = eval(*c.rhs);
    switch (c.rel) {
    case Rel::Eq: {
      Interval t = intersect(l, r);
      if (t.empty())
        return false;
      return narrow(*c.lhs, t) && narrow(*c.rhs, t);
    }
    case Rel::Ne:
      if (l.singleton() && r.singleton() && l.lo == r.lo)
        return false;
      if (r.singleton())
        if (!clipEndpoint(*c.lhs, r.lo))
          return false;
      if (l.singleton())
        if (!clipEndpoint(*c.rhs, l.lo))
          return false;
      return true;
    case Rel::Lt:
      return narrow(*c.lhs, Interval{-kSat, r.hi - 1}) &&
             narrow(*c.rhs, Interval{l.lo + 1, kSat});
    case Rel::Le:
      return narrow(*c.lhs, Interval{-kSat, r.hi}) &&
             narrow(*c.rhs, Interval{l.lo, kSat});
    case Rel::Gt:
      return narrow(*c.lhs, Interval{r.lo + 1, kSat}) &&
             narrow(*c.rhs, Interval{-kSat, l.hi - 1});
    case Rel::Ge:
      return narrow(*c.lhs, Interval{r.lo, kSat}) &&
             narrow(*c.rhs, Interval{-kSat, l.hi});
    }
    return true;
  }

  // For x != v: when the expression is a bare variable, clip v off a
  // domain endpoint.
  bool clipEndpoint(const SymExpr &e, long long v) {
    if (e.kind != SymExpr::Kind::Var)
      return true;
    Interval &d = domains_[e.var];
    if (d.singleton())
      return d.lo != v;
    if (d.lo == v) {
      ++d.lo;
      changed_ = true;
    } else if (d.hi == v) {
      --d.hi;
      changed_ = true;
    }
    return !d.empty();
  }

  bool propagate() {
    for (int round = 0; round < 64; ++round) {
      changed_ = false;
      for (const auto &c : constraints_)
        if (!revise(c))
          return false;
      if (!changed_)
        return true;
    }
    return true;
  }

  bool overBudget() {
    if (nodes_ >= budget_.maxNodes)
      return true;
    if ((nodes_ & 1023) == 0) {
      auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start_)
                         .count();
      if (elapsed >= budget_.maxMillis)
        return true;
    }
    return false;
  }

  int pickVariable() const {
    int best = -1;
    long long bestWidth = 0;
    for (size_t i = 0; i < domains_.size(); ++i) {
      long long w = domains_[i].width();
      if (w <= 1)
        continue;
      if (best < 0 || w < bestWidth) {
        best = static_cast<int>(i);
        bestWidth = w;
      }
    }
    return best;
  }

  Status search() {
    int var = pickVariable();
    if (var < 0)
      return Status::Found; // all singleton and propagation accepted them
    std::vector<Interval> saved = domains_;
    for (long long v = saved[var].lo; v <= saved[var].hi; ++v) {
      ++nodes_;
      if (overBudget())
        return Status::Budget;
      domains_ = saved;
      domains_[var] = {v, v};
      if (!propagate())
        continue;
      Status s = search();
      if (s != Status::Exhausted)
        return s;
    }
    domains_ = saved;
    return Status::Exhausted;
  }

  const std::vector<Constraint> &constraints_;
  const std::vector<VarDecl> &vars_;
  SolverBudget budget_;
  std::vector<Interval> domains_;
  bool changed_ = false;
  long long nodes_ = 0;
  std::chrono::steady_clock::time_point start_;
};

} // namespace

SolveResult solve(const std::vector<Constraint> &constraints,
                  const std::vector<VarDecl> &vars,
                  const SolverBudget &budget) {
  Engine engine(constraints, vars, budget);
  return engine.run();
}

long long evalSymExpr(const SymExpr &e, const Model &model) {
  switch (e.kind) {
  case SymExpr::Kind::Const:
    return e.value;
  case SymExpr::Kind::Var: {
    auto it = model.find(e.var);
    if (it == model.end())
      throw SolverError("model does not assign a referenced variable");
    return it->second;
  }
  case SymExpr::Kind::Add:
    return evalSymExpr(*e.lhs, model) + evalSymExpr(*e.rhs, model);
  case SymExpr::Kind::Sub:
    return evalSymExpr(*e.lhs, model) - evalSymExpr(*e.rhs, model);
  case SymExpr::Kind::Mul:
    return evalSymExpr(*e.lhs, model) * evalSymExpr(*e.rhs, model);
  case SymExpr::Kind::Div:
    return evalSymExpr(*e.lhs, model) / e.value;
  case SymExpr::Kind::Mod:
    return evalSymExpr(*e.lhs, model) % e.value;
  }
  return 0;
}

bool satisfies(const Constraint &c, const Model &model) {
  long long l = evalSymExpr(*c.lhs, model);
  long long r = evalSymExpr(*c.rhs, model);
  switch (c.rel) {
  case Rel::Eq:
    return l == r;
  case Rel::Ne:
    return l != r;
  case Rel::Lt:
    return l < r;
  case Rel::Le:
    return l <= r;
  case Rel::Gt:
    return l > r;
  case Rel::Ge:
    return l >= r;
  }
  return false;
}

bool verifyModel(const std::vector<Constraint> &constraints,
                 const Model &model) {
  for (const auto &c : constraints)
    if (!satisfies(c, model))
      return false;
  return true;
}

std::string symExprText(const SymExpr &e, const std::vector<VarDecl> &vars) {
  std::ostringstream os;
  switch (e.kind) {
  case SymExpr::Kind::Const:
    os << e.value;
    break;
  case SymExpr::Kind::Var:
    if (e.var >= 0 && e.var < static_cast<VarId>(vars.size()))
      os << vars[e.var].name;
    else
      os << "v" << e.var;
    break;
  case SymExpr::Kind::Add:
    os << "(+ " << symExprText(*e.lhs, vars) << " " << symExprText(*e.rhs, vars)
       << ")";
    break;
  case SymExpr::Kind::Sub:
    os << "(- " << symExprText(*e.lhs, vars) << " " << symExprText(*e.rhs, vars)
       << ")";
    break;
  case SymExpr::Kind::Mul:
    os << "(* " << symExprText(*e.lhs, vars) << " " << symExprText(*e.rhs, vars)
       << ")";
    break;
  case SymExpr::Kind::Div:
    os << "(/ " << symExprText(*e.lhs, vars) << " " << e.value << ")";
    break;
  case SymExpr::Kind::Mod:
    os << "(% " << symExprText(*e.lhs, vars) << " " << e.value << ")";
    break;
  }
  return os.str();
}

std::string dumpConstraints(const std::vector<Constraint> &constraints,
                            const std::vector<VarDecl> &vars) {
  std::ostringstream os;
  for (const auto &v : vars)
    os << "(var " << v.name << " [" << v.domain.lo << " " << v.domain.hi
       << "])\n";
  for (const auto &c : constraints) {
    const char *rel = c.rel == Rel::Eq   ? "=="
                      : c.rel == Rel::Ne ? "!="
                      : c.rel == Rel::Lt ? "<"
                      : c.rel == Rel::Le ? "<="
                      : c.rel == Rel::Gt ? ">"
                                         : ">=";
    os << "(" << rel << " " << symExprText(*c.lhs, vars) << " "
       << symExprText(*c.rhs, vars);
    if (!c.tag.empty())
      os << " ; " << c.tag;
    os << ")\n";
  }
  return os.str();
}

} // namespace hgrd
