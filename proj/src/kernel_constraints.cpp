#include "hgrd/constraints.hpp"

#include <cassert>
#include <functional>
#include <optional>

namespace hgrd {

VarId SolverContext::newVar(const std::string &name, Interval domain) {
  VarId id = static_cast<VarId>(vars.size());
  vars.push_back(VarDecl{name, domain});
  return id;
}

VarId SolverContext::hostVar(const DefKey &key) {
  auto it = hostVars.find(key);
  if (it != hostVars.end())
    return it->second;
  std::string name = key.name.empty() ? "h" : key.name;
  name += "@" + std::to_string(key.site);
  if (key.aux)
    name += "." + std::to_string(key.aux);
  VarId id = newVar(name, defaultDomain());
  hostVars[key] = id;
  return id;
}

void SolverContext::widenDomain(VarId var, long long hi) {
  if (vars[var].domain.hi < hi)
    vars[var].domain.hi = hi;
}

namespace {

const char *axisSuffix(int d) { return d == 0 ? "x" : d == 1 ? "y" : "z"; }

} // namespace

SolverContext makeContext(const KernelDecl &kernel,
                          const AnalyzerOptions &opts) {
  SolverContext ctx;
  ctx.opts = opts;
  long long maxG = opts.maxGrid;
  long long maxB = opts.maxBlock;
  for (int d = 0; d < 3; ++d) {
    ctx.gridDim[d] = ctx.newVar(std::string("gridDim.") + axisSuffix(d),
                                Interval{1, maxG});
    ctx.blockDim[d] = ctx.newVar(std::string("blockDim.") + axisSuffix(d),
                                 Interval{1, maxB});
  }
  for (int i = 0; i < 2; ++i) {
    std::string inst = "#" + std::to_string(i + 1);
    for (int d = 0; d < 3; ++d) {
      ctx.blockIdx[i][d] =
          ctx.newVar(std::string("blockIdx.") + axisSuffix(d) + inst,
                     Interval{0, maxG - 1});
      ctx.threadIdx[i][d] =
          ctx.newVar(std::string("threadIdx.") + axisSuffix(d) + inst,
                     Interval{0, maxB - 1});
    }
    ctx.linearId[i] =
        ctx.newVar("id" + inst, Interval{0, maxB * maxB * maxB - 1});
    ctx.warpId[i] = ctx.newVar(
        "wp" + inst, Interval{0, (maxB * maxB * maxB) / opts.warpSize});
  }
  for (const auto &p : kernel.params)
    if (p.type == ParamType::Int)
      ctx.params[p.name] = ctx.newVar(p.name, ctx.defaultDomain());

  // Builtin bounds hold in every execution regardless of host analysis.
  for (int i = 0; i < 2; ++i) {
    for (int d = 0; d < 3; ++d) {
      ctx.base.push_back(makeConstraint(seVar(ctx.blockIdx[i][d]), Rel::Ge,
                                        seConst(0), "builtin-bounds"));
      ctx.base.push_back(makeConstraint(seVar(ctx.blockIdx[i][d]), Rel::Lt,
                                        seVar(ctx.gridDim[d]),
                                        "builtin-bounds"));
      ctx.base.push_back(makeConstraint(seVar(ctx.threadIdx[i][d]), Rel::Ge,
                                        seConst(0), "builtin-bounds"));
      ctx.base.push_back(makeConstraint(seVar(ctx.threadIdx[i][d]), Rel::Lt,
                                        seVar(ctx.blockDim[d]),
                                        "builtin-bounds"));
    }
    // id = threadIdx.x + threadIdx.y*blockDim.x + threadIdx.z*blockDim.x*blockDim.y
    SymExprPtr id = seAdd(
        seVar(ctx.threadIdx[i][0]),
        seAdd(seMul(seVar(ctx.threadIdx[i][1]), seVar(ctx.blockDim[0])),
              seMul(seVar(ctx.threadIdx[i][2]),
                    seMul(seVar(ctx.blockDim[0]), seVar(ctx.blockDim[1])))));
    ctx.base.push_back(
        makeConstraint(seVar(ctx.linearId[i]), Rel::Eq, id, "id-def"));
    ctx.base.push_back(makeConstraint(seVar(ctx.linearId[i]), Rel::Ge,
                                      seConst(0), "id-bounds"));
    ctx.base.push_back(makeConstraint(
        seVar(ctx.linearId[i]), Rel::Lt,
        seMul(seVar(ctx.blockDim[0]),
              seMul(seVar(ctx.blockDim[1]), seVar(ctx.blockDim[2]))),
        "id-bounds"));
    ctx.base.push_back(makeConstraint(
        seVar(ctx.warpId[i]), Rel::Eq,
        seDiv(seVar(ctx.linearId[i]), opts.warpSize), "warp-def"));
  }
  return ctx;
}

namespace {

// Rewrites kernel expressions for one access instance, walking the kernel
// body with inlined straight-line assignments.
class InstanceRewriter {
public:
  InstanceRewriter(SolverContext &ctx, const KernelDecl &kernel, int instance)
      : ctx_(ctx), kernel_(kernel), instance_(instance) {}

  std::pair<SymExprPtr, std::vector<Constraint>>
  rewrite(const Access &access) {
    target_ = &access;
    walkBody(kernel_.body);
    assert(result_ && "access statement not found in its kernel");
    return std::move(*result_);
  }

private:
  std::string freshName(const std::string &hint) {
    return hint + "#" + std::to_string(instance_) + "." +
           std::to_string(++ctx_.freshCount);
  }

  SymExprPtr freshVar(const std::string &hint) {
    return seVar(ctx_.newVar(freshName(hint), ctx_.defaultDomain()));
  }

  SymExprPtr convert(const Expr &expr) {
    if (expr.is<IntLit>())
      return seConst(expr.as<IntLit>().value);
    if (expr.is<VarRef>()) {
      const auto &name = expr.as<VarRef>().name;
      auto pit = ctx_.params.find(name);
      if (pit != ctx_.params.end())
        return seVar(pit->second);
      auto lit = locals_.find(name);
      if (lit != locals_.end())
        return lit->second;
      // Unknown local (merged away at a join): fresh bounded value.
      SymExprPtr v = freshVar(name);
      locals_[name] = v;
      return v;
    }
    if (expr.is<BuiltinRef>()) {
      const auto &b = expr.as<BuiltinRef>();
      int d = static_cast<int>(b.axis);
      switch (b.builtin) {
      case BuiltinVar::ThreadIdx:
        return seVar(ctx_.threadIdx[instance_ - 1][d]);
      case BuiltinVar::BlockIdx:
        return seVar(ctx_.blockIdx[instance_ - 1][d]);
      case BuiltinVar::BlockDim:
        return seVar(ctx_.blockDim[d]);
      case BuiltinVar::GridDim:
        return seVar(ctx_.gridDim[d]);
      }
    }
    if (expr.is<ArrayLoad>()) {
      // An address that depends on array contents is a fresh bounded value.
      return freshVar("mem." + expr.as<ArrayLoad>().array);
    }
    const auto &b = expr.as<BinaryExpr>();
    switch (b.op) {
    case BinOp::Add:
      return seAdd(convert(*b.lhs), convert(*b.rhs));
    case BinOp::Sub:
      return seSub(convert(*b.lhs), convert(*b.rhs));
    case BinOp::Mul:
      return seMul(convert(*b.lhs), convert(*b.rhs));
    case BinOp::Div:
      return seDiv(convert(*b.lhs), b.rhs->as<IntLit>().value);
    case BinOp::Mod:
      return seMod(convert(*b.lhs), b.rhs->as<IntLit>().value);
    default:
      // A comparison used as an arithmetic value: bounded unknown.
      return freshVar("bool");
    }
  }

  // Converts a guard into conjunctive relations; nullopt when the guard has
  // no conjunctive form (dropped, which only over-approximates).
  std::optional<std::vector<Constraint>> guardRelations(const Expr &expr,
                                                        bool negated) {
    if (expr.is<BinaryExpr>()) {
      const auto &b = expr.as<BinaryExpr>();
      if ((b.op == BinOp::And && !negated) ||
          (b.op == BinOp::Or && negated)) {
        auto l = guardRelations(*b.lhs, negated);
        auto r = guardRelations(*b.rhs, negated);
        if (!l || !r)
          return std::nullopt;
        l->insert(l->end(), r->begin(), r->end());
        return l;
      }
      if (b.op == BinOp::And || b.op == BinOp::Or)
        return std::nullopt; // disjunctive shape
      Rel rel;
      switch (b.op) {
      case BinOp::Lt:
        rel = negated ? Rel::Ge : Rel::Lt;
        break;
      case BinOp::Le:
        rel = negated ? Rel::Gt : Rel::Le;
        break;
      case BinOp::Gt:
        rel = negated ? Rel::Le : Rel::Gt;
        break;
      case BinOp::Ge:
        rel = negated ? Rel::Lt : Rel::Ge;
        break;
      case BinOp::Eq:
        rel = negated ? Rel::Ne : Rel::Eq;
        break;
      case BinOp::Ne:
        rel = negated ? Rel::Eq : Rel::Ne;
        break;
      default:
        return std::nullopt;
      }
      std::vector<Constraint> out;
      out.push_back(makeConstraint(convert(*b.lhs), rel, convert(*b.rhs),
                                   "guard#" + std::to_string(instance_)));
      return out;
    }
    return std::nullopt;
  }

  bool stmtContainsTarget(const Stmt &stmt) const {
    return &stmt == target_->stmt;
  }

  void capture() {
    result_ = std::make_pair(convert(*target_->indexExpr), path_);
  }

  bool walkBody(const StmtList &stmts) {
    for (const auto &stmt : stmts)
      if (walkStmt(*stmt))
        return true;
    return false;
  }

  bool walkStmt(const Stmt &stmt) {
    if (stmtContainsTarget(stmt)) {
      capture();
      return true;
    }
    if (stmt.is<AssignStmt>()) {
      const auto &a = stmt.as<AssignStmt>();
      if (a.value)
        locals_[a.name] = convert(*a.value);
      else
        locals_[a.name] = freshVar(a.name);
      return false;
    }
    if (stmt.is<IfStmt>()) {
      const auto &s = stmt.as<IfStmt>();
      size_t mark = path_.size();
      auto locals = locals_;

      auto pos = guardRelations(*s.cond, false);
      if (pos)
        path_.insert(path_.end(), pos->begin(), pos->end());
      if (walkBody(s.thenBody))
        return true;
      path_.resize(mark);
      auto thenLocals = std::move(locals_);

      locals_ = locals;
      auto neg = guardRelations(*s.cond, true);
      if (neg)
        path_.insert(path_.end(), neg->begin(), neg->end());
      if (walkBody(s.elseBody))
        return true;
      path_.resize(mark);
      auto elseLocals = std::move(locals_);

      // Joins discard branch facts: values agreeing structurally survive,
      // anything else becomes a fresh bounded value.
      locals_.clear();
      for (const auto &[name, value] : thenLocals) {
        auto it = elseLocals.find(name);
        if (it != elseLocals.end() && symExprEqual(*value, *it->second))
          locals_[name] = value;
        else
          locals_[name] = freshVar(name);
      }
      for (const auto &[name, value] : elseLocals)
        if (!locals_.count(name))
          locals_[name] = freshVar(name);
      return false;
    }
    if (stmt.is<ForStmt>()) {
      const auto &s = stmt.as<ForStmt>();
      SymExprPtr lower = convert(*s.init);
      SymExprPtr upper = convert(*s.bound);
      // Two instances of one access may sit in different iterations, so the
      // iterator is a fresh bounded variable per instance.
      SymExprPtr iter = freshVar(s.iter);
      size_t mark = path_.size();
      path_.push_back(makeConstraint(iter, Rel::Ge, lower, "loop-bound"));
      path_.push_back(makeConstraint(
          iter, s.inclusiveBound ? Rel::Le : Rel::Lt, upper, "loop-bound"));
      auto saved = locals_;
      for (const auto &name : assignedNames(s.body))
        if (name != s.iter)
          locals_[name] = freshVar(name);
      locals_[s.iter] = iter;
      if (walkBody(s.body))
        return true;
      path_.resize(mark);
      locals_ = std::move(saved);
      for (const auto &name : assignedNames(s.body))
        locals_[name] = freshVar(name);
      locals_[s.iter] = freshVar(s.iter);
      return false;
    }
    return false;
  }

  SolverContext &ctx_;
  const KernelDecl &kernel_;
  int instance_;
  const Access *target_ = nullptr;
  std::map<std::string, SymExprPtr> locals_;
  std::vector<Constraint> path_;
  std::optional<std::pair<SymExprPtr, std::vector<Constraint>>> result_;
};

SymExprPtr blockLinear(const SolverContext &ctx, int instance) {
  int i = instance - 1;
  return seAdd(
      seVar(ctx.blockIdx[i][0]),
      seAdd(seMul(seVar(ctx.blockIdx[i][1]), seVar(ctx.gridDim[0])),
            seMul(seVar(ctx.blockIdx[i][2]),
                  seMul(seVar(ctx.gridDim[0]), seVar(ctx.gridDim[1])))));
}

} // namespace

std::pair<SymExprPtr, std::vector<Constraint>>
symbolicAddress(const Access &access, int instance, SolverContext &ctx,
                const KernelDecl &kernel) {
  InstanceRewriter rewriter(ctx, kernel, instance);
  return rewriter.rewrite(access);
}

std::vector<Constraint> emitIdentityConstraints(const AccessPair &pair,
                                                RaceKind kind,
                                                SolverContext &ctx,
                                                SymExprPtr addr1,
                                                SymExprPtr addr2) {
  (void)pair;
  std::vector<Constraint> out;
  out.push_back(
      makeConstraint(std::move(addr1), Rel::Eq, std::move(addr2), "addr"));
  switch (kind) {
  case RaceKind::InterBlock:
    // Block triples differ on some axis; with the bounds constraints in
    // force the row-major linearization is injective, so a single
    // inequality expresses it.
    out.push_back(makeConstraint(blockLinear(ctx, 1), Rel::Ne,
                                 blockLinear(ctx, 2), "tb-differs"));
    break;
  case RaceKind::IntraBlock:
    for (int d = 0; d < 3; ++d)
      out.push_back(makeConstraint(seVar(ctx.blockIdx[0][d]), Rel::Eq,
                                   seVar(ctx.blockIdx[1][d]), "tb-equal"));
    out.push_back(makeConstraint(seVar(ctx.linearId[0]), Rel::Ne,
                                 seVar(ctx.linearId[1]), "id-differs"));
    out.push_back(makeConstraint(seVar(ctx.warpId[0]), Rel::Ne,
                                 seVar(ctx.warpId[1]), "wp-differs"));
    break;
  case RaceKind::IntraWarp:
    for (int d = 0; d < 3; ++d)
      out.push_back(makeConstraint(seVar(ctx.blockIdx[0][d]), Rel::Eq,
                                   seVar(ctx.blockIdx[1][d]), "tb-equal"));
    out.push_back(makeConstraint(seVar(ctx.linearId[0]), Rel::Ne,
                                 seVar(ctx.linearId[1]), "id-differs"));
    out.push_back(makeConstraint(seVar(ctx.warpId[0]), Rel::Eq,
                                 seVar(ctx.warpId[1]), "wp-equal"));
    break;
  }
  return out;
}

} // namespace hgrd
