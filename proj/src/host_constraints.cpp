#include "hgrd/constraints.hpp"

#include <optional>

namespace hgrd {

namespace {

struct EtConversionError {};

// ETs hold arithmetic once asserts are peeled down to comparisons; anything
// else has no symbolic form and the caller drops that constraint.
SymExprPtr etToSymExpr(const ET &et, SolverContext &ctx) {
  switch (et.kind) {
  case ET::Kind::Constant:
    return seConst(et.value);
  case ET::Kind::Unknown:
    return seVar(ctx.hostVar(et.origin));
  case ET::Kind::Binary: {
    switch (et.op) {
    case BinOp::Add:
      return seAdd(etToSymExpr(*et.lhs, ctx), etToSymExpr(*et.rhs, ctx));
    case BinOp::Sub:
      return seSub(etToSymExpr(*et.lhs, ctx), etToSymExpr(*et.rhs, ctx));
    case BinOp::Mul:
      return seMul(etToSymExpr(*et.lhs, ctx), etToSymExpr(*et.rhs, ctx));
    case BinOp::Div:
      if (et.rhs->kind != ET::Kind::Constant || et.rhs->value <= 0)
        throw EtConversionError{};
      return seDiv(etToSymExpr(*et.lhs, ctx), et.rhs->value);
    case BinOp::Mod:
      if (et.rhs->kind != ET::Kind::Constant || et.rhs->value <= 0)
        throw EtConversionError{};
      return seMod(etToSymExpr(*et.lhs, ctx), et.rhs->value);
    default:
      throw EtConversionError{};
    }
  }
  case ET::Kind::Bounds:
    throw EtConversionError{};
  }
  throw EtConversionError{};
}

std::optional<std::vector<Constraint>>
etBoolConstraints(const ET &et, SolverContext &ctx, bool negated,
                  const std::string &tag) {
  if (et.kind != ET::Kind::Binary)
    return std::nullopt;
  if ((et.op == BinOp::And && !negated) || (et.op == BinOp::Or && negated)) {
    auto l = etBoolConstraints(*et.lhs, ctx, negated, tag);
    auto r = etBoolConstraints(*et.rhs, ctx, negated, tag);
    if (!l || !r)
      return std::nullopt;
    l->insert(l->end(), r->begin(), r->end());
    return l;
  }
  if (et.op == BinOp::And || et.op == BinOp::Or)
    return std::nullopt;
  Rel rel;
  switch (et.op) {
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
  try {
    std::vector<Constraint> out;
    out.push_back(makeConstraint(etToSymExpr(*et.lhs, ctx), rel,
                                 etToSymExpr(*et.rhs, ctx), tag));
    return out;
  } catch (const EtConversionError &) {
    return std::nullopt;
  }
}

// When an ET evaluates to a compile-time constant, return it. Used to widen
// dimension domains for launches with large constant dimensions.
std::optional<long long> etConstantValue(const ET &et) {
  if (et.kind == ET::Kind::Constant)
    return et.value;
  if (et.kind == ET::Kind::Binary) {
    auto l = etConstantValue(*et.lhs);
    auto r = etConstantValue(*et.rhs);
    if (!l || !r)
      return std::nullopt;
    switch (et.op) {
    case BinOp::Add:
      return *l + *r;
    case BinOp::Sub:
      return *l - *r;
    case BinOp::Mul:
      return *l * *r;
    case BinOp::Div:
      return *r > 0 ? std::optional<long long>(*l / *r) : std::nullopt;
    case BinOp::Mod:
      return *r > 0 ? std::optional<long long>(*l % *r) : std::nullopt;
    default:
      return std::nullopt;
    }
  }
  return std::nullopt;
}

} // namespace

std::vector<Constraint> emitHostConstraints(const HostFacts &facts,
                                            const LaunchFacts &launch,
                                            const KernelDecl &kernel,
                                            SolverContext &ctx) {
  std::vector<Constraint> out;
  if (!ctx.opts.hostAnalysis)
    return out;

  // Asserts on the path to the launch must hold in every execution.
  for (size_t idx : launch.activeAsserts) {
    auto cs = etBoolConstraints(*facts.asserts[idx], ctx, false, "assert");
    if (cs)
      out.insert(out.end(), cs->begin(), cs->end());
  }

  // Launch dimensions bound the thread identity variables of both
  // access instances.
  for (int d = 0; d < 3; ++d) {
    const ET &gridEt = *launch.gridDimETs[d];
    const ET &blockEt = *launch.blockDimETs[d];
    try {
      SymExprPtr g = etToSymExpr(gridEt, ctx);
      if (auto c = etConstantValue(gridEt)) {
        ctx.widenDomain(ctx.gridDim[d], *c);
        ctx.widenDomain(ctx.blockIdx[0][d], *c - 1);
        ctx.widenDomain(ctx.blockIdx[1][d], *c - 1);
      }
      out.push_back(
          makeConstraint(seVar(ctx.gridDim[d]), Rel::Eq, g, "grid-dim"));
      for (int i = 0; i < 2; ++i)
        out.push_back(makeConstraint(seVar(ctx.blockIdx[i][d]), Rel::Lt, g,
                                     "grid-dim"));
    } catch (const EtConversionError &) {
      // Unknown dimension shape: the default domains stay in force.
    }
    try {
      SymExprPtr b = etToSymExpr(blockEt, ctx);
      if (auto c = etConstantValue(blockEt)) {
        ctx.widenDomain(ctx.blockDim[d], *c);
        ctx.widenDomain(ctx.threadIdx[0][d], *c - 1);
        ctx.widenDomain(ctx.threadIdx[1][d], *c - 1);
      }
      out.push_back(
          makeConstraint(seVar(ctx.blockDim[d]), Rel::Eq, b, "block-dim"));
      for (int i = 0; i < 2; ++i)
        out.push_back(makeConstraint(seVar(ctx.threadIdx[i][d]), Rel::Lt, b,
                                     "block-dim"));
    } catch (const EtConversionError &) {
    }
  }

  // Per scalar kernel parameter: value bindings, loop-iterator bounds, and
  // allocation-size positivity. Relations among parameters ride the shared
  // hostVar map inside etToSymExpr.
  for (size_t i = 0; i < kernel.params.size() && i < launch.argETs.size();
       ++i) {
    if (kernel.params[i].type != ParamType::Int)
      continue;
    VarId pv = ctx.params.at(kernel.params[i].name);
    const ET &et = *launch.argETs[i];
    if (et.kind == ET::Kind::Bounds) {
      // The argument ranges over the host loop's bounds.
      try {
        out.push_back(makeConstraint(seVar(pv), Rel::Ge,
                                     etToSymExpr(*et.minEt, ctx),
                                     "loop-bound"));
        out.push_back(makeConstraint(seVar(pv),
                                     et.inclusiveMax ? Rel::Le : Rel::Lt,
                                     etToSymExpr(*et.maxEt, ctx),
                                     "loop-bound"));
      } catch (const EtConversionError &) {
      }
    } else {
      try {
        out.push_back(
            makeConstraint(seVar(pv), Rel::Eq, etToSymExpr(et, ctx), "arg"));
      } catch (const EtConversionError &) {
      }
    }
    // Parameters derived from allocation-sizing variables are positive.
    for (const auto &origin : et.originVars) {
      if (facts.allocVars.count(origin)) {
        out.push_back(
            makeConstraint(seVar(pv), Rel::Gt, seConst(0), "alloc-size"));
        break;
      }
    }
  }
  return out;
}

} // namespace hgrd
