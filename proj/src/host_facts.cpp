#include "hgrd/host_facts.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace hgrd {

ETPtr etConstant(long long value) {
  auto et = std::make_shared<ET>();
  et->kind = ET::Kind::Constant;
  et->value = value;
  return et;
}

ETPtr etUnknown(DefKey origin) {
  auto et = std::make_shared<ET>();
  et->kind = ET::Kind::Unknown;
  et->origin = origin;
  et->originVars.insert(origin);
  return et;
}

ETPtr etBinary(BinOp op, ETPtr lhs, ETPtr rhs) {
  auto degrade = [](ETPtr child) {
    // Bounds trees stay at the root of an argument; inside arithmetic the
    // iterator collapses to an unknown keyed by its definition so relations
    // through the same iterator are still shared.
    if (child->kind == ET::Kind::Bounds)
      return etUnknown(child->origin);
    return child;
  };
  lhs = degrade(std::move(lhs));
  rhs = degrade(std::move(rhs));
  auto et = std::make_shared<ET>();
  et->kind = ET::Kind::Binary;
  et->op = op;
  et->originVars = lhs->originVars;
  et->originVars.insert(rhs->originVars.begin(), rhs->originVars.end());
  et->lhs = std::move(lhs);
  et->rhs = std::move(rhs);
  return et;
}

ETPtr etBounds(DefKey iter, ETPtr minEt, ETPtr maxEt, bool inclusiveMax) {
  auto et = std::make_shared<ET>();
  et->kind = ET::Kind::Bounds;
  et->origin = iter;
  et->originVars.insert(iter);
  et->minEt = std::move(minEt);
  et->maxEt = std::move(maxEt);
  et->inclusiveMax = inclusiveMax;
  return et;
}

std::string etText(const ET &et) {
  switch (et.kind) {
  case ET::Kind::Constant:
    return std::to_string(et.value);
  case ET::Kind::Unknown:
    return "?" + (et.origin.name.empty() ? "v" : et.origin.name) + "@" +
           std::to_string(et.origin.site) +
           (et.origin.aux ? "." + std::to_string(et.origin.aux) : "");
  case ET::Kind::Binary:
    return "(" + etText(*et.lhs) + " " + binOpSpelling(et.op) + " " +
           etText(*et.rhs) + ")";
  case ET::Kind::Bounds:
    return std::string("[") + etText(*et.minEt) +
           (et.inclusiveMax ? " ..= " : " .. ") + etText(*et.maxEt) + "]";
  }
  return "?";
}

ETPtr createEt(const Expr &expr, const HostEnv &env) {
  if (expr.is<IntLit>())
    return etConstant(expr.as<IntLit>().value);
  if (expr.is<InputExpr>())
    return etUnknown(DefKey{expr.nodeId, 0, "__input"});
  if (expr.is<VarRef>()) {
    const auto &name = expr.as<VarRef>().name;
    auto it = env.find(name);
    if (it == env.end())
      throw AnalysisError(expr.loc, "host variable '" + name +
                                        "' has no symbolic value");
    // Substitute the defining ET and record the variable it came through.
    auto copy = std::make_shared<ET>(*it->second.et);
    copy->originVars.insert(it->second.def);
    return copy;
  }
  if (expr.is<BinaryExpr>()) {
    const auto &b = expr.as<BinaryExpr>();
    return etBinary(b.op, createEt(*b.lhs, env), createEt(*b.rhs, env));
  }
  if (expr.is<ArrayLoad>()) {
    // A host-side array read has an unknown value.
    return etUnknown(DefKey{expr.nodeId, 0, "load"});
  }
  throw AnalysisError(expr.loc, "unsupported host construct");
}

std::set<std::string> assignedNames(const StmtList &stmts) {
  std::set<std::string> names;
  std::function<void(const StmtList &)> walk = [&](const StmtList &body) {
    for (const auto &stmt : body) {
      if (stmt->is<AssignStmt>()) {
        names.insert(stmt->as<AssignStmt>().name);
      } else if (stmt->is<IfStmt>()) {
        walk(stmt->as<IfStmt>().thenBody);
        walk(stmt->as<IfStmt>().elseBody);
      } else if (stmt->is<ForStmt>()) {
        names.insert(stmt->as<ForStmt>().iter);
        walk(stmt->as<ForStmt>().body);
      } else if (stmt->is<AllocStmt>()) {
        const auto &a = stmt->as<AllocStmt>();
        names.insert(a.array);
        if (!a.pitchVar.empty())
          names.insert(a.pitchVar);
      }
    }
  };
  walk(stmts);
  return names;
}

namespace {

class HostWalker {
public:
  explicit HostWalker(const Program &program) : program_(program) {}

  HostFacts run() {
    const FunctionDecl *entry = program_.entryFunction();
    if (!entry)
      throw AnalysisError(SourceLoc{program_.fileName, 1, 1},
                          "missing entry function '" + program_.entry + "'");
    HostEnv env;
    for (const auto &p : entry->params) {
      DefKey key{-entry->loc.line, 0, p.name};
      env[p.name] = HostBinding{key, etUnknown(key)};
    }
    walkFunction(*entry, env);
    return std::move(facts_);
  }

private:
  void walkFunction(const FunctionDecl &fn, HostEnv &env) {
    if (std::find(callStack_.begin(), callStack_.end(), &fn) !=
        callStack_.end())
      throw AnalysisError(fn.loc, "recursive host call to '" + fn.name + "'");
    callStack_.push_back(&fn);
    walkBody(fn.body, env, fn);
    callStack_.pop_back();
  }

  // Returns true if the body ends in a return statement.
  bool walkBody(const StmtList &stmts, HostEnv &env, const FunctionDecl &fn) {
    for (const auto &stmt : stmts)
      if (walkStmt(*stmt, env, fn))
        return true;
    return false;
  }

  bool walkStmt(const Stmt &stmt, HostEnv &env, const FunctionDecl &fn) {
    if (stmt.is<AssignStmt>()) {
      const auto &a = stmt.as<AssignStmt>();
      DefKey key{stmt.nodeId, 0, a.name};
      ETPtr et;
      if (a.value) {
        et = createEt(*a.value, env);
        // Direct input assignments carry the variable name for readability.
        if (et->kind == ET::Kind::Unknown && et->origin.name == "__input") {
          auto named = std::make_shared<ET>(*et);
          named->origin.name = a.name;
          std::set<DefKey> vars = named->originVars;
          vars.erase(et->origin);
          DefKey renamed = named->origin;
          vars.insert(renamed);
          named->originVars = vars;
          et = named;
        }
      } else {
        et = etUnknown(key);
      }
      env[a.name] = HostBinding{key, et};
      return false;
    }
    if (stmt.is<AssertStmt>()) {
      facts_.asserts.push_back(createEt(*stmt.as<AssertStmt>().cond, env));
      activeAsserts_.push_back(facts_.asserts.size() - 1);
      return false;
    }
    if (stmt.is<AllocStmt>()) {
      const auto &a = stmt.as<AllocStmt>();
      ETPtr widthEt = createEt(*a.width, env);
      auto &alloc = facts_.allocVars;
      alloc.insert(widthEt->originVars.begin(), widthEt->originVars.end());
      if (widthEt->kind == ET::Kind::Unknown)
        alloc.insert(widthEt->origin);
      if (a.kind == AllocKind::MallocPitch) {
        ETPtr heightEt = createEt(*a.height, env);
        alloc.insert(heightEt->originVars.begin(),
                     heightEt->originVars.end());
        // The pitch out-parameter: unknown value, but it sized an
        // allocation, so it is positive.
        DefKey pitchKey{stmt.nodeId, 1, a.pitchVar};
        env[a.pitchVar] = HostBinding{pitchKey, etUnknown(pitchKey)};
        alloc.insert(pitchKey);
      }
      DefKey arrayKey{stmt.nodeId, 0, a.array};
      env[a.array] = HostBinding{arrayKey, etUnknown(arrayKey)};
      return false;
    }
    if (stmt.is<LaunchStmt>()) {
      const auto &l = stmt.as<LaunchStmt>();
      LaunchFacts lf;
      lf.launchStmt = &stmt;
      lf.hostFunction = &fn;
      lf.kernel = l.kernel;
      for (int d = 0; d < 3; ++d) {
        lf.gridDimETs[d] = createEt(*l.grid[d], env);
        lf.blockDimETs[d] = createEt(*l.block[d], env);
      }
      for (const auto &arg : l.args)
        lf.argETs.push_back(createEt(*arg, env));
      lf.activeAsserts = activeAsserts_;
      facts_.launches.push_back(std::move(lf));
      return false;
    }
    if (stmt.is<IfStmt>()) {
      const auto &s = stmt.as<IfStmt>();
      // Both branches are walked; facts are harvested per branch-specific
      // launch site. Branch-local asserts do not escape the branch.
      size_t assertMark = activeAsserts_.size();
      HostEnv thenEnv = env;
      walkBody(s.thenBody, thenEnv, fn);
      activeAsserts_.resize(assertMark);
      HostEnv elseEnv = env;
      walkBody(s.elseBody, elseEnv, fn);
      activeAsserts_.resize(assertMark);
      // Join: keep bindings untouched by both branches, merge the rest to
      // fresh unknowns.
      HostEnv joined;
      for (const auto &[name, binding] : env) {
        const auto &t = thenEnv.at(name);
        const auto &e = elseEnv.at(name);
        if (t.et == binding.et && e.et == binding.et) {
          joined[name] = binding;
        } else if (t.et == e.et && t.def == e.def) {
          joined[name] = t;
        } else {
          DefKey key{stmt.nodeId, 3, name};
          joined[name] = HostBinding{key, etUnknown(key)};
        }
      }
      env = std::move(joined);
      return false;
    }
    if (stmt.is<ForStmt>()) {
      const auto &s = stmt.as<ForStmt>();
      ETPtr lower = createEt(*s.init, env);
      ETPtr upper = createEt(*s.bound, env);
      // State assigned inside the body is loop-carried: unknown during the
      // single symbolic iteration and after the loop.
      std::set<std::string> assigned = assignedNames(s.body);
      assigned.erase(s.iter);
      for (const auto &name : assigned) {
        DefKey key{stmt.nodeId, 1, name};
        env[name] = HostBinding{key, etUnknown(key)};
      }
      DefKey iterKey{stmt.nodeId, 0, s.iter};
      env[s.iter] =
          HostBinding{iterKey, etBounds(iterKey, lower, upper,
                                        s.inclusiveBound)};
      HostEnv bodyEnv = env;
      walkBody(s.body, bodyEnv, fn);
      for (const auto &name : assigned) {
        DefKey key{stmt.nodeId, 2, name};
        env[name] = HostBinding{key, etUnknown(key)};
      }
      DefKey afterKey{stmt.nodeId, 2, s.iter};
      env[s.iter] = HostBinding{afterKey, etUnknown(afterKey)};
      return false;
    }
    if (stmt.is<CallStmt>()) {
      const auto &c = stmt.as<CallStmt>();
      const FunctionDecl *callee = program_.findHost(c.callee);
      if (!callee)
        throw AnalysisError(stmt.loc, "call to unknown host function");
      HostEnv calleeEnv;
      for (size_t i = 0; i < callee->params.size(); ++i) {
        DefKey key{stmt.nodeId, static_cast<int>(i) + 10,
                   callee->params[i].name};
        calleeEnv[callee->params[i].name] =
            HostBinding{key, createEt(*c.args[i], env)};
      }
      walkFunction(*callee, calleeEnv);
      return false;
    }
    if (stmt.is<ReturnStmt>())
      return true;
    if (stmt.is<ArrayStoreStmt>()) {
      // Host-side array writes don't feed launch facts.
      return false;
    }
    throw AnalysisError(stmt.loc, "unsupported host construct");
  }

  const Program &program_;
  HostFacts facts_;
  std::vector<size_t> activeAsserts_;
  std::vector<const FunctionDecl *> callStack_;
};

} // namespace

HostFacts analyzeHost(const Program &program) {
  HostWalker walker(program);
  return walker.run();
}

std::optional<long long> evalEt(const ET &et,
                                const std::map<DefKey, long long> &values) {
  switch (et.kind) {
  case ET::Kind::Constant:
    return et.value;
  case ET::Kind::Unknown: {
    auto it = values.find(et.origin);
    if (it == values.end())
      return std::nullopt;
    return it->second;
  }
  case ET::Kind::Binary: {
    auto l = evalEt(*et.lhs, values);
    auto r = evalEt(*et.rhs, values);
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
      return *r == 0 ? std::optional<long long>() : *l / *r;
    case BinOp::Mod:
      return *r == 0 ? std::optional<long long>() : *l % *r;
    case BinOp::Lt:
      return *l < *r ? 1 : 0;
    case BinOp::Le:
      return *l <= *r ? 1 : 0;
    case BinOp::Gt:
      return *l > *r ? 1 : 0;
    case BinOp::Ge:
      return *l >= *r ? 1 : 0;
    case BinOp::Eq:
      return *l == *r ? 1 : 0;
    case BinOp::Ne:
      return *l != *r ? 1 : 0;
    case BinOp::And:
      return (*l != 0 && *r != 0) ? 1 : 0;
    case BinOp::Or:
      return (*l != 0 || *r != 0) ? 1 : 0;
    }
    return std::nullopt;
  }
  case ET::Kind::Bounds:
    return std::nullopt;
  }
  return std::nullopt;
}

std::string dumpHostFacts(const HostFacts &facts) {
  std::ostringstream os;
  os << "asserts:\n";
  for (size_t i = 0; i < facts.asserts.size(); ++i)
    os << "  [" << i << "] " << etText(*facts.asserts[i]) << "\n";
  os << "allocVars:";
  for (const auto &key : facts.allocVars)
    os << " " << (key.name.empty() ? "v" : key.name) << "@" << key.site
       << (key.aux ? "." + std::to_string(key.aux) : "");
  os << "\n";
  for (const auto &lf : facts.launches) {
    os << "launch " << lf.kernel << " at line "
       << lf.launchStmt->loc.line << ":\n";
    os << "  grid  = (" << etText(*lf.gridDimETs[0]) << ", "
       << etText(*lf.gridDimETs[1]) << ", " << etText(*lf.gridDimETs[2])
       << ")\n";
    os << "  block = (" << etText(*lf.blockDimETs[0]) << ", "
       << etText(*lf.blockDimETs[1]) << ", " << etText(*lf.blockDimETs[2])
       << ")\n";
    for (size_t i = 0; i < lf.argETs.size(); ++i)
      os << "  arg[" << i << "] = " << etText(*lf.argETs[i]) << "\n";
    os << "  asserts:";
    for (size_t idx : lf.activeAsserts)
      os << " [" << idx << "]";
    os << "\n";
  }
  return os.str();
}

} // namespace hgrd
