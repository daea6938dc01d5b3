#include "hgrd/oracle.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace hgrd {

bool operator<(const ObservedRace &a, const ObservedRace &b) {
  if (!(a.locA == b.locA))
    return a.locA < b.locA;
  if (!(a.locB == b.locB))
    return a.locB < b.locB;
  if (a.kind != b.kind)
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  if (a.array != b.array)
    return a.array < b.array;
  return a.address < b.address;
}

namespace {

struct TrapAbort {}; // thrown when interpretation hits a hard limit

struct SyncOp {
  enum class Kind { Cas, Exch, Fence } kind = Kind::Fence;
  Scope scope = Scope::Device;
  int handle = -1;
  long long index = 0;
  int seq = 0;
};

struct Event {
  SourceLoc loc;
  std::string array;
  int handle = -1;
  long long index = 0;
  bool isWrite = false;
  bool isAtomic = false;
  Scope atomicScope = Scope::None;
  long long blockLin = 0;
  long long threadLin = 0;
  long long warp = 0;
  long long blockPhase = 0;
  long long warpPhase = 0;
  int thread = 0; // dense per-launch thread number
  int seq = 0;
};

class Interpreter {
public:
  Interpreter(const Program &program, const ExecConfig &config)
      : program_(program), config_(config) {}

  OracleResult run() {
    result_.indirectIndexing = hasIndirectIndexing(program_);
    const FunctionDecl *entry = program_.entryFunction();
    if (!entry) {
      result_.traps.push_back("missing entry function");
      return std::move(result_);
    }
    Frame frame;
    for (const auto &p : entry->params) {
      if (p.type == ParamType::Int) {
        frame.scalars[p.name] = 0;
        defValues_[DefKey{-entry->loc.line, 0, p.name}] = 0;
      } else {
        frame.arrays[p.name] = -1;
      }
    }
    try {
      execBody(entry->body, frame, *entry);
    } catch (const TrapAbort &) {
      // Already recorded in traps.
    }
    std::sort(result_.races.begin(), result_.races.end());
    return std::move(result_);
  }

private:
  struct Frame {
    std::map<std::string, long long> scalars;
    std::map<std::string, int> arrays; // name -> buffer handle (-1 unset)
  };

  static bool hasIndirectIndexing(const Program &program) {
    bool found = false;
    std::function<void(const Expr &, bool)> scanExpr = [&](const Expr &e,
                                                           bool inIndex) {
      if (e.is<ArrayLoad>()) {
        if (inIndex)
          found = true;
        scanExpr(*e.as<ArrayLoad>().index, true);
        return;
      }
      if (e.is<BinaryExpr>()) {
        scanExpr(*e.as<BinaryExpr>().lhs, inIndex);
        scanExpr(*e.as<BinaryExpr>().rhs, inIndex);
      }
    };
    std::function<void(const StmtList &)> scanBody =
        [&](const StmtList &stmts) {
          for (const auto &stmt : stmts) {
            if (stmt->is<ArrayStoreStmt>()) {
              scanExpr(*stmt->as<ArrayStoreStmt>().index, true);
              scanExpr(*stmt->as<ArrayStoreStmt>().value, false);
            } else if (stmt->is<AtomicStmt>()) {
              scanExpr(*stmt->as<AtomicStmt>().index, true);
            } else if (stmt->is<AssignStmt>()) {
              if (stmt->as<AssignStmt>().value)
                scanExpr(*stmt->as<AssignStmt>().value, false);
            } else if (stmt->is<IfStmt>()) {
              scanBody(stmt->as<IfStmt>().thenBody);
              scanBody(stmt->as<IfStmt>().elseBody);
            } else if (stmt->is<ForStmt>()) {
              scanBody(stmt->as<ForStmt>().body);
            }
          }
        };
    for (const auto &k : program.kernels)
      scanBody(k.body);
    return found;
  }

  void trap(const SourceLoc &loc, const std::string &message) {
    std::ostringstream os;
    os << loc.file << ":" << loc.line << ": " << message;
    if (result_.traps.size() < 256)
      result_.traps.push_back(os.str());
  }

  void step(const SourceLoc &loc) {
    if (++steps_ > config_.maxSteps) {
      trap(loc, "step budget exhausted");
      throw TrapAbort{};
    }
  }

  // --- host execution ----------------------------------------------------

  long long evalHost(const Expr &e, Frame &frame) {
    if (e.is<IntLit>())
      return e.as<IntLit>().value;
    if (e.is<VarRef>()) {
      auto it = frame.scalars.find(e.as<VarRef>().name);
      return it == frame.scalars.end() ? 0 : it->second;
    }
    if (e.is<InputExpr>()) {
      long long v = 0;
      if (inputCursor_ < config_.inputs.size()) {
        v = config_.inputs[inputCursor_++];
      } else {
        trap(e.loc, "input exhausted; __input() defaults to 0");
      }
      defValues_[DefKey{e.nodeId, 0, "__input"}] = v;
      return v;
    }
    if (e.is<ArrayLoad>()) {
      const auto &l = e.as<ArrayLoad>();
      auto it = frame.arrays.find(l.array);
      long long idx = evalHost(*l.index, frame);
      if (it == frame.arrays.end() || it->second < 0) {
        trap(e.loc, "read from unallocated array " + l.array);
        return 0;
      }
      auto &buf = buffers_[it->second];
      if (idx < 0 || idx >= static_cast<long long>(buf.size())) {
        trap(e.loc, "host read out of bounds on " + l.array);
        return 0;
      }
      return buf[idx];
    }
    const auto &b = e.as<BinaryExpr>();
    long long l = evalHost(*b.lhs, frame);
    long long r = evalHost(*b.rhs, frame);
    return applyBinOp(b.op, l, r);
  }

  static long long applyBinOp(BinOp op, long long l, long long r) {
    switch (op) {
    case BinOp::Add:
      return l + r;
    case BinOp::Sub:
      return l - r;
    case BinOp::Mul:
      return l * r;
    case BinOp::Div:
      return r == 0 ? 0 : l / r;
    case BinOp::Mod:
      return r == 0 ? 0 : l % r;
    case BinOp::Lt:
      return l < r;
    case BinOp::Le:
      return l <= r;
    case BinOp::Gt:
      return l > r;
    case BinOp::Ge:
      return l >= r;
    case BinOp::Eq:
      return l == r;
    case BinOp::Ne:
      return l != r;
    case BinOp::And:
      return (l != 0 && r != 0) ? 1 : 0;
    case BinOp::Or:
      return (l != 0 || r != 0) ? 1 : 0;
    }
    return 0;
  }

  // Returns true when the body executed a return.
  bool execBody(const StmtList &stmts, Frame &frame, const FunctionDecl &fn) {
    for (const auto &stmt : stmts)
      if (execStmt(*stmt, frame, fn))
        return true;
    return false;
  }

  bool execStmt(const Stmt &stmt, Frame &frame, const FunctionDecl &fn) {
    step(stmt.loc);
    if (stmt.is<AssignStmt>()) {
      const auto &a = stmt.as<AssignStmt>();
      if (a.isDecl && isArrayType(a.declType)) {
        frame.arrays[a.name] = -1;
        return false;
      }
      long long v = a.value ? evalHost(*a.value, frame) : 0;
      frame.scalars[a.name] = v;
      defValues_[DefKey{stmt.nodeId, 0, a.name}] = v;
      return false;
    }
    if (stmt.is<ArrayStoreStmt>()) {
      const auto &s = stmt.as<ArrayStoreStmt>();
      long long idx = evalHost(*s.index, frame);
      long long val = evalHost(*s.value, frame);
      auto it = frame.arrays.find(s.array);
      if (it == frame.arrays.end() || it->second < 0) {
        trap(stmt.loc, "write to unallocated array " + s.array);
        return false;
      }
      auto &buf = buffers_[it->second];
      if (idx < 0 || idx >= static_cast<long long>(buf.size())) {
        trap(stmt.loc, "host write out of bounds on " + s.array);
        return false;
      }
      buf[idx] = val;
      return false;
    }
    if (stmt.is<AssertStmt>()) {
      if (evalHost(*stmt.as<AssertStmt>().cond, frame) == 0) {
        result_.assertStopped = true;
        throw TrapAbort{}; // execution stops; not an error
      }
      return false;
    }
    if (stmt.is<AllocStmt>()) {
      const auto &a = stmt.as<AllocStmt>();
      long long elems = 0;
      if (a.kind == AllocKind::Malloc) {
        elems = evalHost(*a.width, frame);
      } else {
        long long width = evalHost(*a.width, frame);
        long long height = evalHost(*a.height, frame);
        if (width <= 0 || height <= 0) {
          trap(stmt.loc, "cudaMallocPitch with non-positive extent");
          frame.scalars[a.pitchVar] = 0;
          defValues_[DefKey{stmt.nodeId, 1, a.pitchVar}] = 0;
          frame.arrays[a.array] = -1;
          return false;
        }
        // Pitch: requested width rounded up to a 4-element boundary.
        long long pitch = ((width + 3) / 4) * 4;
        frame.scalars[a.pitchVar] = pitch;
        defValues_[DefKey{stmt.nodeId, 1, a.pitchVar}] = pitch;
        elems = pitch * height;
      }
      if (elems <= 0 || elems > config_.maxArrayElems) {
        trap(stmt.loc, "allocation size out of range for " + a.array);
        frame.arrays[a.array] = -1;
        return false;
      }
      int handle = static_cast<int>(buffers_.size());
      buffers_.emplace_back(static_cast<size_t>(elems), 0);
      bufferNames_.push_back(a.array);
      frame.arrays[a.array] = handle;
      return false;
    }
    if (stmt.is<IfStmt>()) {
      const auto &s = stmt.as<IfStmt>();
      bool taken = evalHost(*s.cond, frame) != 0;
      bool returned =
          execBody(taken ? s.thenBody : s.elseBody, frame, fn);
      syncJoinValues(stmt, frame);
      return returned;
    }
    if (stmt.is<ForStmt>()) {
      const auto &s = stmt.as<ForStmt>();
      long long i = evalHost(*s.init, frame);
      std::set<std::string> assigned = assignedNames(s.body);
      assigned.erase(s.iter);
      while (true) {
        step(stmt.loc);
        long long bound = evalHost(*s.bound, frame);
        bool cont = s.inclusiveBound ? (i <= bound) : (i < bound);
        if (!cont)
          break;
        frame.scalars[s.iter] = i;
        defValues_[DefKey{stmt.nodeId, 0, s.iter}] = i;
        for (const auto &name : assigned)
          if (frame.scalars.count(name))
            defValues_[DefKey{stmt.nodeId, 1, name}] = frame.scalars[name];
        if (execBody(s.body, frame, fn))
          return true;
        i += s.step;
      }
      frame.scalars[s.iter] = i;
      defValues_[DefKey{stmt.nodeId, 2, s.iter}] = i;
      for (const auto &name : assigned)
        if (frame.scalars.count(name))
          defValues_[DefKey{stmt.nodeId, 2, name}] = frame.scalars[name];
      return false;
    }
    if (stmt.is<LaunchStmt>()) {
      execLaunch(stmt, frame);
      return false;
    }
    if (stmt.is<CallStmt>()) {
      const auto &c = stmt.as<CallStmt>();
      const FunctionDecl *callee = program_.findHost(c.callee);
      if (!callee) {
        trap(stmt.loc, "call to unknown function");
        return false;
      }
      if (callDepth_ > 64) {
        trap(stmt.loc, "host call depth exceeded");
        throw TrapAbort{};
      }
      Frame calleeFrame;
      for (size_t i = 0; i < callee->params.size(); ++i) {
        const Param &p = callee->params[i];
        if (p.type == ParamType::Int) {
          long long v = evalHost(*c.args[i], frame);
          calleeFrame.scalars[p.name] = v;
          defValues_[DefKey{stmt.nodeId, static_cast<int>(i) + 10, p.name}] =
              v;
        } else {
          int handle = -1;
          if (c.args[i]->is<VarRef>()) {
            auto it = frame.arrays.find(c.args[i]->as<VarRef>().name);
            if (it != frame.arrays.end())
              handle = it->second;
          }
          calleeFrame.arrays[p.name] = handle;
        }
      }
      ++callDepth_;
      execBody(callee->body, calleeFrame, *callee);
      --callDepth_;
      return false;
    }
    if (stmt.is<ReturnStmt>())
      return true;
    return false;
  }

  void syncJoinValues(const Stmt &ifStmt, Frame &frame) {
    const auto &s = ifStmt.as<IfStmt>();
    std::set<std::string> names = assignedNames(s.thenBody);
    std::set<std::string> elseNames = assignedNames(s.elseBody);
    names.insert(elseNames.begin(), elseNames.end());
    for (const auto &name : names)
      if (frame.scalars.count(name))
        defValues_[DefKey{ifStmt.nodeId, 3, name}] = frame.scalars[name];
  }

  // --- kernel execution ---------------------------------------------------

  void execLaunch(const Stmt &stmt, Frame &frame) {
    const auto &l = stmt.as<LaunchStmt>();
    const KernelDecl *kernel = program_.findKernel(l.kernel);
    if (!kernel) {
      trap(stmt.loc, "launch of unknown kernel");
      return;
    }
    std::array<long long, 3> grid{}, block{};
    for (int d = 0; d < 3; ++d) {
      grid[d] = evalHost(*l.grid[d], frame);
      block[d] = evalHost(*l.block[d], frame);
    }
    for (int d = 0; d < 3; ++d) {
      if (grid[d] <= 0 || block[d] <= 0) {
        trap(stmt.loc, "non-positive launch dimension");
        ++result_.launchesSkipped;
        return;
      }
    }
    bool fits = true;
    for (int d = 0; d < 3; ++d)
      fits = fits && grid[d] <= config_.gridCap[d] &&
             block[d] <= config_.blockCap[d];
    long long threadsPerBlock = block[0] * block[1] * block[2];
    long long totalThreads =
        grid[0] * grid[1] * grid[2] * threadsPerBlock;
    if (!fits || totalThreads > config_.maxThreads) {
      ++result_.launchesSkipped;
      return;
    }

    LaunchRecord record;
    record.launchStmt = &stmt;
    record.grid = grid;
    record.block = block;
    record.defValues = defValues_;

    // Kernel frame: parameter values and array handles.
    std::map<std::string, long long> scalarParams;
    std::map<std::string, int> arrayParams;
    for (size_t i = 0; i < kernel->params.size(); ++i) {
      const Param &p = kernel->params[i];
      if (p.type == ParamType::Int) {
        long long v = evalHost(*l.args[i], frame);
        scalarParams[p.name] = v;
        record.scalarArgs.push_back(v);
        record.isScalar.push_back(true);
      } else {
        int handle = -1;
        if (l.args[i]->is<VarRef>()) {
          auto it = frame.arrays.find(l.args[i]->as<VarRef>().name);
          if (it != frame.arrays.end())
            handle = it->second;
        }
        arrayParams[p.name] = handle;
        record.scalarArgs.push_back(-1);
        record.isScalar.push_back(false);
      }
    }
    result_.launchRecords.push_back(record);
    ++result_.launchesRun;

    std::vector<Event> events;
    std::vector<std::vector<SyncOp>> syncOps;
    int thread = 0;
    for (long long bz = 0; bz < grid[2]; ++bz)
      for (long long by = 0; by < grid[1]; ++by)
        for (long long bx = 0; bx < grid[0]; ++bx)
          for (long long tz = 0; tz < block[2]; ++tz)
            for (long long ty = 0; ty < block[1]; ++ty)
              for (long long tx = 0; tx < block[0]; ++tx) {
                ThreadCtx t;
                t.kernel = kernel;
                t.scalars = scalarParams;
                t.arrays = &arrayParams;
                t.builtins[0] = {tx, ty, tz};
                t.builtins[1] = {bx, by, bz};
                t.builtins[2] = {block[0], block[1], block[2]};
                t.builtins[3] = {grid[0], grid[1], grid[2]};
                t.blockLin = bx + by * grid[0] + bz * grid[0] * grid[1];
                t.threadLin = tx + ty * block[0] + tz * block[0] * block[1];
                t.warp = t.threadLin / config_.warpSize;
                t.thread = thread++;
                t.events = &events;
                syncOps.emplace_back();
                t.syncOps = &syncOps.back();
                runThread(t);
              }
    detectRaces(events, syncOps);
  }

  struct ThreadCtx {
    const KernelDecl *kernel = nullptr;
    std::map<std::string, long long> scalars; // params and locals
    const std::map<std::string, int> *arrays = nullptr;
    std::array<std::array<long long, 3>, 4> builtins{}; // tid, bid, bdim, gdim
    long long blockLin = 0, threadLin = 0, warp = 0;
    int thread = 0;
    long long blockPhase = 0, warpPhase = 0;
    int seq = 0;
    std::vector<Event> *events = nullptr;
    std::vector<SyncOp> *syncOps = nullptr;
  };

  long long evalKernel(const Expr &e, ThreadCtx &t) {
    if (e.is<IntLit>())
      return e.as<IntLit>().value;
    if (e.is<VarRef>()) {
      auto it = t.scalars.find(e.as<VarRef>().name);
      return it == t.scalars.end() ? 0 : it->second;
    }
    if (e.is<BuiltinRef>()) {
      const auto &b = e.as<BuiltinRef>();
      return t.builtins[static_cast<int>(b.builtin)]
                       [static_cast<int>(b.axis)];
    }
    if (e.is<ArrayLoad>()) {
      const auto &l = e.as<ArrayLoad>();
      long long idx = evalKernel(*l.index, t);
      return deviceLoad(l.array, idx, e.loc, t);
    }
    const auto &b = e.as<BinaryExpr>();
    return applyBinOp(b.op, evalKernel(*b.lhs, t), evalKernel(*b.rhs, t));
  }

  int handleOf(const std::string &array, ThreadCtx &t) {
    auto it = t.arrays->find(array);
    return it == t.arrays->end() ? -1 : it->second;
  }

  bool checkBounds(int handle, long long idx, const SourceLoc &loc,
                   const std::string &array) {
    if (handle < 0) {
      trap(loc, "kernel access to unallocated array " + array);
      return false;
    }
    if (idx < 0 || idx >= static_cast<long long>(buffers_[handle].size())) {
      trap(loc, "kernel access out of bounds on " + array);
      return false;
    }
    return true;
  }

  void record(ThreadCtx &t, const SourceLoc &loc, const std::string &array,
              int handle, long long idx, bool write, bool atomic,
              Scope scope) {
    Event e;
    e.loc = loc;
    e.array = array;
    e.handle = handle;
    e.index = idx;
    e.isWrite = write;
    e.isAtomic = atomic;
    e.atomicScope = scope;
    e.blockLin = t.blockLin;
    e.threadLin = t.threadLin;
    e.warp = t.warp;
    e.blockPhase = t.blockPhase;
    e.warpPhase = t.warpPhase;
    e.thread = t.thread;
    e.seq = t.seq++;
    t.events->push_back(e);
  }

  long long deviceLoad(const std::string &array, long long idx,
                       const SourceLoc &loc, ThreadCtx &t) {
    int handle = handleOf(array, t);
    if (!checkBounds(handle, idx, loc, array))
      return 0;
    record(t, loc, array, handle, idx, false, false, Scope::None);
    return buffers_[handle][idx];
  }

  void runThread(ThreadCtx &t) { runThreadBody(t.kernel->body, t); }

  bool runThreadBody(const StmtList &stmts, ThreadCtx &t) {
    for (const auto &stmt : stmts)
      if (runThreadStmt(*stmt, t))
        return true;
    return false;
  }

  bool runThreadStmt(const Stmt &stmt, ThreadCtx &t) {
    step(stmt.loc);
    if (stmt.is<AssignStmt>()) {
      const auto &a = stmt.as<AssignStmt>();
      t.scalars[a.name] = a.value ? evalKernel(*a.value, t) : 0;
      return false;
    }
    if (stmt.is<ArrayStoreStmt>()) {
      const auto &s = stmt.as<ArrayStoreStmt>();
      long long idx = evalKernel(*s.index, t);
      long long val = evalKernel(*s.value, t);
      int handle = handleOf(s.array, t);
      if (!checkBounds(handle, idx, stmt.loc, s.array))
        return false;
      record(t, stmt.loc, s.array, handle, idx, true, false, Scope::None);
      buffers_[handle][idx] = val;
      return false;
    }
    if (stmt.is<AtomicStmt>()) {
      const auto &a = stmt.as<AtomicStmt>();
      long long idx = evalKernel(*a.index, t);
      int handle = handleOf(a.array, t);
      long long val = evalKernel(*a.value, t);
      long long cmp = a.compare ? evalKernel(*a.compare, t) : 0;
      if (!checkBounds(handle, idx, stmt.loc, a.array))
        return false;
      record(t, stmt.loc, a.array, handle, idx, true, true, a.scope);
      long long old = buffers_[handle][idx];
      switch (a.op) {
      case AtomicKind::Cas:
        if (old == cmp)
          buffers_[handle][idx] = val;
        t.syncOps->push_back(
            SyncOp{SyncOp::Kind::Cas, a.scope, handle, idx, t.seq - 1});
        break;
      case AtomicKind::Exch:
        buffers_[handle][idx] = val;
        t.syncOps->push_back(
            SyncOp{SyncOp::Kind::Exch, a.scope, handle, idx, t.seq - 1});
        break;
      case AtomicKind::Add:
        buffers_[handle][idx] = old + val;
        break;
      }
      return false;
    }
    if (stmt.is<BarrierStmt>()) {
      if (stmt.as<BarrierStmt>().kind == BarrierKind::SyncThreads) {
        ++t.blockPhase;
        ++t.warpPhase; // a block barrier also orders the warp
      } else {
        ++t.warpPhase;
      }
      return false;
    }
    if (stmt.is<FenceStmt>()) {
      t.syncOps->push_back(SyncOp{SyncOp::Kind::Fence,
                                  stmt.as<FenceStmt>().scope, -1, 0,
                                  t.seq++});
      return false;
    }
    if (stmt.is<IfStmt>()) {
      const auto &s = stmt.as<IfStmt>();
      bool taken = evalKernel(*s.cond, t) != 0;
      return runThreadBody(taken ? s.thenBody : s.elseBody, t);
    }
    if (stmt.is<ForStmt>()) {
      const auto &s = stmt.as<ForStmt>();
      long long i = evalKernel(*s.init, t);
      while (true) {
        step(stmt.loc);
        long long bound = evalKernel(*s.bound, t);
        bool cont = s.inclusiveBound ? (i <= bound) : (i < bound);
        if (!cont)
          break;
        t.scalars[s.iter] = i;
        if (runThreadBody(s.body, t))
          return true;
        i += s.step;
      }
      t.scalars[s.iter] = i;
      return false;
    }
    if (stmt.is<ReturnStmt>())
      return true;
    return false;
  }

  // --- race detection over recorded events --------------------------------

  struct LockFact {
    int handle;
    long long index;
    Scope scope;
  };

  static void maxScopeInsert(std::vector<LockFact> &facts, int handle,
                             long long index, Scope scope) {
    for (auto &f : facts) {
      if (f.handle == handle && f.index == index) {
        if (static_cast<int>(scope) > static_cast<int>(f.scope))
          f.scope = scope;
        return;
      }
    }
    facts.push_back(LockFact{handle, index, scope});
  }

  static Scope narrower(Scope a, Scope b) {
    return static_cast<int>(a) <= static_cast<int>(b) ? a : b;
  }

  struct EventLockInfo {
    std::vector<LockFact> acqBefore;
    std::vector<LockFact> relAfter;
    std::vector<LockFact> insideCs;
  };

  EventLockInfo lockInfo(const Event &e, const std::vector<SyncOp> &ops) {
    EventLockInfo info;
    for (const auto &fence : ops) {
      if (fence.kind != SyncOp::Kind::Fence)
        continue;
      for (const auto &cas : ops) {
        if (cas.kind != SyncOp::Kind::Cas || cas.seq >= fence.seq)
          continue;
        if (fence.seq < e.seq)
          maxScopeInsert(info.acqBefore, cas.handle, cas.index,
                         narrower(cas.scope, fence.scope));
      }
      for (const auto &exch : ops) {
        if (exch.kind != SyncOp::Kind::Exch || exch.seq <= fence.seq)
          continue;
        if (fence.seq > e.seq)
          maxScopeInsert(info.relAfter, exch.handle, exch.index,
                         narrower(exch.scope, fence.scope));
      }
    }
    for (const auto &acq : info.acqBefore)
      for (const auto &rel : info.relAfter)
        if (acq.handle == rel.handle && acq.index == rel.index)
          maxScopeInsert(info.insideCs, acq.handle, acq.index,
                         narrower(acq.scope, rel.scope));
    return info;
  }

  static bool scopeCovers(Scope s, bool sameBlock) {
    return s == Scope::Device || (s == Scope::Block && sameBlock);
  }

  static bool lockOrdered(const EventLockInfo &a, const EventLockInfo &b,
                          bool sameBlock) {
    for (const auto &x : a.insideCs)
      for (const auto &y : b.insideCs)
        if (x.handle == y.handle && x.index == y.index &&
            scopeCovers(narrower(x.scope, y.scope), sameBlock))
          return true;
    for (const auto &x : a.relAfter)
      for (const auto &y : b.acqBefore)
        if (x.handle == y.handle && x.index == y.index &&
            scopeCovers(narrower(x.scope, y.scope), sameBlock))
          return true;
    for (const auto &x : b.relAfter)
      for (const auto &y : a.acqBefore)
        if (x.handle == y.handle && x.index == y.index &&
            scopeCovers(narrower(x.scope, y.scope), sameBlock))
          return true;
    return false;
  }

  void detectRaces(const std::vector<Event> &events,
                   const std::vector<std::vector<SyncOp>> &syncOps) {
    // Group by element.
    std::map<std::pair<int, long long>, std::vector<size_t>> byElement;
    for (size_t i = 0; i < events.size(); ++i)
      byElement[{events[i].handle, events[i].index}].push_back(i);
    std::vector<EventLockInfo> locks(events.size());
    std::vector<bool> locksComputed(events.size(), false);
    auto lockOf = [&](size_t i) -> const EventLockInfo & {
      if (!locksComputed[i]) {
        locks[i] = lockInfo(events[i], syncOps[events[i].thread]);
        locksComputed[i] = true;
      }
      return locks[i];
    };
    for (const auto &[element, idxs] : byElement) {
      for (size_t x = 0; x < idxs.size(); ++x) {
        for (size_t y = x + 1; y < idxs.size(); ++y) {
          const Event &a = events[idxs[x]];
          const Event &b = events[idxs[y]];
          if (a.thread == b.thread)
            continue; // program order
          if (!a.isWrite && !b.isWrite)
            continue;
          bool sameBlock = a.blockLin == b.blockLin;
          if (a.isAtomic && b.isAtomic &&
              scopeCovers(a.atomicScope, sameBlock) &&
              scopeCovers(b.atomicScope, sameBlock))
            continue; // adequately scoped atomics do not race
          if (sameBlock && a.blockPhase != b.blockPhase)
            continue; // ordered by a block barrier
          bool sameWarp = sameBlock && a.warp == b.warp;
          if (sameWarp && a.warpPhase != b.warpPhase)
            continue; // ordered by a warp barrier
          if (lockOrdered(lockOf(idxs[x]), lockOf(idxs[y]), sameBlock))
            continue;
          ObservedRace race;
          race.kind = !sameBlock  ? RaceKind::InterBlock
                      : !sameWarp ? RaceKind::IntraBlock
                                  : RaceKind::IntraWarp;
          race.array = a.array;
          race.address = a.index;
          race.locA = a.loc;
          race.locB = b.loc;
          if (race.locB < race.locA)
            std::swap(race.locA, race.locB);
          auto key = std::make_tuple(race.locA.line, race.locA.column,
                                     race.locB.line, race.locB.column,
                                     static_cast<int>(race.kind));
          if (seenRaces_.insert(key).second)
            result_.races.push_back(race);
        }
      }
    }
  }

  const Program &program_;
  const ExecConfig &config_;
  OracleResult result_;
  std::vector<std::vector<long long>> buffers_;
  std::vector<std::string> bufferNames_;
  std::map<DefKey, long long> defValues_;
  std::set<std::tuple<int, int, int, int, int>> seenRaces_;
  size_t inputCursor_ = 0;
  long long steps_ = 0;
  int callDepth_ = 0;
};

} // namespace

OracleResult runConcrete(const Program &program, const ExecConfig &config) {
  Interpreter interp(program, config);
  return interp.run();
}

int countInputs(const Program &program) {
  int count = 0;
  std::function<void(const Expr &)> scanExpr = [&](const Expr &e) {
    if (e.is<InputExpr>()) {
      ++count;
      return;
    }
    if (e.is<BinaryExpr>()) {
      scanExpr(*e.as<BinaryExpr>().lhs);
      scanExpr(*e.as<BinaryExpr>().rhs);
    } else if (e.is<ArrayLoad>()) {
      scanExpr(*e.as<ArrayLoad>().index);
    }
  };
  std::function<void(const StmtList &)> scanBody = [&](const StmtList &body) {
    for (const auto &stmt : body) {
      if (stmt->is<AssignStmt>()) {
        if (stmt->as<AssignStmt>().value)
          scanExpr(*stmt->as<AssignStmt>().value);
      } else if (stmt->is<ArrayStoreStmt>()) {
        scanExpr(*stmt->as<ArrayStoreStmt>().index);
        scanExpr(*stmt->as<ArrayStoreStmt>().value);
      } else if (stmt->is<AssertStmt>()) {
        scanExpr(*stmt->as<AssertStmt>().cond);
      } else if (stmt->is<AllocStmt>()) {
        scanExpr(*stmt->as<AllocStmt>().width);
        if (stmt->as<AllocStmt>().height)
          scanExpr(*stmt->as<AllocStmt>().height);
      } else if (stmt->is<IfStmt>()) {
        scanExpr(*stmt->as<IfStmt>().cond);
        scanBody(stmt->as<IfStmt>().thenBody);
        scanBody(stmt->as<IfStmt>().elseBody);
      } else if (stmt->is<ForStmt>()) {
        scanExpr(*stmt->as<ForStmt>().init);
        scanExpr(*stmt->as<ForStmt>().bound);
        scanBody(stmt->as<ForStmt>().body);
      } else if (stmt->is<LaunchStmt>()) {
        const auto &l = stmt->as<LaunchStmt>();
        for (const auto &d : l.grid)
          scanExpr(*d);
        for (const auto &d : l.block)
          scanExpr(*d);
        for (const auto &a : l.args)
          scanExpr(*a);
      } else if (stmt->is<CallStmt>()) {
        for (const auto &a : stmt->as<CallStmt>().args)
          scanExpr(*a);
      } else if (stmt->is<ReturnStmt>()) {
        if (stmt->as<ReturnStmt>().value)
          scanExpr(*stmt->as<ReturnStmt>().value);
      }
    }
  };
  for (const auto &fn : program.hostFunctions)
    scanBody(fn.body);
  return count;
}

std::vector<SweepRace> enumerateVerdict(const Program &program,
                                        const SweepCaps &caps) {
  int inputs = countInputs(program);
  std::vector<SweepRace> out;
  std::set<std::tuple<int, int, int, int, int, long long>> seen;
  size_t configs = 0;
  std::vector<size_t> cursor(static_cast<size_t>(inputs), 0);
  for (long long ws : caps.warpSizes) {
    std::fill(cursor.begin(), cursor.end(), 0);
    while (true) {
      if (configs++ > caps.maxConfigs)
        return out;
      ExecConfig config;
      config.gridCap = caps.gridCap;
      config.blockCap = caps.blockCap;
      config.warpSize = ws;
      config.maxThreads = caps.maxThreads;
      for (int i = 0; i < inputs; ++i)
        config.inputs.push_back(caps.inputSet[cursor[i]]);
      OracleResult result = runConcrete(program, config);
      for (const auto &race : result.races) {
        auto key = std::make_tuple(race.locA.line, race.locA.column,
                                   race.locB.line, race.locB.column,
                                   static_cast<int>(race.kind), ws);
        if (seen.insert(key).second)
          out.push_back(SweepRace{race.locA, race.locB, race.kind, ws});
      }
      // Advance the input tuple odometer.
      int pos = inputs - 1;
      while (pos >= 0) {
        if (++cursor[pos] < caps.inputSet.size())
          break;
        cursor[pos] = 0;
        --pos;
      }
      if (pos < 0)
        break;
    }
  }
  return out;
}

} // namespace hgrd
