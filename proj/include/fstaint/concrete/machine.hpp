#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fstaint/concrete/state.hpp"
#include "fstaint/frontend/hierarchy.hpp"
#include "fstaint/frontend/parser.hpp"

namespace fstaint::concrete {

using frontend::LifeState;

// Activity life-cycle graph.  The state set is fixed; the transition edges
// are data so tests can substitute smaller models.
struct LifecycleModel {
  std::vector<std::pair<LifeState, LifeState>> transitions;

  static LifecycleModel standard();
  bool allows(LifeState a, LifeState b) const;
};

struct LocalStep {
  const char* rule;
  LocalConfig next;
};

struct GlobalStep {
  const char* rule;
  std::string frame_id;  // a<ptr> for activities, t<ptr> for threads
  std::string where;     // Class.method.pc of the executed statement, or "-"
  Configuration next;
  // Callback started by this step, if any (life-cycle rules only).
  Sym fired_cb = 0;
  bool fired_user_cb = false;
};

struct ExploreOptions {
  uint64_t max_steps = 200000;    // node expansions before giving up
  uint64_t max_configs = 100000;  // distinct configurations to keep
  // Callback waypoints: exploration commits to the first path that starts
  // these user-declared callbacks in order, then keeps searching from there.
  std::vector<std::string> schedule;
};

struct ReachedNode {
  Configuration cfg;
  int32_t parent;    // index into ExploreResult::nodes, -1 for roots
  std::string line;  // "rule | frame | pp"
};

struct LeakWitness {
  Sym sink_cls = 0, sink_mth = 0;
  uint32_t arg_index = 0;  // 0-based declared parameter position
  size_t node = 0;
  std::vector<std::string> trace;  // boot line first, sink entry last
};

struct ExploreResult {
  std::vector<ReachedNode> nodes;
  std::vector<LeakWitness> leaks;
  bool complete = true;  // false when a budget was exhausted
  uint64_t steps = 0;

  std::vector<std::string> trace_of(size_t node) const;
};

class Machine {
 public:
  Machine(const frontend::Hierarchy& hier, const frontend::AnalysisConfig& cfg,
          LifecycleModel model = LifecycleModel::standard());

  const frontend::Hierarchy& hierarchy() const { return *hier_; }
  const frontend::Program& program() const { return hier_->program(); }
  const LifecycleModel& lifecycle() const { return model_; }

  // --- local semantics -----------------------------------------------------

  // Value of rhs in the top frame; nullopt when evaluation is stuck.
  std::optional<Value> eval_rhs(const LocalConfig& lc,
                                const frontend::Rhs& rhs) const;

  // Every applicable local reduction, in a fixed order.
  std::vector<LocalStep> step_local(const LocalConfig& lc) const;

  // --- global semantics ----------------------------------------------------

  std::vector<GlobalStep> step_global(const Configuration& cfg) const;

  // Initial configurations for the launcher class, one per admissible choice
  // of constructor callback arguments.
  std::vector<Configuration> boot(uint32_t launcher_cid) const;

  ExploreResult explore(uint32_t launcher_cid,
                        const ExploreOptions& opts) const;

  // --- auxiliary notions ---------------------------------------------------

  // Deep copy of v with fresh pointers; sharing and cycles are preserved,
  // monitor state is dropped.  Copied cells go to ext; nullopt on dangling
  // pointers.
  std::optional<Value> serialize(const Heap& heap, const Value& v,
                                 uint64_t& next_ptr, Heap& ext) const;

  // Join of the taints of every primitive reachable from v.
  Taint taint_of(const Heap& heap, const Value& v) const;

  // get-type(H, v) <= ty; fails on null and on dangling pointers.
  bool value_type_leq(const Heap& heap, const Value& v, TypeId ty) const;

  // Single normal frame sitting on a return statement.
  bool successful(const CallStack& st) const;

  // Well-formedness: closed stores, register file shapes, at most one active
  // frame, waiting/abnormal marker sanity, field and element typing.
  // Returns a description of the first violation, or nullopt.
  std::optional<std::string> wf_violation(const Configuration& cfg) const;
  std::optional<std::string> wf_violation(const LocalConfig& lc) const;

 private:
  Object new_object(uint32_t cid) const;
  // serialize() with a caller-provided memo, so several values copied into
  // the same extension keep their sharing.
  std::optional<Value> ser_value(
      const Heap& heap, const Value& v, uint64_t& next_ptr, Heap& ext,
      std::unordered_map<uint64_t, Location>& memo) const;
  // Register file + context for a callback frame; one entry per admissible
  // argument vector.
  std::vector<Frame> callback_frames(const Heap& heap, const Location& act,
                                     LifeState s) const;
  std::vector<Value> arg_pool(const Heap& heap, const Location& act,
                              TypeId ty) const;
  bool finished_flag(const Heap& heap, const Location& act) const;
  std::string frame_where(const CallStack& st) const;
  std::optional<std::string> check_stack(const Heap& heap, const CallStack& st,
                                         const Location& owner) const;

  const frontend::Hierarchy* hier_;
  const frontend::AnalysisConfig* cfg_;
  LifecycleModel model_;
  // Interned names of the built-in activity/thread fields.
  Sym f_finished_, f_intent_, f_parent_, f_result_, f_inte_;
};

}  // namespace fstaint::concrete
