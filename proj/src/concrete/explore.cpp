#include <algorithm>
#include <deque>
#include <unordered_map>

#include "fstaint/concrete/machine.hpp"

namespace fstaint::concrete {

using namespace frontend;

std::vector<std::string> ExploreResult::trace_of(size_t node) const {
  std::vector<std::string> t;
  for (int32_t i = static_cast<int32_t>(node); i >= 0; i = nodes[i].parent)
    t.push_back(nodes[i].line);
  std::reverse(t.begin(), t.end());
  return t;
}

ExploreResult Machine::explore(uint32_t launcher_cid,
                               const ExploreOptions& opts) const {
  ExploreResult res;
  const Program& p = program();

  // A leak: a sink method entered (pc 0) with a secret reachable from one of
  // its declared parameters.  One witness per (sink, parameter).
  auto scan = [&](size_t idx) {
    const Configuration& c = res.nodes[idx].cfg;
    auto scan_stack = [&](const CallStack& st) {
      if (st.frames.empty()) return;
      const Frame& f = st.frames.back();
      if (f.pp.pc != 0) return;
      Sym cs = p.cls(f.pp.cls).name;
      const MethodDef& m = p.cls(f.pp.cls).methods[f.pp.mth];
      if (!cfg_->is_sink(cs, m.name)) return;
      for (uint32_t j = 0; j < m.params.size(); ++j) {
        if (taint_of(c.heap, f.regs[m.param_reg(j)]) != Taint::Secret)
          continue;
        bool dup = false;
        for (const LeakWitness& w : res.leaks)
          dup = dup || (w.sink_cls == cs && w.sink_mth == m.name &&
                        w.arg_index == j);
        if (dup) continue;
        LeakWitness w{cs, m.name, j, idx, res.trace_of(idx)};
        res.leaks.push_back(std::move(w));
      }
    };
    for (const ActivityFrame& af : c.activities) scan_stack(af.stack);
    for (const ThreadFrame& tf : c.threads) scan_stack(tf.stack);
  };

  std::unordered_map<std::string, size_t> seen;
  auto add_node = [&](Configuration&& c, int32_t parent,
                      std::string line) -> std::optional<size_t> {
    std::string fp = fingerprint(c);
    if (seen.count(fp)) return std::nullopt;
    if (res.nodes.size() >= opts.max_configs) {
      res.complete = false;
      return std::nullopt;
    }
    size_t idx = res.nodes.size();
    seen.emplace(std::move(fp), idx);
    res.nodes.push_back({std::move(c), parent, std::move(line)});
    scan(idx);
    return idx;
  };

  std::vector<size_t> frontier;
  for (Configuration& c : boot(launcher_cid))
    if (auto idx = add_node(std::move(c), -1, "boot | - | -"))
      frontier.push_back(*idx);

  // Breadth-first search.  With a schedule, the search runs in stages: as
  // soon as some step starts the next waypoint callback, exploration commits
  // to that node and restarts from it alone.
  size_t wp = 0;
  while (true) {
    std::deque<size_t> queue(frontier.begin(), frontier.end());
    frontier.clear();
    std::optional<size_t> committed;
    while (!queue.empty() && !committed) {
      if (res.steps >= opts.max_steps) {
        res.complete = false;
        break;
      }
      size_t cur = queue.front();
      queue.pop_front();
      res.steps += 1;
      for (GlobalStep& gs : step_global(res.nodes[cur].cfg)) {
        bool fires = wp < opts.schedule.size() && gs.fired_user_cb &&
                     p.name(gs.fired_cb) == opts.schedule[wp];
        std::string line =
            std::string(gs.rule) + " | " + gs.frame_id + " | " + gs.where;
        auto idx =
            add_node(std::move(gs.next), static_cast<int32_t>(cur),
                     std::move(line));
        if (!idx) continue;
        if (fires) {
          committed = idx;
          break;
        }
        queue.push_back(*idx);
      }
    }
    if (!committed) break;  // drained (or budget); any leftover waypoints
                            // were unreachable
    wp += 1;
    seen.clear();
    seen.emplace(fingerprint(res.nodes[*committed].cfg), *committed);
    frontier = {*committed};
  }
  return res;
}

}  // namespace fstaint::concrete
