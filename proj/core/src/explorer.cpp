/*
 * Copyright (C) 2026 The gbcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gbcalc/explorer.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <limits>
#include <random>
#include <set>
#include <unordered_map>

#include "gbcalc/printer.hpp"

namespace gbcalc {

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Completed: return "Completed";
    case Outcome::BoundExhausted: return "BoundExhausted";
    case Outcome::Deadlock: return "Deadlock";
    case Outcome::Stuck: return "Stuck";
  }
  return "?";
}

std::vector<std::size_t> Trace::schedule() const {
  std::vector<std::size_t> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.thread);
  return out;
}

std::optional<Policy> parse_policy(const std::string& text) {
  if (text == "leftmost") return Policy::leftmost();
  if (text == "roundrobin") return Policy::round_robin();
  if (text.rfind("seed:", 0) == 0 && text.size() > 5) {
    const std::string digits = text.substr(5);
    if (!std::all_of(digits.begin(), digits.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      return std::nullopt;
    }
    try {
      return Policy::seeded(std::stoull(digits));
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

Outcome classify_terminal(const Program& p, const Configuration& c, std::string* diagnostic) {
  bool blocked = false;
  std::string blocked_why;
  for (std::size_t n = 1; n <= c.threads.size(); ++n) {
    StepAttempt a = try_step(p, c, n);
    if (a.status == ThreadStatus::Stuck) {
      if (diagnostic) *diagnostic = "thread " + std::to_string(n) + ": " + a.diagnostic;
      return Outcome::Stuck;
    }
    if (a.status == ThreadStatus::Blocked && !blocked) {
      blocked = true;
      blocked_why = "thread " + std::to_string(n) + ": " + a.diagnostic;
    }
  }
  if (blocked) {
    if (diagnostic) *diagnostic = blocked_why;
    return Outcome::Deadlock;
  }
  if (diagnostic) diagnostic->clear();
  return Outcome::Completed;
}

bool detect_deadlock(const Program& p, const Configuration& c) {
  return !c.threads.empty() && enabled(p, c).empty() && live_thread_count(c) > 0;
}

// ---------------------------------------------------------------------------
// Invariants

namespace {

std::set<Location> lock_union(const Configuration& c) {
  std::set<Location> out;
  for (const auto& t : c.threads) out.insert(t.locks.items().begin(), t.locks.items().end());
  return out;
}

std::uint32_t counter(const Configuration& c, Location l) {
  const Object* o = c.memory.find(l);
  return o ? o->locks : 0;
}

std::optional<Location> lock_target(const Configuration& pre, std::size_t n) {
  const Thread& t = pre.thread(n);
  if (t.stack.empty()) return std::nullopt;
  const CommandPtr& head = head_of(t.top().continuation);
  if (const auto* l = std::get_if<LockCmd>(&head->node)) return l->loc;
  if (const auto* u = std::get_if<UnlockCmd>(&head->node)) return u->loc;
  return std::nullopt;
}

}  // namespace

std::vector<std::string> assert_config_invariants(const Configuration& c) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < c.threads.size(); ++i) {
    const Thread& t = c.threads[i];
    if (t.stack.empty() && !t.locks.empty()) {
      out.push_back("thread " + std::to_string(i + 1) + " finished holding " + to_string(t.locks));
    }
    for (std::size_t j = i + 1; j < c.threads.size(); ++j) {
      for (Location l : t.locks.items()) {
        if (c.threads[j].locks.contains(l)) {
          out.push_back("threads " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                        " both hold " + to_string(l));
        }
      }
    }
  }
  std::set<Location> held = lock_union(c);
  for (Location l : c.memory.locations()) {
    std::uint32_t k = c.memory.at(l).locks;
    if (k > 0 && !held.count(l)) {
      out.push_back(to_string(l) + " has counter " + std::to_string(k) + " but no holder");
    }
  }
  for (Location l : held) {
    if (!c.memory.contains(l)) {
      out.push_back("held lock " + to_string(l) + " is not allocated");
    } else if (c.memory.at(l).locks == 0) {
      out.push_back(to_string(l) + " is held but its counter is 0");
    }
  }
  return out;
}

std::vector<std::string> assert_lock_invariants(const Configuration& pre, std::size_t n,
                                                const StepResult& result) {
  std::vector<std::string> out = assert_config_invariants(result.next);
  const Configuration& post = result.next;
  const std::string at = rule_name(result.rule) + " by thread " + std::to_string(n) + ": ";
  auto fail = [&](const std::string& msg) { out.push_back(at + msg); };

  // Frame: only thread n changes, apart from the inserted or removed thread.
  const auto& a = pre.threads;
  const auto& b = post.threads;
  const std::size_t i = n - 1;
  if (result.rule == Rule::Spawn) {
    if (b.size() != a.size() + 1) {
      fail("pool size did not grow by one");
    } else {
      for (std::size_t j = 0; j < a.size(); ++j) {
        if (j == i) continue;
        if (!(a[j] == b[j < i ? j : j + 1])) fail("thread " + std::to_string(j + 1) + " changed");
      }
      if (!b[i].locks.empty()) fail("spawned thread starts with locks " + to_string(b[i].locks));
      if (b[i].stack.size() != 1) fail("spawned thread must start with one record");
      if (!(b[i + 1].locks == a[i].locks)) fail("spawner lockset changed");
    }
  } else if (result.rule == Rule::EndL || result.rule == Rule::EndR) {
    if (b.size() + 1 != a.size()) {
      fail("pool size did not shrink by one");
    } else {
      if (!a[i].stack.empty()) fail("eliminated thread was still running");
      if (!a[i].locks.empty()) fail("eliminated thread held " + to_string(a[i].locks));
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (!(b[j] == a[j < i ? j : j + 1])) fail("surviving thread changed");
      }
    }
  } else if (b.size() != a.size()) {
    fail("pool size changed");
  } else {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (j != i && !(a[j] == b[j])) fail("thread " + std::to_string(j + 1) + " changed");
    }
  }

  // Locking and unlocking.
  const std::set<Location> u_pre = lock_union(pre);
  const std::set<Location> u_post = lock_union(post);
  auto target = lock_target(pre, n);
  auto is_lock_rule = [](Rule r) {
    return r == Rule::AcquireLock || r == Rule::ReentrantLock || r == Rule::DecreaseLock ||
           r == Rule::ReleaseLock;
  };
  if (is_lock_rule(result.rule) && !target) fail("no lock/unlock at the head");

  if (result.rule == Rule::AcquireLock && target) {
    Location l = *target;
    std::set<Location> expect = u_pre;
    if (!expect.insert(l).second) fail(to_string(l) + " was already held");
    if (u_post != expect) fail("global lockset did not grow by exactly " + to_string(l));
    if (counter(pre, l) != 0 || counter(post, l) != 1) fail("counter did not go 0 -> 1");
    Lockset want = a[i].locks;
    want.insert(l);
    if (b.size() == a.size() && !(b[i].locks == want)) fail("firing lockset did not gain l");
  } else if (result.rule == Rule::ReleaseLock && target) {
    Location l = *target;
    std::set<Location> expect = u_pre;
    if (!expect.erase(l)) fail(to_string(l) + " was not held");
    if (u_post != expect) fail("global lockset did not shrink by exactly " + to_string(l));
    if (counter(pre, l) != 1 || counter(post, l) != 0) fail("counter did not go 1 -> 0");
    if (!a[i].locks.contains(l)) fail("releasing thread does not hold " + to_string(l));
    Lockset want = a[i].locks;
    want.erase(l);
    if (b.size() == a.size() && !(b[i].locks == want)) fail("firing lockset did not lose l");
  } else if (u_post != u_pre) {
    fail("global lockset changed outside acquire/release");
  }

  if (result.rule == Rule::ReentrantLock && target) {
    Location l = *target;
    if (!a[i].locks.contains(l)) fail("reentrant lock on " + to_string(l) + " not held");
    if (counter(post, l) != counter(pre, l) + 1) fail("counter not incremented");
  }
  if (result.rule == Rule::DecreaseLock && target) {
    Location l = *target;
    if (!a[i].locks.contains(l)) fail("decrease on " + to_string(l) + " not held");
    if (counter(pre, l) < 2 || counter(post, l) + 1 != counter(pre, l)) {
      fail("counter not decremented from above 1");
    }
  }
  if (!is_lock_rule(result.rule) && b.size() == a.size() && !(a[i].locks == b[i].locks)) {
    fail("lockset changed without a lock rule");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Deterministic execution

namespace {

struct Attempts {
  std::vector<std::size_t> enabled;
  std::vector<StepAttempt> by_thread;  // index n-1
};

Attempts attempt_all(const Program& p, const Configuration& c, const StepOptions& opts) {
  Attempts out;
  out.by_thread.reserve(c.threads.size());
  for (std::size_t n = 1; n <= c.threads.size(); ++n) {
    out.by_thread.push_back(try_step(p, c, n, opts));
    if (out.by_thread.back().status == ThreadStatus::Enabled) out.enabled.push_back(n);
  }
  return out;
}

void check_or_throw(const Configuration& pre, std::size_t n, const StepResult& r) {
  auto v = assert_lock_invariants(pre, n, r);
  if (!v.empty()) throw LockInvariantError(v.front());
}

template <typename Chooser>
Trace drive(const Program& p, std::size_t max_steps, const StepOptions& opts, Chooser choose) {
  Trace t;
  Configuration c = initial_config(p);
  for (;;) {
    Attempts at = attempt_all(p, c, opts);
    if (at.enabled.empty()) {
      t.outcome = classify_terminal(p, c, &t.diagnostic);
      break;
    }
    if (t.steps.size() >= max_steps) {
      t.outcome = Outcome::BoundExhausted;
      t.diagnostic = "step limit " + std::to_string(max_steps) + " reached";
      break;
    }
    std::size_t n = choose(at.enabled, t.steps.size());
    StepResult& r = *at.by_thread[n - 1].result;
    check_or_throw(c, n, r);
    TraceStep s{c, n, r.rule, r.derivation, events_of_step(p, c, n)};
    t.steps.push_back(std::move(s));
    c = std::move(r.next);
  }
  t.final = std::move(c);
  return t;
}

}  // namespace

Trace run_deterministic(const Program& p, const Policy& policy, std::size_t max_steps,
                        const StepOptions& opts) {
  std::mt19937_64 rng(policy.seed);
  std::size_t last = 0;
  return drive(p, max_steps, opts, [&](const std::vector<std::size_t>& en, std::size_t) {
    switch (policy.kind) {
      case Policy::Kind::Leftmost:
        return en.front();
      case Policy::Kind::RoundRobin: {
        auto it = std::upper_bound(en.begin(), en.end(), last);
        last = it == en.end() ? en.front() : *it;
        return last;
      }
      case Policy::Kind::Seeded: {
        std::uniform_int_distribution<std::size_t> pick(0, en.size() - 1);
        return en[pick(rng)];
      }
    }
    return en.front();
  });
}

Trace replay(const Program& p, const std::vector<std::size_t>& schedule, const StepOptions& opts) {
  Trace t;
  Configuration c = initial_config(p);
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    std::size_t n = schedule[k];
    if (n == 0 || n > c.threads.size()) {
      throw std::logic_error("replay step " + std::to_string(k) + ": no thread " +
                             std::to_string(n));
    }
    StepAttempt a = try_step(p, c, n, opts);
    if (a.status != ThreadStatus::Enabled) {
      throw std::logic_error("replay step " + std::to_string(k) + ": thread " +
                             std::to_string(n) + " not enabled: " + a.diagnostic);
    }
    StepResult& r = *a.result;
    check_or_throw(c, n, r);
    t.steps.push_back(TraceStep{c, n, r.rule, r.derivation, events_of_step(p, c, n)});
    c = std::move(r.next);
  }
  if (enabled(p, c).empty()) {
    t.outcome = classify_terminal(p, c, &t.diagnostic);
  } else {
    t.outcome = Outcome::BoundExhausted;
    t.diagnostic = "schedule ended with enabled threads";
  }
  t.final = std::move(c);
  return t;
}

// ---------------------------------------------------------------------------
// Exploration

std::size_t default_state_cap() {
  if (const char* env = std::getenv("GBC_STATE_CAP")) {
    try {
      std::size_t v = std::stoull(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return 1000000;
}

std::vector<std::size_t> Exploration::schedule_to(std::size_t id) const {
  std::vector<std::size_t> out;
  std::size_t cur = id;
  while (nodes.at(cur).parent) {
    const ExploreEdge& e = edges[*nodes[cur].parent];
    out.push_back(e.thread);
    cur = e.src;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> Exploration::topological_order() const {
  std::vector<std::size_t> indeg(nodes.size(), 0);
  for (const auto& e : edges) ++indeg[e.dst];
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (indeg[i] == 0) ready.push_back(i);
  }
  std::vector<std::size_t> order;
  order.reserve(nodes.size());
  while (!ready.empty()) {
    std::size_t id = ready.front();
    ready.pop_front();
    order.push_back(id);
    for (std::size_t eid : nodes[id].out) {
      if (--indeg[edges[eid].dst] == 0) ready.push_back(edges[eid].dst);
    }
  }
  if (order.size() != nodes.size()) throw std::logic_error("state graph has a cycle");
  return order;
}

std::uint64_t Exploration::count_traces(Outcome o) const {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> paths(nodes.size(), 0);
  if (nodes.empty()) return 0;
  paths[0] = 1;
  std::uint64_t total = 0;
  for (std::size_t id : topological_order()) {
    const auto& node = nodes[id];
    if (node.leaf && *node.leaf == o) total = total > kMax - paths[id] ? kMax : total + paths[id];
    for (std::size_t eid : node.out) {
      auto& d = paths[edges[eid].dst];
      d = d > kMax - paths[id] ? kMax : d + paths[id];
    }
  }
  return total;
}

bool is_macro_rule(Rule r) {
  switch (r) {
    case Rule::Decl:
    case Rule::VarAssign:
    case Rule::FieldAssign:
    case Rule::Invoc:
    case Rule::Spawn:
    case Rule::Sync:
      return true;
    default:
      return false;
  }
}

std::set<std::vector<std::size_t>> Exploration::macro_interleavings(Outcome o,
                                                                    std::size_t path_cap) const {
  std::set<std::vector<std::size_t>> out;
  if (nodes.empty()) return out;
  std::size_t paths = 0;
  std::vector<std::size_t> ids{0};
  std::size_t next_id = 1;
  std::vector<std::size_t> seq;

  auto walk = [&](auto&& self, std::size_t id) -> void {
    const auto& node = nodes[id];
    if (node.out.empty()) {
      if (++paths > path_cap) throw ResourceLimitError("macro interleaving path cap exceeded");
      if (node.leaf && *node.leaf == o) out.insert(seq);
      return;
    }
    for (std::size_t eid : node.out) {
      const auto& e = edges[eid];
      const std::size_t slot = e.thread - 1;
      const std::size_t actor = ids[slot];
      const auto saved_ids = ids;
      const auto saved_next = next_id;
      if (e.rule == Rule::Spawn) {
        ids.insert(ids.begin() + static_cast<std::ptrdiff_t>(slot), next_id++);
      } else if (e.rule == Rule::EndL || e.rule == Rule::EndR) {
        ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(slot));
      }
      const bool macro = is_macro_rule(e.rule);
      if (macro) seq.push_back(actor);
      self(self, e.dst);
      if (macro) seq.pop_back();
      ids = saved_ids;
      next_id = saved_next;
    }
  };
  walk(walk, 0);
  return out;
}

namespace {

class Explorer {
 public:
  Explorer(const Program& p, const ExploreOptions& opts) : p_(p), opts_(opts) {
    x_.bound = opts.bound;
    x_.dedup = opts.dedup;
  }

  Exploration run() {
    Configuration init = initial_config(p_);
    if (opts_.check_invariants) {
      ++x_.stats.invariant_checks;
      record(assert_config_invariants(init));
    }
    add_node(std::move(init), 0, std::nullopt);
    std::deque<std::size_t> work{0};
    while (!work.empty()) {
      std::size_t id;
      if (opts_.dedup) {
        id = work.front();
        work.pop_front();
      } else {
        id = work.back();
        work.pop_back();
      }
      std::vector<std::size_t> children = expand(id);
      if (opts_.dedup) {
        work.insert(work.end(), children.begin(), children.end());
      } else {
        work.insert(work.end(), children.rbegin(), children.rend());
      }
    }
    x_.stats.states = x_.nodes.size();
    x_.stats.transitions = x_.edges.size();
    return std::move(x_);
  }

 private:
  std::size_t add_node(Configuration c, std::size_t depth, std::optional<std::size_t> parent) {
    if (x_.nodes.size() >= opts_.state_cap) {
      throw ResourceLimitError("state cap of " + std::to_string(opts_.state_cap) +
                               " configurations exceeded");
    }
    std::size_t id = x_.nodes.size();
    if (opts_.dedup) seen_[hash_value(c)].push_back(id);
    ExploreNode node;
    node.config = std::move(c);
    node.depth = depth;
    node.parent = parent;
    x_.nodes.push_back(std::move(node));
    x_.stats.max_depth = std::max(x_.stats.max_depth, depth);
    return id;
  }

  std::optional<std::size_t> find_existing(const Configuration& c) {
    auto it = seen_.find(hash_value(c));
    if (it == seen_.end()) return std::nullopt;
    for (std::size_t id : it->second) {
      if (x_.nodes[id].config == c) return id;
    }
    return std::nullopt;
  }

  void record(std::vector<std::string> v) {
    if (v.empty()) return;
    if (opts_.throw_on_violation) throw LockInvariantError(v.front());
    x_.invariant_violations.insert(x_.invariant_violations.end(), v.begin(), v.end());
  }

  std::vector<std::size_t> expand(std::size_t id) {
    std::vector<std::size_t> children;
    // Copy: add_node may reallocate the node vector.
    const Configuration c = x_.nodes[id].config;
    const std::size_t depth = x_.nodes[id].depth;

    std::vector<std::size_t> en;
    std::vector<StepAttempt> attempts;
    for (std::size_t n = 1; n <= c.threads.size(); ++n) {
      try {
        attempts.push_back(try_step(p_, c, n, opts_.step));
      } catch (const InternalConsistencyError& err) {
        record({std::string("thread ") + std::to_string(n) + ": " + err.what()});
        StepAttempt a;
        a.status = ThreadStatus::Stuck;
        a.diagnostic = err.what();
        attempts.push_back(std::move(a));
      }
      if (attempts.back().status == ThreadStatus::Enabled) en.push_back(n);
      if (attempts.back().status == ThreadStatus::Stuck) x_.nodes[id].stuck_threads.push_back(n);
    }

    if (en.empty()) {
      bool blocked = false;
      std::string why;
      for (std::size_t n = 1; n <= attempts.size(); ++n) {
        const auto& a = attempts[n - 1];
        if (a.status == ThreadStatus::Stuck) {
          x_.nodes[id].leaf = Outcome::Stuck;
          x_.nodes[id].diagnostic = "thread " + std::to_string(n) + ": " + a.diagnostic;
          ++x_.stats.stuck;
          return children;
        }
        if (a.status == ThreadStatus::Blocked && !blocked) {
          blocked = true;
          why = "thread " + std::to_string(n) + ": " + a.diagnostic;
        }
      }
      x_.nodes[id].leaf = blocked ? Outcome::Deadlock : Outcome::Completed;
      x_.nodes[id].diagnostic = why;
      ++(blocked ? x_.stats.deadlocks : x_.stats.completed);
      return children;
    }
    if (depth >= opts_.bound) {
      x_.nodes[id].leaf = Outcome::BoundExhausted;
      ++x_.stats.bound_exhausted;
      return children;
    }

    for (std::size_t n : en) {
      StepResult& r = *attempts[n - 1].result;
      if (opts_.check_invariants) {
        ++x_.stats.invariant_checks;
        record(assert_lock_invariants(c, n, r));
      }
      ExploreEdge e;
      e.src = id;
      e.thread = n;
      e.rule = r.rule;
      e.derivation = r.derivation;
      e.events = events_of_step(p_, c, n);
      const std::size_t eid = x_.edges.size();

      std::optional<std::size_t> dst;
      if (opts_.dedup) dst = find_existing(r.next);
      if (!dst) {
        dst = add_node(std::move(r.next), depth + 1, eid);
        children.push_back(*dst);
      }
      e.dst = *dst;
      x_.edges.push_back(std::move(e));
      x_.nodes[id].out.push_back(eid);
      x_.nodes[*dst].in.push_back(eid);
    }
    return children;
  }

  const Program& p_;
  const ExploreOptions& opts_;
  Exploration x_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> seen_;
};

}  // namespace

Exploration explore(const Program& p, const ExploreOptions& opts) {
  return Explorer(p, opts).run();
}

}  // namespace gbcalc
