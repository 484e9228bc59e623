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

#include "gbcalc/checkers.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <tuple>

#include "gbcalc/printer.hpp"
#include "gbcalc/validate.hpp"

namespace gbcalc {

std::string to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Violated: return "Violated";
    case VerdictStatus::HoldsUpToBound: return "HoldsUpToBound";
    case VerdictStatus::Holds: return "Holds";
  }
  return "?";
}

namespace {

constexpr std::size_t kMaxFindings = 64;

using LocSet = std::vector<Location>;  // sorted, unique

LocSet merge(const LocSet& a, const LocSet& b) {
  LocSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool has(const LocSet& s, Location l) { return std::binary_search(s.begin(), s.end(), l); }

bool same_method(const ActivationRecord& r, const VarTarget& t) {
  return r.class_name == t.class_name && r.method == t.method;
}

/// Locations bound to the target in one configuration: every frame of the
/// target method in every thread, or field f of every object.
LocSet node_bindings(const Configuration& c, const AnnotationTarget& target) {
  std::set<Location> out;
  if (const auto* v = std::get_if<VarTarget>(&target)) {
    for (const auto& t : c.threads) {
      for (const auto& r : t.stack) {
        if (!same_method(r, *v)) continue;
        if (auto l = r.env.get(v->var)) out.insert(*l);
      }
    }
  } else {
    const auto& f = std::get<FieldTarget>(target).field;
    for (Location l : c.memory.locations()) {
      if (auto val = c.memory.at(l).fields.get(f)) out.insert(*val);
    }
  }
  return {out.begin(), out.end()};
}

/// Per-node unions of bindings over all predecessors (inclusive) and all
/// successors (inclusive).
struct BindingIndex {
  std::vector<LocSet> anc;
  std::vector<LocSet> desc;

  BindingIndex(const Exploration& x, const AnnotationTarget& target, bool with_desc) {
    const std::size_t n = x.nodes.size();
    std::vector<LocSet> own(n);
    for (std::size_t i = 0; i < n; ++i) own[i] = node_bindings(x.nodes[i].config, target);
    const auto order = x.topological_order();
    anc = own;
    for (std::size_t id : order) {
      for (std::size_t eid : x.nodes[id].out) {
        auto& d = anc[x.edges[eid].dst];
        d = merge(d, anc[id]);
      }
    }
    if (!with_desc) return;
    desc = own;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      for (std::size_t eid : x.nodes[*it].out) desc[*it] = merge(desc[*it], desc[x.edges[eid].dst]);
    }
  }
};

struct GuardValue {
  std::optional<Location> loc;
  std::string error;
};

GuardValue eval_guard(const Program& p, const Expr& guard, const Environment& env,
                      const Memory& mem, std::uint32_t next) {
  next = std::max<std::uint32_t>(next, static_cast<std::uint32_t>(mem.slot_count()));
  EvalResult r = eval_expr(p, guard, env, mem, next);
  if (const auto* err = std::get_if<EvalError>(&r)) return {std::nullopt, err->message()};
  return {std::get<Evaluated>(r).loc, {}};
}

bool uses_name(const Expr& e, const std::string& name) {
  auto vars = free_variables(e);
  return std::find(vars.begin(), vars.end(), name) != vars.end();
}

class VerdictBuilder {
 public:
  VerdictBuilder(const Exploration& x) : x_(x) { v_.bound = x.bound; }

  void point() { ++v_.check_points; }

  void add_at_edge(std::size_t eid, std::optional<Location> loc, std::string why,
                   bool early = false) {
    push({x_.nodes[x_.edges[eid].src].depth, eid, true, loc, std::move(why), early});
  }

  void add_at_node(std::size_t id, std::optional<Location> loc, std::string why) {
    push({x_.nodes[id].depth, id, false, loc, std::move(why), false});
  }

  Verdict finish() {
    std::sort_heap(best_.begin(), best_.end(), before);
    for (auto& b : best_) v_.findings.push_back(materialize(b));
    if (v_.finding_count > 0) {
      v_.status = VerdictStatus::Violated;
    } else {
      v_.status = x_.complete() ? VerdictStatus::Holds : VerdictStatus::HoldsUpToBound;
    }
    return std::move(v_);
  }

 private:
  struct Pending {
    std::size_t depth;
    std::size_t key;  // edge id or node id
    bool at_edge;
    std::optional<Location> loc;
    std::string why;
    bool early;
  };

  static bool before(const Pending& a, const Pending& b) {
    return std::tie(a.depth, a.at_edge, a.key) < std::tie(b.depth, b.at_edge, b.key);
  }

  // Max-heap of the kMaxFindings shallowest findings.
  void push(Pending p) {
    ++v_.finding_count;
    if (best_.size() < kMaxFindings) {
      best_.push_back(std::move(p));
      std::push_heap(best_.begin(), best_.end(), before);
    } else if (before(p, best_.front())) {
      std::pop_heap(best_.begin(), best_.end(), before);
      best_.back() = std::move(p);
      std::push_heap(best_.begin(), best_.end(), before);
    }
  }

  Finding materialize(const Pending& p) const {
    Finding f;
    f.location = p.loc;
    f.early_dereference = p.early;
    if (p.at_edge) {
      const ExploreEdge& e = x_.edges[p.key];
      f.schedule = x_.schedule_to(e.src);
      f.schedule.push_back(e.thread);
      f.step_index = f.schedule.size() - 1;
      f.thread = e.thread;
      f.explanation = "step " + std::to_string(f.step_index) + ", thread " +
                      std::to_string(e.thread) + ": " + p.why;
    } else {
      f.schedule = x_.schedule_to(p.key);
      f.step_index = f.schedule.size();
      f.explanation = "configuration after " + std::to_string(f.step_index) + " steps: " + p.why;
    }
    return f;
  }

  const Exploration& x_;
  Verdict v_;
  std::vector<Pending> best_;
};

std::string lock_message(const std::string& guard, Location got, const Lockset& held) {
  return "guard " + guard + " evaluates to " + to_string(got) + ", held locks " + to_string(held);
}

const ActivationRecord* firing_record(const Exploration& x, const ExploreEdge& e) {
  const Thread& t = x.nodes[e.src].config.thread(e.thread);
  return t.stack.empty() ? nullptr : &t.top();
}

}  // namespace

// ---------------------------------------------------------------------------
// Name protection

namespace {

// Edges whose step can meet a check point; the checkers below skip the rest
// anyway, so restricting to these only saves time.
std::vector<std::size_t> name_var_edges(const Exploration& x, const VarTarget& target) {
  std::vector<std::size_t> out;
  for (std::size_t eid = 0; eid < x.edges.size(); ++eid) {
    const ActivationRecord* rec = firing_record(x, x.edges[eid]);
    if (rec && same_method(*rec, target) && accesses_var(x.edges[eid].events.accessed, target.var)) {
      out.push_back(eid);
    }
  }
  return out;
}

std::vector<std::size_t> name_field_edges(const Exploration& x, const std::string& field) {
  std::vector<std::size_t> out;
  for (std::size_t eid = 0; eid < x.edges.size(); ++eid) {
    if (firing_record(x, x.edges[eid]) &&
        !field_containers(x.edges[eid].events.accessed, field).empty()) {
      out.push_back(eid);
    }
  }
  return out;
}

std::vector<std::size_t> value_edges(const Exploration& x, const BindingIndex& idx) {
  std::vector<std::size_t> out;
  for (std::size_t eid = 0; eid < x.edges.size(); ++eid) {
    const ExploreEdge& e = x.edges[eid];
    if (!firing_record(x, e)) continue;
    for (const auto& t : e.events.derefs) {
      if (has(idx.anc[e.src], t.loc) || has(idx.desc[e.dst], t.loc)) {
        out.push_back(eid);
        break;
      }
    }
  }
  return out;
}

Verdict name_var_on(const Program& p, const Exploration& x, const VarTarget& target,
                    const Expr& guard, const std::vector<std::size_t>& edges) {
  VerdictBuilder vb(x);
  const std::string g = to_string(guard);
  for (std::size_t eid : edges) {
    const ExploreEdge& e = x.edges[eid];
    const ActivationRecord* rec = firing_record(x, e);
    if (!rec || !same_method(*rec, target)) continue;
    if (!accesses_var(e.events.accessed, target.var)) continue;
    vb.point();
    const Configuration& c = x.nodes[e.src].config;
    Environment env = rec->env;
    if (auto l = rec->env.get(target.var)) env.set(kItself, *l);
    GuardValue gv = eval_guard(p, guard, env, c.memory, c.next_location);
    const std::string what = "accesses " + target.var + " in " + target.class_name + "." +
                             target.method + "; ";
    if (!gv.loc) {
      vb.add_at_edge(eid, std::nullopt, what + "guard not evaluable: " + gv.error);
    } else if (!e.events.locks_held.contains(*gv.loc)) {
      vb.add_at_edge(eid, gv.loc, what + lock_message(g, *gv.loc, e.events.locks_held));
    }
  }
  return vb.finish();
}

Verdict name_field_on(const Program& p, const Exploration& x, const std::string& field,
                      const Expr& guard, const std::vector<std::size_t>& edges) {
  VerdictBuilder vb(x);
  const std::string g = to_string(guard);
  const bool needs_itself = uses_name(guard, kItself);
  for (std::size_t eid : edges) {
    const ExploreEdge& e = x.edges[eid];
    const ActivationRecord* rec = firing_record(x, e);
    if (!rec) continue;
    auto containers = field_containers(e.events.accessed, field);
    if (containers.empty()) continue;
    const Configuration& c = x.nodes[e.src].config;
    AllocationPlan plan = step_plan(*rec->continuation, c.next_location);
    for (const auto& container : containers) {
      vb.point();
      const std::string what = "accesses " + to_string(*container) + "." + field + "; ";
      EvalResult cr = eval_planned(p, *container, rec->env, c.memory, plan);
      if (const auto* err = std::get_if<EvalError>(&cr)) {
        vb.add_at_edge(eid, std::nullopt, what + "container not evaluable: " + err->message());
        continue;
      }
      const auto& cev = std::get<Evaluated>(cr);
      Environment env = rec->env;
      env.set(kThis, cev.loc);
      const Object* o = cev.memory.find(cev.loc);
      std::optional<Location> value = o ? o->fields.get(field) : std::nullopt;
      if (value) {
        env.set(kItself, *value);
      } else if (needs_itself) {
        vb.add_at_edge(eid, std::nullopt,
                       what + "guard not evaluable: field " + field + " of " +
                           to_string(cev.loc) + " is unset, so itself is undefined");
        continue;
      }
      GuardValue gv = eval_guard(p, guard, env, cev.memory, plan.next_after);
      if (!gv.loc) {
        vb.add_at_edge(eid, std::nullopt, what + "guard not evaluable: " + gv.error);
      } else if (!e.events.locks_held.contains(*gv.loc)) {
        vb.add_at_edge(eid, gv.loc, what + lock_message(g, *gv.loc, e.events.locks_held));
      }
    }
  }
  return vb.finish();
}

}  // namespace

Verdict check_name_var(const Program& p, const Exploration& x, const VarTarget& target,
                       const Expr& guard) {
  return name_var_on(p, x, target, guard, name_var_edges(x, target));
}

Verdict check_name_field(const Program& p, const Exploration& x, const std::string& field,
                         const Expr& guard) {
  return name_field_on(p, x, field, guard, name_field_edges(x, field));
}

// ---------------------------------------------------------------------------
// Value protection

namespace {

Verdict check_value(const Program& p, const Exploration& x, const AnnotationTarget& target,
                    const Expr& guard, const BindingIndex& idx,
                    const std::vector<std::size_t>& edges) {
  VerdictBuilder vb(x);
  const std::string g = to_string(guard);
  for (std::size_t eid : edges) {
    const ExploreEdge& e = x.edges[eid];
    const ActivationRecord* rec = firing_record(x, e);
    if (!rec) continue;
    const auto locs = derefloc(e.events.derefs);
    if (locs.empty()) continue;
    const LocSet& before = idx.anc[e.src];
    const LocSet& after = idx.desc[e.dst];
    const Configuration& c = x.nodes[e.src].config;
    for (Location l : locs) {
      const bool past = has(before, l);
      if (!past && !has(after, l)) continue;
      vb.point();
      Environment env = rec->env;
      env.set(kItself, l);
      GuardValue gv = eval_guard(p, guard, env, c.memory, c.next_location);
      const std::string what = "dereferences " + to_string(l) + " bound to " +
                               to_string(target) + (past ? "" : " (bound later)") + "; ";
      if (!gv.loc) {
        vb.add_at_edge(eid, l, what + "guard not evaluable: " + gv.error, !past);
      } else if (!e.events.locks_held.contains(*gv.loc)) {
        vb.add_at_edge(eid, l, what + lock_message(g, *gv.loc, e.events.locks_held), !past);
      }
    }
  }
  return vb.finish();
}

}  // namespace

Verdict check_value_var(const Program& p, const Exploration& x, const VarTarget& target,
                        const Expr& guard) {
  BindingIndex idx(x, target, /*with_desc=*/true);
  return check_value(p, x, target, guard, idx, value_edges(x, idx));
}

Verdict check_value_field(const Program& p, const Exploration& x, const std::string& field,
                          const Expr& guard) {
  FieldTarget t{field};
  BindingIndex idx(x, t, /*with_desc=*/true);
  return check_value(p, x, t, guard, idx, value_edges(x, idx));
}

Verdict check_annotation(const Program& p, const Exploration& x, const Annotation& a) {
  return CheckSession(p, x).check(a);
}

// ---------------------------------------------------------------------------
// Races

std::vector<std::pair<Location, std::string>> RaceReport::sites() const {
  std::set<std::pair<Location, std::string>> s;
  for (const auto& r : races) s.emplace(r.loc, r.field);
  return {s.begin(), s.end()};
}

RaceReport detect_races(const Exploration& x) {
  RaceReport rep;
  rep.complete = x.complete();
  for (std::size_t id = 0; id < x.nodes.size(); ++id) {
    const auto& out = x.nodes[id].out;
    if (out.size() < 2) continue;
    std::set<std::tuple<Location, std::string, std::size_t, std::size_t>> seen;
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = 0; j < out.size(); ++j) {
        if (i == j) continue;
        const ExploreEdge& a = x.edges[out[i]];
        const ExploreEdge& b = x.edges[out[j]];
        if (a.thread == b.thread) continue;
        for (const auto& ta : a.events.derefs) {
          if (ta.mode != DerefMode::Write) continue;
          for (DerefMode m : {DerefMode::Write, DerefMode::Read}) {
            if (!b.events.derefs.count(DerefToken{ta.loc, ta.field, m})) continue;
            auto key = std::make_tuple(ta.loc, ta.field, std::min(a.thread, b.thread),
                                       std::max(a.thread, b.thread));
            if (!seen.insert(key).second) break;
            rep.races.push_back(Race{id, x.schedule_to(id), ta.loc, ta.field, a.thread, b.thread, m});
            break;
          }
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Non-aliasing

namespace {

struct VarBinder {
  std::size_t thread;
  std::size_t frame;
  const ActivationRecord* rec;
  std::string var;
  Location loc;
};

struct FieldBinder {
  Location container;
  std::string field;
  Location loc;
};

std::string describe(const VarBinder& b) {
  return "variable " + b.var + " of " + b.rec->class_name + "." + b.rec->method + " in thread " +
         std::to_string(b.thread);
}

std::string describe(const FieldBinder& b) {
  return "field " + b.field + " of " + to_string(b.container);
}

std::optional<std::string> alias_in(const Configuration& c, const AnnotationTarget& target,
                                    Location* where) {
  std::vector<VarBinder> vars;
  std::vector<FieldBinder> fields;
  for (std::size_t t = 0; t < c.threads.size(); ++t) {
    const auto& stack = c.threads[t].stack;
    for (std::size_t f = 0; f < stack.size(); ++f) {
      for (const auto& [name, loc] : stack[f].env.entries()) {
        vars.push_back({t + 1, f, &stack[f], name, loc});
      }
    }
  }
  for (Location l : c.memory.locations()) {
    for (const auto& [name, loc] : c.memory.at(l).fields.entries()) fields.push_back({l, name, loc});
  }

  if (const auto* v = std::get_if<VarTarget>(&target)) {
    for (const auto& b : vars) {
      if (b.var != v->var || !same_method(*b.rec, *v)) continue;
      for (const auto& o : vars) {
        if (o.loc != b.loc || (o.thread == b.thread && o.frame == b.frame && o.var == b.var)) continue;
        *where = b.loc;
        return describe(b) + " and " + describe(o) + " both hold " + to_string(b.loc);
      }
      for (const auto& o : fields) {
        if (o.loc != b.loc) continue;
        *where = b.loc;
        return describe(b) + " and " + describe(o) + " both hold " + to_string(b.loc);
      }
    }
    return std::nullopt;
  }
  const auto& name = std::get<FieldTarget>(target).field;
  for (const auto& b : fields) {
    if (b.field != name) continue;
    for (const auto& o : vars) {
      if (o.loc != b.loc) continue;
      *where = b.loc;
      return describe(b) + " and " + describe(o) + " both hold " + to_string(b.loc);
    }
    for (const auto& o : fields) {
      if (o.loc != b.loc || (o.container == b.container && o.field == b.field)) continue;
      *where = b.loc;
      return describe(b) + " and " + describe(o) + " both hold " + to_string(b.loc);
    }
  }
  return std::nullopt;
}

}  // namespace

Verdict check_nonaliased(const Program&, const Exploration& x, const AnnotationTarget& target) {
  VerdictBuilder vb(x);
  for (std::size_t id = 0; id < x.nodes.size(); ++id) {
    vb.point();
    Location where;
    if (auto why = alias_in(x.nodes[id].config, target, &where)) vb.add_at_node(id, where, *why);
  }
  return vb.finish();
}

// ---------------------------------------------------------------------------
// Race freedom

GuardCheck check_guard_wellformed(const Expr& guard, ProtectionSemantics semantics,
                                  const AnnotationTarget& target) {
  GuardCheck out;
  const bool this_ok =
      semantics == ProtectionSemantics::Name && std::holds_alternative<FieldTarget>(target);
  for (const auto& v : free_variables(guard)) {
    if (v == kItself || (this_ok && v == kThis)) continue;
    out.ok = false;
    out.diagnostics.push_back("guard " + to_string(guard) + " uses variable '" + v +
                              "'; only itself" + (this_ok ? " and this are" : " is") +
                              " allowed here");
  }
  return out;
}

std::vector<Location> bindings_up_to(const Exploration& x, const AnnotationTarget& target,
                                     std::size_t id) {
  std::set<std::size_t> seen{id};
  std::deque<std::size_t> work{id};
  LocSet acc;
  while (!work.empty()) {
    std::size_t cur = work.front();
    work.pop_front();
    acc = merge(acc, node_bindings(x.nodes[cur].config, target));
    for (std::size_t eid : x.nodes[cur].in) {
      if (seen.insert(x.edges[eid].src).second) work.push_back(x.edges[eid].src);
    }
  }
  return acc;
}

TheoremReport verify_race_freedom(const Program& p, const Exploration& x, const Annotation& a) {
  return CheckSession(p, x).verify(a);
}

// ---------------------------------------------------------------------------
// Sessions

struct CheckSession::Impl {
  const Program& p;
  const Exploration& x;
  std::map<std::string, std::unique_ptr<BindingIndex>> indexes;
  std::map<std::string, Verdict> nonaliased;
  std::map<std::string, std::vector<std::size_t>> edges;
  std::optional<RaceReport> races;

  const BindingIndex& index(const AnnotationTarget& t) {
    auto& slot = indexes[to_string(t)];
    if (!slot) slot = std::make_unique<BindingIndex>(x, t, /*with_desc=*/true);
    return *slot;
  }

  const std::vector<std::size_t>& relevant(const AnnotationTarget& t, ProtectionSemantics sem) {
    const std::string key = to_string(sem) + " " + to_string(t);
    auto it = edges.find(key);
    if (it != edges.end()) return it->second;
    std::vector<std::size_t> e;
    if (sem == ProtectionSemantics::Value) {
      e = value_edges(x, index(t));
    } else if (const auto* v = std::get_if<VarTarget>(&t)) {
      e = name_var_edges(x, *v);
    } else {
      e = name_field_edges(x, std::get<FieldTarget>(t).field);
    }
    return edges.emplace(key, std::move(e)).first->second;
  }
};

CheckSession::CheckSession(const Program& p, const Exploration& x)
    : impl_(std::make_unique<Impl>(Impl{p, x, {}, {}, {}, {}})) {}

CheckSession::~CheckSession() = default;

Verdict CheckSession::check(const Annotation& a) {
  const Program& p = impl_->p;
  const Exploration& x = impl_->x;
  const auto& edges = impl_->relevant(a.target, a.semantics);
  if (a.semantics == ProtectionSemantics::Value) {
    return check_value(p, x, a.target, *a.guard, impl_->index(a.target), edges);
  }
  if (const auto* v = std::get_if<VarTarget>(&a.target)) {
    return name_var_on(p, x, *v, *a.guard, edges);
  }
  return name_field_on(p, x, std::get<FieldTarget>(a.target).field, *a.guard, edges);
}

Verdict CheckSession::nonaliased(const AnnotationTarget& target) {
  const std::string key = to_string(target);
  auto it = impl_->nonaliased.find(key);
  if (it == impl_->nonaliased.end()) {
    it = impl_->nonaliased.emplace(key, check_nonaliased(impl_->p, impl_->x, target)).first;
  }
  return it->second;
}

const RaceReport& CheckSession::races() {
  if (!impl_->races) impl_->races = detect_races(impl_->x);
  return *impl_->races;
}

TheoremReport CheckSession::verify(const Annotation& a) {
  TheoremReport r;
  r.annotation = a;
  r.wellformed = check_guard_wellformed(*a.guard, a.semantics, a.target);
  if (a.semantics == ProtectionSemantics::Name) r.nonaliased = nonaliased(a.target);
  r.protection = check(a);

  const BindingIndex& idx = impl_->index(a.target);
  const RaceReport& all = races();
  r.restricted.complete = all.complete;
  for (const auto& race : all.races) {
    if (has(idx.anc[race.node], race.loc)) r.restricted.races.push_back(race);
  }

  std::vector<std::string> failed;
  if (!r.wellformed.ok) failed.push_back("guard is not well-formed");
  if (r.nonaliased && r.nonaliased->status == VerdictStatus::Violated) {
    failed.push_back(to_string(a.target) + " is aliased");
  }
  if (r.protection.status == VerdictStatus::Violated) {
    failed.push_back(to_string(a.target) + " is not " + to_string(a.semantics) + "-protected");
  }
  r.hypotheses_hold = failed.empty();
  if (!r.hypotheses_hold) {
    r.hypotheses_status = VerdictStatus::Violated;
    r.explanation = "no race-freedom guarantee applies: ";
    for (std::size_t i = 0; i < failed.size(); ++i) r.explanation += (i ? "; " : "") + failed[i];
    return r;
  }
  const bool all_hold = r.protection.status == VerdictStatus::Holds &&
                        (!r.nonaliased || r.nonaliased->status == VerdictStatus::Holds);
  r.hypotheses_status = all_hold ? VerdictStatus::Holds : VerdictStatus::HoldsUpToBound;
  if (!r.restricted.empty()) {
    const Race& race = r.restricted.races.front();
    throw SoundnessError("hypotheses hold for " + to_string(a.target) + " but threads " +
                         std::to_string(race.thread_a) + " and " + std::to_string(race.thread_b) +
                         " race on " + to_string(race.loc) + "." + race.field);
  }
  r.explanation = "hypotheses hold; no race at locations bound to " + to_string(a.target);
  return r;
}

// ---------------------------------------------------------------------------
// Inference

std::vector<ExprPtr> default_candidates(const Program& p) {
  const auto fields = field_names(p);
  std::vector<ExprPtr> out;
  for (const char* root : {kItself, kThis}) out.push_back(make_var(root));
  for (const char* root : {kThis, kItself}) {
    for (const auto& f : fields) out.push_back(make_field(make_var(root), f));
  }
  for (const char* root : {kThis, kItself}) {
    for (const auto& f : fields) {
      for (const auto& g : fields) out.push_back(make_field(make_field(make_var(root), f), g));
    }
  }
  return out;
}

Inference infer_guards(const Program& p, const Exploration& x, const AnnotationTarget& target,
                       ProtectionSemantics semantics, const std::vector<ExprPtr>& candidates) {
  return CheckSession(p, x).infer(target, semantics, candidates);
}

Inference CheckSession::infer(const AnnotationTarget& target, ProtectionSemantics semantics,
                              const std::vector<ExprPtr>& candidates) {
  Inference inf;
  inf.complete = impl_->x.complete();
  bool any_points = false;
  for (const auto& c : candidates) {
    Verdict v = check(Annotation{target, c, semantics});
    any_points = any_points || !v.vacuous();
    if (v.status != VerdictStatus::Violated) inf.guards.push_back(c);
  }
  inf.vacuous = !any_points;
  return inf;
}

}  // namespace gbcalc
