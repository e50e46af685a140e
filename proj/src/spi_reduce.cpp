#include "lampi/spi_reduce.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace lampi {

std::string to_string(PiRuleTag t) {
  switch (t) {
    case PiRuleTag::Comm: return "Comm";
    case PiRuleTag::Forw: return "Forw";
    case PiRuleTag::Close: return "Close";
    case PiRuleTag::Some: return "Some";
    case PiRuleTag::None: return "None";
  }
  return "?";
}

namespace {

struct Cluster {
  std::vector<std::pair<Name, SPtr>> block;
  std::vector<ProcPtr> comps;
};

Cluster split_cluster(const ProcPtr& p) {
  Cluster c;
  ProcPtr cur = p;
  while (auto* res = std::get_if<PRes>(&cur->node)) {
    c.block.emplace_back(res->name, res->annot);
    cur = res->body;
  }
  // flatten the parallel body
  std::vector<ProcPtr> stack{cur};
  while (!stack.empty()) {
    ProcPtr q = stack.back();
    stack.pop_back();
    if (auto* par = std::get_if<PPar>(&q->node)) {
      stack.push_back(par->right);
      stack.push_back(par->left);
      continue;
    }
    if (std::holds_alternative<PNil>(q->node)) continue;
    c.comps.push_back(q);
  }
  return c;
}

ProcPtr rebuild_cluster(const Cluster& c) {
  ProcPtr body = p_par_all(c.comps);
  for (size_t b = c.block.size(); b-- > 0;)
    body = p_res(c.block[b].first, c.block[b].second, body);
  return body;
}

void cluster_steps_choice(const ProcPtr& p, std::vector<PiStep>& out,
                          std::vector<int> prefix);

int fresh_tick = 0;

Name fresh_name(const std::string& base) {
  return Name{base, 3000000 + fresh_tick++};
}

// Communication between components i and j of a cluster, if any.
std::optional<std::pair<PiRuleTag, ProcPtr>> try_axiom(const ProcPtr& a,
                                                       const ProcPtr& b) {
  // Comm
  if (auto* out = std::get_if<POut>(&a->node)) {
    if (auto* in = std::get_if<PIn>(&b->node);
        in && in->subject == out->subject) {
      Name z = out->bound;
      VarSet qfree = free_names(b);
      if (contains(qfree, z)) z = fresh_name(z.base);
      ProcPtr left = subst_name(out->cont, out->bound, z);
      ProcPtr right = subst_name(in->cont, in->bound, z);
      return std::make_pair(PiRuleTag::Comm,
                            p_res(z, nullptr, p_par(left, right)));
    }
  }
  // Close
  if (auto* co = std::get_if<PCloseOut>(&a->node)) {
    if (auto* ci = std::get_if<PCloseIn>(&b->node);
        ci && ci->subject == co->subject)
      return std::make_pair(PiRuleTag::Close, ci->cont);
  }
  // Some
  if (auto* so = std::get_if<PSomeOut>(&a->node)) {
    if (auto* si = std::get_if<PSomeIn>(&b->node);
        si && si->subject == so->subject)
      return std::make_pair(PiRuleTag::Some, p_par(so->cont, si->cont));
  }
  // None
  if (auto* no = std::get_if<PNoneOut>(&a->node)) {
    if (auto* si = std::get_if<PSomeIn>(&b->node);
        si && si->subject == no->subject) {
      std::vector<ProcPtr> fails;
      for (auto& w : si->deps) fails.push_back(p_none_out(w));
      return std::make_pair(PiRuleTag::None, p_par_all(std::move(fails)));
    }
  }
  return std::nullopt;
}

void cluster_steps(const ProcPtr& cl, std::vector<PiStep>& out,
                   std::vector<int> prefix) {
  Cluster c = split_cluster(cl);
  // axiom synchronizations between two components
  for (size_t i = 0; i < c.comps.size(); i++) {
    for (size_t j = 0; j < c.comps.size(); j++) {
      if (i == j) continue;
      if (auto r = try_axiom(c.comps[i], c.comps[j])) {
        Cluster next;
        next.block = c.block;
        for (size_t k = 0; k < c.comps.size(); k++)
          if (k != i && k != j) next.comps.push_back(c.comps[k]);
        next.comps.push_back(r->second);
        std::vector<int> path = prefix;
        path.push_back(int(std::min(i, j)));
        path.push_back(int(std::max(i, j)));
        out.push_back({r->first, std::move(path),
                       canonical_form(rebuild_cluster(next))});
      }
    }
  }
  // forwarder elimination against a restricted name
  for (size_t i = 0; i < c.comps.size(); i++) {
    auto* fwd = std::get_if<PFwd>(&c.comps[i]->node);
    if (!fwd) continue;
    for (size_t b = 0; b < c.block.size(); b++) {
      Name x = c.block[b].first;
      Name target;
      if (fwd->a == x && fwd->b != x)
        target = fwd->b;
      else if (fwd->b == x && fwd->a != x)
        target = fwd->a;
      else
        continue;
      Cluster next;
      for (size_t k = 0; k < c.block.size(); k++)
        if (k != b) next.block.push_back(c.block[k]);
      for (size_t k = 0; k < c.comps.size(); k++) {
        if (k == i) continue;
        next.comps.push_back(subst_name(c.comps[k], x, target));
      }
      std::vector<int> path = prefix;
      path.push_back(int(i));
      path.push_back(int(b));
      out.push_back({PiRuleTag::Forw, std::move(path),
                     canonical_form(rebuild_cluster(next))});
    }
  }
  // reductions inside a nested choice component
  for (size_t i = 0; i < c.comps.size(); i++) {
    if (!std::holds_alternative<PChoice>(c.comps[i]->node)) continue;
    std::vector<PiStep> inner;
    std::vector<int> path = prefix;
    path.push_back(int(i));
    cluster_steps_choice(c.comps[i], inner, path);
    for (auto& st : inner) {
      Cluster next = c;
      next.comps[i] = st.result;
      out.push_back({st.tag, st.path,
                     canonical_form(rebuild_cluster(next))});
    }
  }
}

}  // namespace

namespace {

void cluster_steps_choice(const ProcPtr& p, std::vector<PiStep>& out,
                          std::vector<int> prefix) {
  if (auto* ch = std::get_if<PChoice>(&p->node)) {
    (void)ch;
    std::vector<ProcPtr> branches;
    std::vector<ProcPtr> stack{p};
    while (!stack.empty()) {
      ProcPtr q = stack.back();
      stack.pop_back();
      if (auto* c = std::get_if<PChoice>(&q->node)) {
        stack.push_back(c->right);
        stack.push_back(c->left);
        continue;
      }
      branches.push_back(q);
    }
    for (size_t bi = 0; bi < branches.size(); bi++) {
      std::vector<PiStep> inner;
      std::vector<int> path = prefix;
      path.push_back(int(bi));
      cluster_steps(branches[bi], inner, path);
      for (auto& st : inner) {
        std::vector<ProcPtr> next = branches;
        next[bi] = st.result;
        out.push_back({st.tag, st.path, p_choice_all(next)});
      }
    }
    return;
  }
  cluster_steps(p, out, std::move(prefix));
}

}  // namespace

std::vector<PiStep> pi_step_all(const ProcPtr& p) {
  ProcPtr canon = canonical_form(p);
  std::vector<PiStep> raw;
  cluster_steps_choice(canon, raw, {});
  // canonicalize results and deduplicate identical rule instances
  std::vector<PiStep> out;
  std::set<std::string> seen;
  for (auto& st : raw) {
    ProcPtr res = canonical_form(st.result);
    std::string key = to_string(st.tag);
    for (int i : st.path) key += "." + std::to_string(i);
    key += ":" + alpha_print(res);
    if (seen.insert(key).second) out.push_back({st.tag, st.path, res});
  }
  return out;
}

namespace {

int priority(PiRuleTag t) {
  switch (t) {
    case PiRuleTag::Comm: return 0;
    case PiRuleTag::Close: return 1;
    case PiRuleTag::Some: return 2;
    case PiRuleTag::None: return 2;
    case PiRuleTag::Forw: return 3;
  }
  return 4;
}

}  // namespace

PiNormalizeResult pi_normalize(const ProcPtr& p, int fuel) {
  PiNormalizeResult res;
  ProcPtr cur = canonical_form(p);
  res.trace.start = print_process(cur);
  for (;;) {
    auto steps = pi_step_all(cur);
    if (steps.empty()) {
      res.ok = true;
      res.result = cur;
      return res;
    }
    const PiStep* best = &steps[0];
    for (auto& s : steps) {
      auto key = std::make_pair(priority(s.tag), s.path);
      auto bkey = std::make_pair(priority(best->tag), best->path);
      if (key < bkey) best = &s;
    }
    if (fuel-- <= 0) {
      res.result = cur;
      res.error = "out of fuel";
      return res;
    }
    cur = best->result;
    res.trace.steps.push_back(
        {to_string(best->tag), best->path, print_process(cur)});
  }
}

ReachResult pi_reaches(const ProcPtr& p, const ProcPtr& target, int fuel,
                       size_t breadth_cap) {
  ReachResult out;
  std::string goal = canonical_key(target);
  ProcPtr start = canonical_form(p);
  std::set<std::string> visited;
  std::deque<std::pair<ProcPtr, int>> frontier;
  frontier.emplace_back(start, 0);
  visited.insert(alpha_print(start));
  while (!frontier.empty()) {
    auto [cur, depth] = frontier.front();
    frontier.pop_front();
    if (alpha_print(cur) == goal) {
      out.reached = true;
      out.steps = depth;
      out.visited = visited.size();
      return out;
    }
    if (depth >= fuel) continue;
    for (auto& st : pi_step_all(cur)) {
      std::string key = alpha_print(st.result);
      if (visited.count(key)) continue;
      if (visited.size() >= breadth_cap) {
        out.visited = visited.size();
        out.error = "state cap exceeded";
        return out;
      }
      visited.insert(key);
      frontier.emplace_back(st.result, depth + 1);
    }
  }
  out.visited = visited.size();
  out.error = "exhausted reachable states";
  return out;
}

SuccessResult pi_has_success(const ProcPtr& p, int fuel) {
  ProcPtr cur = canonical_form(p);
  if (has_unguarded_check(cur)) return SuccessResult::Yes;
  for (int i = 0; i < fuel; i++) {
    auto steps = pi_step_all(cur);
    if (steps.empty()) return SuccessResult::No;
    const PiStep* best = &steps[0];
    for (auto& s : steps) {
      auto key = std::make_pair(priority(s.tag), s.path);
      auto bkey = std::make_pair(priority(best->tag), best->path);
      if (key < bkey) best = &s;
    }
    cur = best->result;
    if (has_unguarded_check(cur)) return SuccessResult::Yes;
  }
  return SuccessResult::OutOfFuel;
}

}  // namespace lampi
