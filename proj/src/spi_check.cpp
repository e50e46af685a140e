#include "lampi/spi_check.hpp"

#include <algorithm>
#include <functional>

#include "lampi/lexer.hpp"

namespace lampi {

std::string print_typing_env(const TypingEnv& env) {
  std::string out;
  bool first = true;
  for (auto& [n, t] : env) {
    if (!first) out += ", ";
    first = false;
    out += to_string(n) + ":" + print_session_type(t);
  }
  return out;
}

TypingEnv parse_typing_env(const std::string& text) {
  TypingEnv out;
  TokenStream ts(text);
  if (ts.at_end()) return out;
  for (;;) {
    Name n = ts.expect_ident();
    ts.expect_symbol(":");
    // reuse the session type parser on the remaining token window
    size_t start = ts.peek().pos;
    // find the extent: parse via the public function on a substring is
    // awkward; parse inline instead
    std::string rest = text.substr(start);
    // parse greedily: delegate by re-tokenizing is simpler and cheap
    // (contexts are tiny)
    size_t depth = 0, i = 0;
    for (; i < rest.size(); i++) {
      if (rest[i] == '(') depth++;
      if (rest[i] == ')') depth--;
      if (rest[i] == ',' && depth == 0) break;
    }
    out[n] = parse_session_type(rest.substr(0, i));
    // advance the token stream past the parsed type
    while (!ts.at_end() && ts.peek().pos < start + i) ts.next();
    if (!ts.accept_symbol(",")) break;
  }
  ts.expect_end();
  return out;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct PiReject {
  std::string reason;
};

[[noreturn]] void reject(std::string r) { throw PiReject{std::move(r)}; }

class SessionUnifier {
 public:
  SPtr fresh() {
    bindings.push_back(nullptr);
    return st_meta(int(bindings.size()) - 1, false);
  }

  SPtr resolve(SPtr t) const {
    while (auto* m = std::get_if<StMeta>(&t->node)) {
      if (!bindings[m->id]) break;
      t = m->dualized ? dual(bindings[m->id]) : bindings[m->id];
    }
    return t;
  }

  bool unify(SPtr a, SPtr b) {
    a = resolve(a);
    b = resolve(b);
    if (auto* ma = std::get_if<StMeta>(&a->node)) {
      if (auto* mb = std::get_if<StMeta>(&b->node);
          mb && mb->id == ma->id)
        return ma->dualized == mb->dualized;
      SPtr bound = ma->dualized ? dual(b) : b;
      if (occurs(ma->id, bound)) return false;
      bindings[ma->id] = bound;
      return true;
    }
    if (std::holds_alternative<StMeta>(b->node)) return unify(b, a);
    if (std::holds_alternative<StBot>(a->node))
      return std::holds_alternative<StBot>(b->node);
    if (std::holds_alternative<StOne>(a->node))
      return std::holds_alternative<StOne>(b->node);
    if (auto* ta = std::get_if<StTensor>(&a->node)) {
      auto* tb = std::get_if<StTensor>(&b->node);
      return tb && unify(ta->left, tb->left) && unify(ta->right, tb->right);
    }
    if (auto* pa = std::get_if<StParr>(&a->node)) {
      auto* pb = std::get_if<StParr>(&b->node);
      return pb && unify(pa->left, pb->left) && unify(pa->right, pb->right);
    }
    if (auto* wa = std::get_if<StWith>(&a->node)) {
      auto* wb = std::get_if<StWith>(&b->node);
      return wb && unify(wa->inner, wb->inner);
    }
    auto* oa = std::get_if<StPlus>(&a->node);
    auto* ob = std::get_if<StPlus>(&b->node);
    return oa && ob && unify(oa->inner, ob->inner);
  }

  SPtr zonk(SPtr t) const {
    t = resolve(t);
    return std::visit(
        overloaded{
            [&](const StMeta&) { return st_one(); },
            [&](const StBot&) { return t; },
            [&](const StOne&) { return t; },
            [&](const StTensor& n) {
              return st_tensor(zonk(n.left), zonk(n.right));
            },
            [&](const StParr& n) {
              return st_parr(zonk(n.left), zonk(n.right));
            },
            [&](const StWith& n) { return st_with(zonk(n.inner)); },
            [&](const StPlus& n) { return st_plus(zonk(n.inner)); },
        },
        t->node);
  }

 private:
  std::vector<SPtr> bindings;

  bool occurs(int id, const SPtr& t) const {
    SPtr r = resolve(t);
    return std::visit(
        overloaded{
            [&](const StMeta& m) { return m.id == id; },
            [&](const StTensor& n) {
              return occurs(id, n.left) || occurs(id, n.right);
            },
            [&](const StParr& n) {
              return occurs(id, n.left) || occurs(id, n.right);
            },
            [&](const StWith& n) { return occurs(id, n.inner); },
            [&](const StPlus& n) { return occurs(id, n.inner); },
            [&](const auto&) { return false; },
        },
        r->node);
  }
};

// Result of synthesizing one process: its claimed linear context plus the
// number of success constructs, which absorb arbitrary assignments.
struct Synth {
  std::map<Name, SPtr> ctx;
  int sinks = 0;
  Derivation node;
};

class PiChecker {
 public:
  SessionUnifier uni;
  std::vector<SPtr> with_requirements;  // must resolve to &-types

  Synth synth(const ProcPtr& p);

  Derivation mk_node(const std::string& rule, const ProcPtr& p,
                     const std::map<Name, SPtr>& ctx,
                     std::vector<Derivation> premises) {
    Derivation d;
    d.rule = rule;
    d.subject = print_process(p);
    d.kind = "proc";
    d.calc = "spi";
    (void)ctx;
    d.premises = std::move(premises);
    return d;
  }
};

void merge_disjoint(std::map<Name, SPtr>& into, const std::map<Name, SPtr>& from,
                    const char* what) {
  for (auto& [n, t] : from) {
    if (into.count(n))
      reject(std::string("name ") + to_string(n) + " used linearly twice in " +
             what);
    into[n] = t;
  }
}

// Consume name n from ctx; a sink absorbs a missing assignment.
SPtr take(PiChecker& pc, Synth& s, const Name& n, const char* role) {
  auto it = s.ctx.find(n);
  if (it == s.ctx.end()) {
    if (s.sinks > 0) return pc.uni.fresh();
    reject(std::string(role) + " " + to_string(n) +
           " is not used by its continuation");
  }
  SPtr t = it->second;
  s.ctx.erase(it);
  return t;
}

Synth PiChecker::synth(const ProcPtr& p) {
  return std::visit(
      overloaded{
          [&](const PNil&) {
            Synth s;
            s.node = mk_node("T.", p, {}, {});
            return s;
          },
          [&](const PCheck&) {
            Synth s;
            s.sinks = 1;
            s.node = mk_node("Tcheck", p, {}, {});
            return s;
          },
          [&](const PFwd& n) {
            if (n.a == n.b) reject("forwarder between identical names");
            Synth s;
            SPtr m = uni.fresh();
            s.ctx[n.a] = m;
            s.ctx[n.b] = dual(m);
            s.node = mk_node("Tid", p, s.ctx, {});
            return s;
          },
          [&](const POut& n) {
            // split the continuation into the component(s) owning the bound
            // name and the rest
            std::vector<ProcPtr> comps;
            std::vector<ProcPtr> stack{n.cont};
            while (!stack.empty()) {
              ProcPtr q = stack.back();
              stack.pop_back();
              if (auto* par = std::get_if<PPar>(&q->node)) {
                stack.push_back(par->right);
                stack.push_back(par->left);
                continue;
              }
              if (!std::holds_alternative<PNil>(q->node)) comps.push_back(q);
            }
            std::vector<ProcPtr> with_y, rest;
            for (auto& c : comps)
              (contains(free_names(c), n.bound) ? with_y : rest).push_back(c);
            Synth sy, sr;
            std::vector<Derivation> prem;
            for (auto& c : with_y) {
              Synth one = synth(c);
              merge_disjoint(sy.ctx, one.ctx, "an output continuation");
              sy.sinks += one.sinks;
              prem.push_back(one.node);
            }
            for (auto& c : rest) {
              Synth one = synth(c);
              merge_disjoint(sr.ctx, one.ctx, "an output continuation");
              sr.sinks += one.sinks;
              prem.push_back(one.node);
            }
            SPtr a;
            if (sy.ctx.count(n.bound) || sy.sinks > 0) {
              a = take(*this, sy, n.bound, "sent name");
            } else if (sr.sinks > 0) {
              a = uni.fresh();
            } else {
              reject("sent name " + to_string(n.bound) +
                     " is not used by the continuation");
            }
            if (sy.ctx.count(n.subject))
              reject("output subject " + to_string(n.subject) +
                     " crosses the tensor split");
            SPtr b = take(*this, sr, n.subject, "output subject");
            Synth s;
            s.ctx = sy.ctx;
            merge_disjoint(s.ctx, sr.ctx, "a tensor split");
            s.sinks = sy.sinks + sr.sinks;
            s.ctx[n.subject] = st_tensor(a, b);
            s.node = mk_node("T*", p, s.ctx, std::move(prem));
            return s;
          },
          [&](const PIn& n) {
            Synth c = synth(n.cont);
            SPtr a = take(*this, c, n.bound, "received name");
            SPtr b = take(*this, c, n.subject, "input subject");
            Synth s;
            s.ctx = c.ctx;
            s.sinks = c.sinks;
            s.ctx[n.subject] = st_parr(a, b);
            s.node = mk_node("T@", p, s.ctx, {c.node});
            return s;
          },
          [&](const PPar& n) {
            Synth l = synth(n.left);
            Synth r = synth(n.right);
            Synth s;
            s.ctx = l.ctx;
            merge_disjoint(s.ctx, r.ctx, "a parallel composition");
            s.sinks = l.sinks + r.sinks;
            s.node = mk_node("T|", p, s.ctx, {l.node, r.node});
            return s;
          },
          [&](const PRes& n) {
            // gather the whole restriction block and the parallel components
            std::vector<std::pair<Name, SPtr>> block;
            ProcPtr cur = p;
            while (auto* res = std::get_if<PRes>(&cur->node)) {
              block.emplace_back(res->name, res->annot);
              cur = res->body;
            }
            std::vector<ProcPtr> comps;
            std::vector<ProcPtr> stack{cur};
            while (!stack.empty()) {
              ProcPtr q = stack.back();
              stack.pop_back();
              if (auto* par = std::get_if<PPar>(&q->node)) {
                stack.push_back(par->left);
                stack.push_back(par->right);
                continue;
              }
              if (!std::holds_alternative<PNil>(q->node)) comps.push_back(q);
            }
            std::vector<Synth> parts;
            for (auto& c : comps) parts.push_back(synth(c));
            int sinks = 0;
            for (auto& pt : parts) sinks += pt.sinks;
            // cuts combine components pairwise; the connection structure
            // must stay acyclic
            std::vector<size_t> uf(parts.size());
            for (size_t i = 0; i < uf.size(); i++) uf[i] = i;
            std::function<size_t(size_t)> find = [&](size_t i) {
              while (uf[i] != i) i = uf[i] = uf[uf[i]];
              return i;
            };
            for (auto& [x, annot] : block) {
              std::vector<size_t> users;
              for (size_t i = 0; i < parts.size(); i++)
                if (parts[i].ctx.count(x)) users.push_back(i);
              if (users.size() > 2)
                reject("restricted name " + to_string(x) +
                       " used by more than two processes");
              if (users.empty()) continue;  // erasable dead restriction
              SPtr t0 = parts[users[0]].ctx[x];
              if (users.size() == 2) {
                if (find(users[0]) == find(users[1]))
                  reject("cyclic cut structure on " + to_string(x));
                uf[find(users[0])] = find(users[1]);
                if (!uni.unify(t0, dual(parts[users[1]].ctx[x])))
                  reject("cut endpoints of " + to_string(x) +
                         " are not dual: " + print_session_type(uni.zonk(t0)) +
                         " vs " +
                         print_session_type(
                             uni.zonk(parts[users[1]].ctx[x])));
              } else if (sinks == 0) {
                reject("restricted name " + to_string(x) +
                       " has only one endpoint");
              }
              if (annot) {
                if (!uni.unify(t0, annot) && !uni.unify(t0, dual(annot)))
                  reject("annotation on " + to_string(x) +
                         " matches neither endpoint");
              }
            }
            Synth s;
            std::vector<Derivation> prem;
            for (auto& pt : parts) {
              std::map<Name, SPtr> c = pt.ctx;
              for (auto& [x, annot] : block) c.erase(x);
              merge_disjoint(s.ctx, c, "a cut");
              s.sinks += pt.sinks;
              prem.push_back(pt.node);
            }
            s.node = mk_node("Tcut", p, s.ctx, std::move(prem));
            return s;
          },
          [&](const PCloseOut& n) {
            Synth s;
            s.ctx[n.subject] = st_one();
            s.node = mk_node("T1", p, s.ctx, {});
            return s;
          },
          [&](const PCloseIn& n) {
            Synth c = synth(n.cont);
            if (c.ctx.count(n.subject))
              reject("closed endpoint " + to_string(n.subject) +
                     " reused by the continuation");
            Synth s = std::move(c);
            s.ctx[n.subject] = st_bot();
            s.node = mk_node("Tbot", p, s.ctx, {s.node});
            return s;
          },
          [&](const PSomeOut& n) {
            Synth c = synth(n.cont);
            SPtr a = take(*this, c, n.subject, "confirmed session");
            Synth s = std::move(c);
            s.ctx[n.subject] = st_with(a);
            s.node = mk_node("T&some", p, s.ctx, {s.node});
            return s;
          },
          [&](const PNoneOut& n) {
            Synth s;
            s.ctx[n.subject] = st_with(uni.fresh());
            s.node = mk_node("T&none", p, s.ctx, {});
            return s;
          },
          [&](const PSomeIn& n) {
            Synth c = synth(n.cont);
            SPtr a = take(*this, c, n.subject, "dependent session");
            // the continuation may use exactly the declared dependencies
            for (auto& [m, t] : c.ctx) {
              if (!std::count(n.deps.begin(), n.deps.end(), m))
                reject("session " + to_string(m) +
                       " used without being declared a dependency of " +
                       to_string(n.subject));
            }
            Synth s;
            s.sinks = c.sinks;
            s.ctx = c.ctx;
            for (auto& w : n.deps) {
              auto it = s.ctx.find(w);
              SPtr t;
              if (it == s.ctx.end()) {
                if (c.sinks == 0)
                  reject("declared dependency " + to_string(w) +
                         " is not used by the continuation");
                t = uni.fresh();
                s.ctx[w] = t;
              } else {
                t = it->second;
              }
              with_requirements.push_back(t);
            }
            s.ctx[n.subject] = st_plus(a);
            s.node = mk_node("T+some", p, s.ctx, {c.node});
            return s;
          },
          [&](const PChoice& n) {
            Synth l = synth(n.left);
            Synth r = synth(n.right);
            // both branches implement the same non-deterministic context
            for (auto& [m, t] : l.ctx) {
              auto it = r.ctx.find(m);
              if (it == r.ctx.end()) {
                if (r.sinks == 0)
                  reject("choice branches use different names: " +
                         to_string(m));
                continue;
              }
              if (!uni.unify(t, it->second))
                reject("choice branches disagree on " + to_string(m) + ": " +
                       print_session_type(uni.zonk(t)) + " vs " +
                       print_session_type(uni.zonk(it->second)));
            }
            for (auto& [m, t] : r.ctx) {
              if (!l.ctx.count(m)) {
                if (l.sinks == 0)
                  reject("choice branches use different names: " +
                         to_string(m));
                l.ctx[m] = t;
              }
            }
            for (auto& [m, t] : l.ctx) with_requirements.push_back(t);
            Synth s;
            s.ctx = l.ctx;
            s.sinks = std::min(l.sinks, r.sinks);
            s.node = mk_node("T&choice", p, s.ctx, {l.node, r.node});
            return s;
          },
      },
      p->node);
}

PiCheckResult run_pi_check(const ProcPtr& p, const TypingEnv* env) {
  PiChecker pc;
  PiCheckResult out;
  try {
    Synth s = pc.synth(p);
    if (env) {
      for (auto& [n, t] : *env) {
        auto it = s.ctx.find(n);
        if (it == s.ctx.end()) {
          if (s.sinks > 0) continue;
          reject("assignment " + to_string(n) +
                 " is not used by the process");
        }
        if (!pc.uni.unify(it->second, t))
          reject("endpoint " + to_string(n) + " synthesizes " +
                 print_session_type(pc.uni.zonk(it->second)) +
                 " but the context expects " + print_session_type(t));
        s.ctx.erase(it);
      }
      if (!s.ctx.empty())
        reject("process uses unassigned name " +
               to_string(s.ctx.begin()->first));
    }
    // non-deterministic dependencies must have &-types
    for (auto& t : pc.with_requirements) {
      SPtr r = pc.uni.resolve(t);
      if (std::holds_alternative<StMeta>(r->node)) {
        if (!pc.uni.unify(r, st_with(pc.uni.fresh())))
          reject("cannot give a non-deterministic type to a dependency");
      } else if (!std::holds_alternative<StWith>(r->node)) {
        reject("dependency typed " + print_session_type(pc.uni.zonk(r)) +
               " is not a non-deterministic session");
      }
    }
    out.ok = true;
    for (auto& [n, t] : s.ctx) out.inferred[n] = pc.uni.zonk(t);
    if (env)
      for (auto& [n, t] : *env) out.inferred[n] = t;
    Derivation d = s.node;
    d.ctx = print_typing_env(out.inferred);
    out.deriv = std::move(d);
  } catch (const PiReject& r) {
    out.ok = false;
    out.reason = r.reason;
  }
  return out;
}

}  // namespace

PiCheckResult pi_typecheck(const ProcPtr& p, const TypingEnv& env) {
  return run_pi_check(p, &env);
}

PiCheckResult pi_typesynth(const ProcPtr& p) { return run_pi_check(p, nullptr); }

}  // namespace lampi
