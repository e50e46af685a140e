#include "lampi/spi.hpp"

#include <algorithm>

#include "lampi/lexer.hpp"

namespace lampi {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

// ---- session types ----

SPtr st_bot() {
  static SPtr t = std::make_shared<SessionType>(SessionType{StBot{}});
  return t;
}
SPtr st_one() {
  static SPtr t = std::make_shared<SessionType>(SessionType{StOne{}});
  return t;
}
SPtr st_tensor(SPtr a, SPtr b) {
  return std::make_shared<SessionType>(
      SessionType{StTensor{std::move(a), std::move(b)}});
}
SPtr st_parr(SPtr a, SPtr b) {
  return std::make_shared<SessionType>(
      SessionType{StParr{std::move(a), std::move(b)}});
}
SPtr st_with(SPtr a) {
  return std::make_shared<SessionType>(SessionType{StWith{std::move(a)}});
}
SPtr st_plus(SPtr a) {
  return std::make_shared<SessionType>(SessionType{StPlus{std::move(a)}});
}
SPtr st_meta(int id, bool dualized) {
  return std::make_shared<SessionType>(SessionType{StMeta{id, dualized}});
}

SPtr dual(const SPtr& t) {
  return std::visit(
      overloaded{
          [](const StBot&) { return st_one(); },
          [](const StOne&) { return st_bot(); },
          [](const StTensor& n) { return st_parr(dual(n.left), dual(n.right)); },
          [](const StParr& n) { return st_tensor(dual(n.left), dual(n.right)); },
          [](const StWith& n) { return st_plus(dual(n.inner)); },
          [](const StPlus& n) { return st_with(dual(n.inner)); },
          [](const StMeta& n) { return st_meta(n.id, !n.dualized); },
      },
      t->node);
}

std::string print_session_type(const SPtr& t) {
  return std::visit(
      overloaded{
          [](const StBot&) { return std::string("bot"); },
          [](const StOne&) { return std::string("one"); },
          [](const StTensor& n) {
            return "(" + print_session_type(n.left) + " * " +
                   print_session_type(n.right) + ")";
          },
          [](const StParr& n) {
            return "(" + print_session_type(n.left) + " @ " +
                   print_session_type(n.right) + ")";
          },
          [](const StWith& n) { return "&" + print_session_type(n.inner); },
          [](const StPlus& n) { return "+" + print_session_type(n.inner); },
          [](const StMeta& n) {
            return std::string(n.dualized ? "~?" : "?") +
                   std::to_string(n.id);
          },
      },
      t->node);
}

bool session_equal(const SPtr& a, const SPtr& b) {
  return print_session_type(a) == print_session_type(b);
}

namespace {

SPtr parse_stype_at(TokenStream& ts) {
  if (ts.peek().kind == Token::Ident && ts.peek().text == "bot") {
    ts.next();
    return st_bot();
  }
  if (ts.peek().kind == Token::Ident && ts.peek().text == "one") {
    ts.next();
    return st_one();
  }
  if (ts.accept_symbol("&")) return st_with(parse_stype_at(ts));
  if (ts.accept_symbol("+")) return st_plus(parse_stype_at(ts));
  if (ts.accept_symbol("(")) {
    SPtr left = parse_stype_at(ts);
    if (ts.accept_symbol("*")) {
      SPtr right = parse_stype_at(ts);
      ts.expect_symbol(")");
      return st_tensor(left, right);
    }
    if (ts.accept_symbol("@")) {
      SPtr right = parse_stype_at(ts);
      ts.expect_symbol(")");
      return st_parr(left, right);
    }
    ts.expect_symbol(")");
    return left;
  }
  throw SyntaxError("expected a session type, found '" + ts.peek().text + "'",
                    ts.peek().pos);
}

}  // namespace

SPtr parse_session_type(const std::string& text) {
  TokenStream ts(text);
  SPtr t = parse_stype_at(ts);
  ts.expect_end();
  return t;
}

// ---- processes ----

ProcPtr p_nil() {
  static ProcPtr p = std::make_shared<Process>(Process{PNil{}});
  return p;
}
ProcPtr p_out(Name subject, Name bound, ProcPtr cont) {
  return std::make_shared<Process>(
      Process{POut{std::move(subject), std::move(bound), std::move(cont)}});
}
ProcPtr p_in(Name subject, Name bound, ProcPtr cont) {
  return std::make_shared<Process>(
      Process{PIn{std::move(subject), std::move(bound), std::move(cont)}});
}
ProcPtr p_par(ProcPtr l, ProcPtr r) {
  return std::make_shared<Process>(Process{PPar{std::move(l), std::move(r)}});
}
ProcPtr p_par_all(std::vector<ProcPtr> ps) {
  if (ps.empty()) return p_nil();
  ProcPtr acc = ps.back();
  for (size_t i = ps.size() - 1; i-- > 0;) acc = p_par(ps[i], acc);
  return acc;
}
ProcPtr p_res(Name name, SPtr annot, ProcPtr body) {
  return std::make_shared<Process>(
      Process{PRes{std::move(name), std::move(annot), std::move(body)}});
}
ProcPtr p_fwd(Name a, Name b) {
  return std::make_shared<Process>(Process{PFwd{std::move(a), std::move(b)}});
}
ProcPtr p_close_out(Name subject) {
  return std::make_shared<Process>(Process{PCloseOut{std::move(subject)}});
}
ProcPtr p_close_in(Name subject, ProcPtr cont) {
  return std::make_shared<Process>(
      Process{PCloseIn{std::move(subject), std::move(cont)}});
}
ProcPtr p_some_out(Name subject, ProcPtr cont) {
  return std::make_shared<Process>(
      Process{PSomeOut{std::move(subject), std::move(cont)}});
}
ProcPtr p_none_out(Name subject) {
  return std::make_shared<Process>(Process{PNoneOut{std::move(subject)}});
}
ProcPtr p_some_in(Name subject, std::vector<Name> deps, ProcPtr cont) {
  return std::make_shared<Process>(Process{
      PSomeIn{std::move(subject), std::move(deps), std::move(cont)}});
}
ProcPtr p_choice(ProcPtr l, ProcPtr r) {
  return std::make_shared<Process>(
      Process{PChoice{std::move(l), std::move(r)}});
}
ProcPtr p_choice_all(std::vector<ProcPtr> ps) {
  if (ps.empty()) return p_nil();
  ProcPtr acc = ps.back();
  for (size_t i = ps.size() - 1; i-- > 0;) acc = p_choice(ps[i], acc);
  return acc;
}
ProcPtr p_check() {
  static ProcPtr p = std::make_shared<Process>(Process{PCheck{}});
  return p;
}

VarSet free_names(const ProcPtr& p) {
  return std::visit(
      overloaded{
          [](const PNil&) { return VarSet{}; },
          [](const POut& n) {
            VarSet s = free_names(n.cont);
            s.erase(n.bound);
            s.insert(n.subject);
            return s;
          },
          [](const PIn& n) {
            VarSet s = free_names(n.cont);
            s.erase(n.bound);
            s.insert(n.subject);
            return s;
          },
          [](const PPar& n) {
            return set_union(free_names(n.left), free_names(n.right));
          },
          [](const PRes& n) {
            VarSet s = free_names(n.body);
            s.erase(n.name);
            return s;
          },
          [](const PFwd& n) { return VarSet{n.a, n.b}; },
          [](const PCloseOut& n) { return VarSet{n.subject}; },
          [](const PCloseIn& n) {
            VarSet s = free_names(n.cont);
            s.insert(n.subject);
            return s;
          },
          [](const PSomeOut& n) {
            VarSet s = free_names(n.cont);
            s.insert(n.subject);
            return s;
          },
          [](const PNoneOut& n) { return VarSet{n.subject}; },
          [](const PSomeIn& n) {
            VarSet s = free_names(n.cont);
            s.insert(n.subject);
            for (auto& w : n.deps) s.insert(w);
            return s;
          },
          [](const PChoice& n) {
            return set_union(free_names(n.left), free_names(n.right));
          },
          [](const PCheck&) { return VarSet{}; },
      },
      p->node);
}

namespace {

Name ren(const Name& n, const Name& x, const Name& y) {
  return n == x ? y : n;
}

}  // namespace

ProcPtr subst_name(const ProcPtr& p, const Name& x, const Name& y) {
  if (x == y) return p;
  return std::visit(
      overloaded{
          [&](const PNil&) { return p; },
          [&](const POut& n) {
            Name subj = ren(n.subject, x, y);
            if (n.bound == x) return p_out(subj, n.bound, n.cont);
            if (n.bound == y) {
              // rename the binder away from the incoming name
              Name fresh{n.bound.base, n.bound.index + 1000000};
              ProcPtr cont = subst_name(n.cont, n.bound, fresh);
              return p_out(subj, fresh, subst_name(cont, x, y));
            }
            return p_out(subj, n.bound, subst_name(n.cont, x, y));
          },
          [&](const PIn& n) {
            Name subj = ren(n.subject, x, y);
            if (n.bound == x) return p_in(subj, n.bound, n.cont);
            if (n.bound == y) {
              Name fresh{n.bound.base, n.bound.index + 1000000};
              ProcPtr cont = subst_name(n.cont, n.bound, fresh);
              return p_in(subj, fresh, subst_name(cont, x, y));
            }
            return p_in(subj, n.bound, subst_name(n.cont, x, y));
          },
          [&](const PPar& n) {
            return p_par(subst_name(n.left, x, y), subst_name(n.right, x, y));
          },
          [&](const PRes& n) {
            if (n.name == x) return p;
            if (n.name == y) {
              Name fresh{n.name.base, n.name.index + 1000000};
              ProcPtr body = subst_name(n.body, n.name, fresh);
              return p_res(fresh, n.annot, subst_name(body, x, y));
            }
            return p_res(n.name, n.annot, subst_name(n.body, x, y));
          },
          [&](const PFwd& n) { return p_fwd(ren(n.a, x, y), ren(n.b, x, y)); },
          [&](const PCloseOut& n) { return p_close_out(ren(n.subject, x, y)); },
          [&](const PCloseIn& n) {
            return p_close_in(ren(n.subject, x, y), subst_name(n.cont, x, y));
          },
          [&](const PSomeOut& n) {
            return p_some_out(ren(n.subject, x, y), subst_name(n.cont, x, y));
          },
          [&](const PNoneOut& n) { return p_none_out(ren(n.subject, x, y)); },
          [&](const PSomeIn& n) {
            std::vector<Name> deps = n.deps;
            for (auto& w : deps) w = ren(w, x, y);
            return p_some_in(ren(n.subject, x, y), std::move(deps),
                             subst_name(n.cont, x, y));
          },
          [&](const PChoice& n) {
            return p_choice(subst_name(n.left, x, y),
                            subst_name(n.right, x, y));
          },
          [&](const PCheck&) { return p; },
      },
      p->node);
}

// ---- printing ----

namespace {

using PEnv = std::map<Name, std::string>;

std::string pshow_name(const Name& n, const PEnv* env) {
  if (env) {
    auto it = env->find(n);
    if (it != env->end()) return it->second;
  }
  return to_string(n);
}

bool is_compound(const ProcPtr& p) {
  return std::holds_alternative<PPar>(p->node) ||
         std::holds_alternative<PChoice>(p->node) ||
         std::holds_alternative<PRes>(p->node);
}

std::string pshow(const ProcPtr& p, const PEnv* env, int* counter);

std::string pshow_cont(const ProcPtr& p, const PEnv* env, int* counter) {
  std::string s = pshow(p, env, counter);
  if (is_compound(p)) return "(" + s + ")";
  return s;
}

std::string pshow(const ProcPtr& p, const PEnv* env, int* counter) {
  auto bind = [&](PEnv& inner, const Name& n) {
    inner[n] = "%" + std::to_string((*counter)++);
    return inner[n];
  };
  return std::visit(
      overloaded{
          [&](const PNil&) { return std::string("0"); },
          [&](const POut& n) {
            std::string subj = pshow_name(n.subject, env);
            if (env) {
              PEnv inner = *env;
              std::string b = bind(inner, n.bound);
              return subj + "!(" + b + ")." + pshow_cont(n.cont, &inner, counter);
            }
            return subj + "!(" + to_string(n.bound) + ")." +
                   pshow_cont(n.cont, env, counter);
          },
          [&](const PIn& n) {
            std::string subj = pshow_name(n.subject, env);
            if (env) {
              PEnv inner = *env;
              std::string b = bind(inner, n.bound);
              return subj + "?(" + b + ")." + pshow_cont(n.cont, &inner, counter);
            }
            return subj + "?(" + to_string(n.bound) + ")." +
                   pshow_cont(n.cont, env, counter);
          },
          [&](const PPar& n) {
            auto wrap = [&](const ProcPtr& q) {
              std::string s = pshow(q, env, counter);
              if (std::holds_alternative<PChoice>(q->node) ||
                  std::holds_alternative<PRes>(q->node))
                return "(" + s + ")";
              return s;
            };
            return wrap(n.left) + " | " + wrap(n.right);
          },
          [&](const PRes& n) {
            std::string annot =
                n.annot ? (": " + print_session_type(n.annot)) : "";
            if (env) {
              PEnv inner = *env;
              std::string b = bind(inner, n.name);
              return "new " + b + annot + ". " +
                     pshow_cont(n.body, &inner, counter);
            }
            return "new " + to_string(n.name) + annot + ". " +
                   pshow_cont(n.body, env, counter);
          },
          [&](const PFwd& n) {
            return "[" + pshow_name(n.a, env) + "<->" + pshow_name(n.b, env) +
                   "]";
          },
          [&](const PCloseOut& n) {
            return pshow_name(n.subject, env) + ".close!";
          },
          [&](const PCloseIn& n) {
            return pshow_name(n.subject, env) + ".close?;" +
                   pshow_cont(n.cont, env, counter);
          },
          [&](const PSomeOut& n) {
            return pshow_name(n.subject, env) + ".some!;" +
                   pshow_cont(n.cont, env, counter);
          },
          [&](const PNoneOut& n) {
            return pshow_name(n.subject, env) + ".none!";
          },
          [&](const PSomeIn& n) {
            std::string deps;
            for (size_t i = 0; i < n.deps.size(); i++)
              deps += (i ? "," : "") + pshow_name(n.deps[i], env);
            return pshow_name(n.subject, env) + ".some?(" + deps + ");" +
                   pshow_cont(n.cont, env, counter);
          },
          [&](const PChoice& n) {
            auto wrap = [&](const ProcPtr& q) {
              std::string s = pshow(q, env, counter);
              if (std::holds_alternative<PRes>(q->node)) return "(" + s + ")";
              return s;
            };
            return wrap(n.left) + " (+) " + wrap(n.right);
          },
          [&](const PCheck&) { return std::string("check"); },
      },
      p->node);
}

}  // namespace

std::string print_process(const ProcPtr& p) { return pshow(p, nullptr, nullptr); }

std::string alpha_print(const ProcPtr& p) {
  PEnv env;
  int counter = 0;
  return pshow(p, &env, &counter);
}

// ---- parsing ----

namespace {

ProcPtr parse_proc_choice(TokenStream& ts);

ProcPtr parse_proc_atom(TokenStream& ts) {
  const Token& t = ts.peek();
  if (ts.accept_symbol("(")) {
    ProcPtr inner = parse_proc_choice(ts);
    ts.expect_symbol(")");
    return inner;
  }
  if (t.kind == Token::Number && t.number == 0) {
    ts.next();
    return p_nil();
  }
  if (ts.accept_symbol("[")) {
    Name a = ts.expect_ident();
    ts.expect_symbol("<->");
    Name b = ts.expect_ident();
    ts.expect_symbol("]");
    return p_fwd(a, b);
  }
  if (t.kind != Token::Ident)
    throw SyntaxError("expected a process, found '" + t.text + "'", t.pos);
  if (t.text == "check" && t.var_index < 0) {
    ts.next();
    return p_check();
  }
  if (t.text == "new" && t.var_index < 0) {
    ts.next();
    Name x = ts.expect_ident();
    SPtr annot;
    if (ts.accept_symbol(":")) annot = parse_stype_at(ts);
    ts.expect_symbol(".");
    return p_res(x, annot, parse_proc_atom(ts));
  }
  Name subject = ts.expect_ident();
  if (ts.accept_symbol("!")) {
    ts.expect_symbol("(");
    Name bound = ts.expect_ident();
    ts.expect_symbol(")");
    ts.expect_symbol(".");
    return p_out(subject, bound, parse_proc_atom(ts));
  }
  if (ts.accept_symbol("?")) {
    ts.expect_symbol("(");
    Name bound = ts.expect_ident();
    ts.expect_symbol(")");
    ts.expect_symbol(".");
    return p_in(subject, bound, parse_proc_atom(ts));
  }
  ts.expect_symbol(".");
  const Token& op = ts.peek();
  if (op.kind != Token::Ident)
    throw SyntaxError("expected close/some/none after '.'", op.pos);
  if (op.text == "close") {
    ts.next();
    if (ts.accept_symbol("!")) return p_close_out(subject);
    ts.expect_symbol("?");
    ts.expect_symbol(";");
    return p_close_in(subject, parse_proc_atom(ts));
  }
  if (op.text == "some") {
    ts.next();
    if (ts.accept_symbol("!")) {
      ts.expect_symbol(";");
      return p_some_out(subject, parse_proc_atom(ts));
    }
    ts.expect_symbol("?");
    ts.expect_symbol("(");
    std::vector<Name> deps;
    if (!ts.is_symbol(")")) {
      deps.push_back(ts.expect_ident());
      while (ts.accept_symbol(",")) deps.push_back(ts.expect_ident());
    }
    ts.expect_symbol(")");
    ts.expect_symbol(";");
    return p_some_in(subject, std::move(deps), parse_proc_atom(ts));
  }
  if (op.text == "none") {
    ts.next();
    ts.expect_symbol("!");
    return p_none_out(subject);
  }
  throw SyntaxError("unknown action '" + op.text + "'", op.pos);
}

ProcPtr parse_proc_par(TokenStream& ts) {
  ProcPtr acc = parse_proc_atom(ts);
  while (ts.accept_symbol("|")) acc = p_par(acc, parse_proc_atom(ts));
  return acc;
}

ProcPtr parse_proc_choice(TokenStream& ts) {
  ProcPtr acc = parse_proc_par(ts);
  while (ts.accept_symbol("(+)")) acc = p_choice(acc, parse_proc_par(ts));
  return acc;
}

}  // namespace

ProcPtr parse_process(const std::string& text) {
  TokenStream ts(text);
  ProcPtr p = parse_proc_choice(ts);
  ts.expect_end();
  return p;
}

// ---- canonical form ----

namespace {

void flatten_par(const ProcPtr& p, std::vector<ProcPtr>& out) {
  if (auto* par = std::get_if<PPar>(&p->node)) {
    flatten_par(par->left, out);
    flatten_par(par->right, out);
    return;
  }
  if (std::holds_alternative<PNil>(p->node)) return;
  out.push_back(p);
}

void flatten_choice(const ProcPtr& p, std::vector<ProcPtr>& out) {
  if (auto* ch = std::get_if<PChoice>(&p->node)) {
    flatten_choice(ch->left, out);
    flatten_choice(ch->right, out);
    return;
  }
  out.push_back(p);
}

struct Canonicalizer {
  int fresh_counter = 0;
  Name fresh(const std::string& base) { return Name{base, 2000000 + fresh_counter++}; }

  ProcPtr canon(const ProcPtr& p);
  ProcPtr canon_cluster(std::vector<std::pair<Name, SPtr>> block,
                        std::vector<ProcPtr> comps);
};

ProcPtr Canonicalizer::canon_cluster(std::vector<std::pair<Name, SPtr>> block,
                                     std::vector<ProcPtr> comps) {
  // distribute the restrictions over a choice component, if any
  for (size_t i = 0; i < comps.size(); i++) {
    if (std::holds_alternative<PChoice>(comps[i]->node)) {
      std::vector<ProcPtr> branches;
      flatten_choice(comps[i], branches);
      std::vector<ProcPtr> out;
      for (auto& br : branches) {
        std::vector<ProcPtr> sub = comps;
        sub[i] = br;
        ProcPtr body = p_par_all(sub);
        for (size_t b = block.size(); b-- > 0;)
          body = p_res(block[b].first, block[b].second, body);
        out.push_back(canon(body));
      }
      return canon(p_choice_all(out));
    }
  }
  if (comps.empty()) return p_nil();
  if (block.empty() && comps.size() == 1) return comps[0];

  // erase restrictions on unused names (derivable congruence law via
  // P = P | 0 = P | (new x)0 = (new x)(P | 0))
  {
    VarSet used;
    for (auto& c : comps) used = set_union(std::move(used), free_names(c));
    std::vector<std::pair<Name, SPtr>> kept;
    for (auto& b : block)
      if (contains(used, b.first)) kept.push_back(b);
    block = std::move(kept);
  }

  ProcPtr body = p_par_all(comps);
  for (size_t b = block.size(); b-- > 0;)
    body = p_res(block[b].first, block[b].second, body);
  return body;
}

ProcPtr Canonicalizer::canon(const ProcPtr& p) {
  return std::visit(
      overloaded{
          [&](const PNil&) { return p_nil(); },
          [&](const POut& n) { return p_out(n.subject, n.bound, canon(n.cont)); },
          [&](const PIn& n) { return p_in(n.subject, n.bound, canon(n.cont)); },
          [&](const PPar&) -> ProcPtr {
            std::vector<ProcPtr> raw;
            flatten_par(p, raw);
            std::vector<std::pair<Name, SPtr>> block;
            std::vector<ProcPtr> comps;
            VarSet in_scope;
            for (auto& c : raw) in_scope = set_union(std::move(in_scope), free_names(c));
            // canonicalize components, extruding restrictions
            std::vector<ProcPtr> todo = raw;
            for (size_t i = 0; i < todo.size(); i++) {
              ProcPtr c = canon(todo[i]);
              while (auto* res = std::get_if<PRes>(&c->node)) {
                Name x = res->name;
                ProcPtr body = res->body;
                if (contains(in_scope, x)) {
                  Name nx = fresh(x.base);
                  body = subst_name(body, x, nx);
                  x = nx;
                }
                in_scope.insert(x);
                block.emplace_back(x, res->annot);
                c = canon(body);
              }
              if (std::holds_alternative<PNil>(c->node)) continue;
              if (std::holds_alternative<PPar>(c->node)) {
                std::vector<ProcPtr> inner;
                flatten_par(c, inner);
                for (auto& q : inner) todo.push_back(q);
                continue;
              }
              comps.push_back(c);
            }
            return canon_cluster(std::move(block), std::move(comps));
          },
          [&](const PRes& n) -> ProcPtr {
            ProcPtr body = canon(n.body);
            if (std::holds_alternative<PNil>(body->node)) return p_nil();
            if (std::holds_alternative<PChoice>(body->node)) {
              std::vector<ProcPtr> branches;
              flatten_choice(body, branches);
              std::vector<ProcPtr> out;
              for (auto& br : branches)
                out.push_back(canon(p_res(n.name, n.annot, br)));
              return canon(p_choice_all(out));
            }
            std::vector<std::pair<Name, SPtr>> block{{n.name, n.annot}};
            std::vector<ProcPtr> comps;
            ProcPtr cur = body;
            while (auto* res = std::get_if<PRes>(&cur->node)) {
              block.emplace_back(res->name, res->annot);
              cur = res->body;
            }
            if (std::holds_alternative<PChoice>(cur->node)) {
              // re-run with the accumulated block via a parallel wrapper
              ProcPtr rebuilt = cur;
              for (size_t b = block.size(); b-- > 0;)
                rebuilt = p_res(block[b].first, block[b].second, rebuilt);
              std::vector<ProcPtr> branches;
              flatten_choice(cur, branches);
              std::vector<ProcPtr> out;
              for (auto& br : branches) {
                ProcPtr q = br;
                for (size_t b = block.size(); b-- > 0;)
                  q = p_res(block[b].first, block[b].second, q);
                out.push_back(canon(q));
              }
              return canon(p_choice_all(out));
            }
            flatten_par(cur, comps);
            return canon_cluster(std::move(block), std::move(comps));
          },
          [&](const PFwd& n) {
            return n.a <= n.b ? p_fwd(n.a, n.b) : p_fwd(n.b, n.a);
          },
          [&](const PCloseOut&) { return p; },
          [&](const PCloseIn& n) { return p_close_in(n.subject, canon(n.cont)); },
          [&](const PSomeOut& n) { return p_some_out(n.subject, canon(n.cont)); },
          [&](const PNoneOut&) { return p; },
          [&](const PSomeIn& n) {
            std::vector<Name> deps = n.deps;
            std::sort(deps.begin(), deps.end());
            return p_some_in(n.subject, std::move(deps), canon(n.cont));
          },
          [&](const PChoice&) -> ProcPtr {
            std::vector<ProcPtr> branches;
            flatten_choice(p, branches);
            std::vector<ProcPtr> out;
            bool saw_nil = false;
            for (auto& br : branches) {
              ProcPtr c = canon(br);
              if (std::holds_alternative<PNil>(c->node)) {
                saw_nil = true;  // 0 (+) 0 collapses; a single 0 is kept
                continue;
              }
              if (std::holds_alternative<PChoice>(c->node)) {
                std::vector<ProcPtr> inner;
                flatten_choice(c, inner);
                for (auto& q : inner) out.push_back(q);
              } else {
                out.push_back(c);
              }
            }
            if (out.empty()) return p_nil();
            if (saw_nil) out.push_back(p_nil());
            if (out.size() == 1) return out[0];
            return p_choice_all(std::move(out));
          },
          [&](const PCheck&) { return p; },
      },
      p->node);
}

// Orders parallel components, restricted-name blocks, and choice branches
// using binder-index keys, so congruent processes get identical prints.
// Children are ordered before their keys are taken.
ProcPtr stable_order(const ProcPtr& p, PEnv env, int counter) {
  auto key_of = [&](const ProcPtr& q, const PEnv& e) {
    int local = counter;
    return pshow(q, &e, &local);
  };
  if (std::holds_alternative<PRes>(p->node) ||
      std::holds_alternative<PPar>(p->node)) {
    // a cluster: restriction block over parallel components
    std::vector<std::pair<Name, SPtr>> block;
    ProcPtr cur = p;
    while (auto* res = std::get_if<PRes>(&cur->node)) {
      block.emplace_back(res->name, res->annot);
      cur = res->body;
    }
    std::vector<ProcPtr> comps;
    flatten_par(cur, comps);
    if (comps.empty()) return p_nil();
    PEnv masked = env;
    for (auto& [n, a] : block) masked[n] = "?";
    std::vector<std::pair<std::string, ProcPtr>> keyed;
    keyed.reserve(comps.size());
    for (auto& c : comps) {
      ProcPtr oc = stable_order(c, masked, counter);
      keyed.emplace_back(key_of(oc, masked), oc);
    }
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) {
                       return a.first < b.first;
                     });
    comps.clear();
    for (auto& [k, c] : keyed) comps.push_back(c);
    // block order: first occurrence in the ordered components
    std::vector<std::pair<Name, SPtr>> ordered;
    std::vector<bool> taken(block.size(), false);
    for (auto& c : comps) {
      VarSet fn = free_names(c);
      for (size_t b = 0; b < block.size(); b++)
        if (!taken[b] && contains(fn, block[b].first)) {
          taken[b] = true;
          ordered.push_back(block[b]);
        }
    }
    for (size_t b = 0; b < block.size(); b++)
      if (!taken[b]) ordered.push_back(block[b]);
    ProcPtr body = p_par_all(comps);
    for (size_t b = ordered.size(); b-- > 0;)
      body = p_res(ordered[b].first, ordered[b].second, body);
    return body;
  }
  if (std::holds_alternative<PChoice>(p->node)) {
    std::vector<ProcPtr> branches;
    flatten_choice(p, branches);
    std::vector<std::pair<std::string, ProcPtr>> keyed;
    keyed.reserve(branches.size());
    for (auto& br : branches) {
      ProcPtr ob = stable_order(br, env, counter);
      keyed.emplace_back(key_of(ob, env), ob);
    }
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) {
                       return a.first < b.first;
                     });
    branches.clear();
    for (auto& [k, b] : keyed) branches.push_back(b);
    return p_choice_all(std::move(branches));
  }
  return std::visit(
      overloaded{
          [&](const POut& n) {
            PEnv inner = env;
            inner[n.bound] = "%" + std::to_string(counter);
            return p_out(n.subject, n.bound,
                         stable_order(n.cont, inner, counter + 1));
          },
          [&](const PIn& n) {
            PEnv inner = env;
            inner[n.bound] = "%" + std::to_string(counter);
            return p_in(n.subject, n.bound,
                        stable_order(n.cont, inner, counter + 1));
          },
          [&](const PCloseIn& n) {
            return p_close_in(n.subject, stable_order(n.cont, env, counter));
          },
          [&](const PSomeOut& n) {
            return p_some_out(n.subject, stable_order(n.cont, env, counter));
          },
          [&](const PSomeIn& n) {
            return p_some_in(n.subject, n.deps,
                             stable_order(n.cont, env, counter));
          },
          [&](const auto&) { return p; },
      },
      p->node);
}

}  // namespace

ProcPtr canonical_form(const ProcPtr& p) {
  Canonicalizer c;
  return stable_order(c.canon(p), PEnv{}, 0);
}

std::string canonical_key(const ProcPtr& p) {
  return alpha_print(canonical_form(p));
}

bool process_congruent(const ProcPtr& a, const ProcPtr& b) {
  return canonical_key(a) == canonical_key(b);
}

bool has_unguarded_check(const ProcPtr& p) {
  return std::visit(
      overloaded{
          [](const PCheck&) { return true; },
          [](const PPar& n) {
            return has_unguarded_check(n.left) || has_unguarded_check(n.right);
          },
          [](const PChoice& n) {
            return has_unguarded_check(n.left) || has_unguarded_check(n.right);
          },
          [](const PRes& n) { return has_unguarded_check(n.body); },
          [](const auto&) { return false; },
      },
      p->node);
}

}  // namespace lampi
