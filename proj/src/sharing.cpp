#include "lampi/sharing.hpp"

#include <algorithm>
#include <map>

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

SharTermPtr smk_var(Var v) {
  return std::make_shared<SharTerm>(SharTerm{SVar{std::move(v)}});
}
SharTermPtr smk_abs(Var param, SharTermPtr body) {
  return std::make_shared<SharTerm>(
      SharTerm{SAbs{std::move(param), std::move(body)}});
}
SharTermPtr smk_app(SharTermPtr fun, SharBag arg) {
  return std::make_shared<SharTerm>(
      SharTerm{SApp{std::move(fun), std::move(arg)}});
}
SharTermPtr smk_linsub(SharTermPtr body, SharTermPtr arg, Var var) {
  return std::make_shared<SharTerm>(
      SharTerm{SLinSub{std::move(body), std::move(arg), std::move(var)}});
}
SharTermPtr smk_fail(std::vector<Var> vars) {
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return std::make_shared<SharTerm>(SharTerm{SFail{std::move(vars)}});
}
SharTermPtr smk_share(SharTermPtr body, std::vector<Var> shared, Var var) {
  return std::make_shared<SharTerm>(
      SharTerm{SShare{std::move(body), std::move(shared), std::move(var)}});
}
SharTermPtr smk_sharesub(SharTermPtr body, std::vector<Var> shared, Var var,
                         SharBag bag, bool has_share) {
  return std::make_shared<SharTerm>(
      SharTerm{SShareSub{std::move(body), std::move(shared), std::move(var),
                         std::move(bag), has_share}});
}
SharTermPtr smk_check() { return std::make_shared<SharTerm>(SharTerm{SCheck{}}); }
SharExpr sexpr_of(SharTermPtr t) { return SharExpr{{std::move(t)}}; }

// ---- free variables ----

VarSet shar_free_vars(const SharTermPtr& t) {
  return std::visit(
      overloaded{
          [](const SVar& n) { return VarSet{n.var}; },
          [](const SAbs& n) {
            VarSet s = shar_free_vars(n.body);
            s.erase(n.param);
            return s;
          },
          [](const SApp& n) {
            return set_union(shar_free_vars(n.fun), shar_free_vars(n.arg));
          },
          [](const SLinSub& n) {
            VarSet s = shar_free_vars(n.body);
            s.erase(n.var);
            return set_union(std::move(s), shar_free_vars(n.arg));
          },
          [](const SFail& n) { return VarSet(n.vars.begin(), n.vars.end()); },
          [](const SShare& n) {
            VarSet s = shar_free_vars(n.body);
            for (auto& v : n.shared) s.erase(v);
            s.insert(n.var);
            return s;
          },
          [](const SShareSub& n) {
            VarSet s = shar_free_vars(n.body);
            for (auto& v : n.shared) s.erase(v);
            s.erase(n.var);
            return set_union(std::move(s), shar_free_vars(n.bag));
          },
          [](const SCheck&) { return VarSet{}; },
      },
      t->node);
}

VarSet shar_free_vars(const SharBag& b) {
  VarSet s;
  for (auto& m : b.items) s = set_union(std::move(s), shar_free_vars(m));
  return s;
}

VarSet shar_free_vars(const SharExpr& e) {
  VarSet s;
  for (auto& m : e.sum) s = set_union(std::move(s), shar_free_vars(m));
  return s;
}

int shar_occurrence_count(const Var& x, const SharTermPtr& t) {
  return std::visit(
      overloaded{
          [&](const SVar& n) { return n.var == x ? 1 : 0; },
          [&](const SAbs& n) {
            return n.param == x ? 0 : shar_occurrence_count(x, n.body);
          },
          [&](const SApp& n) {
            int c = shar_occurrence_count(x, n.fun);
            for (auto& m : n.arg.items) c += shar_occurrence_count(x, m);
            return c;
          },
          [&](const SLinSub& n) {
            int c = n.var == x ? 0 : shar_occurrence_count(x, n.body);
            return c + shar_occurrence_count(x, n.arg);
          },
          [&](const SFail& n) {
            return int(std::count(n.vars.begin(), n.vars.end(), x));
          },
          [&](const SShare& n) {
            if (std::count(n.shared.begin(), n.shared.end(), x)) return 0;
            int c = shar_occurrence_count(x, n.body);
            return c + (n.var == x ? 1 : 0);
          },
          [&](const SShareSub& n) {
            int c = 0;
            if (!std::count(n.shared.begin(), n.shared.end(), x) && n.var != x)
              c = shar_occurrence_count(x, n.body);
            for (auto& m : n.bag.items) c += shar_occurrence_count(x, m);
            return c;
          },
          [&](const SCheck&) { return 0; },
      },
      t->node);
}

// ---- head and linear head substitution ----

HeadResult shar_head(const SharTermPtr& t) {
  return std::visit(
      overloaded{
          [](const SVar& n) {
            return HeadResult{HeadResult::HVar, n.var, nullptr, {}};
          },
          [&](const SAbs&) {
            return HeadResult{HeadResult::HAbs, {}, nullptr, {}};
          },
          [](const SApp& n) { return shar_head(n.fun); },
          [](const SLinSub& n) { return shar_head(n.body); },
          [](const SFail& n) {
            return HeadResult{HeadResult::HFail, {}, nullptr, n.vars};
          },
          [](const SShare& n) {
            HeadResult h = shar_head(n.body);
            if (h.kind == HeadResult::HVar &&
                std::count(n.shared.begin(), n.shared.end(), h.var))
              return HeadResult{HeadResult::HVar, n.var, nullptr, {}};
            return h;
          },
          [](const SShareSub& n) {
            if (n.shared.size() != n.bag.size() || !n.has_share)
              return HeadResult{HeadResult::HFail, {}, nullptr, {}};
            HeadResult h = shar_head(n.body);
            if (h.kind == HeadResult::HVar &&
                std::count(n.shared.begin(), n.shared.end(), h.var))
              return HeadResult{HeadResult::HVar, n.var, nullptr, {}};
            return h;
          },
          [](const SCheck&) {
            return HeadResult{HeadResult::HCheck, {}, nullptr, {}};
          },
      },
      t->node);
}

SharTermPtr shar_linear_head_subst(const SharTermPtr& t, const SharTermPtr& n,
                                   const Var& x) {
  HeadResult h = shar_head(t);
  if (h.kind != HeadResult::HVar || h.var != x)
    throw HeadMismatch("shar_linear_head_subst: head is not " + to_string(x));
  return std::visit(
      overloaded{
          [&](const SVar&) { return n; },
          [&](const SApp& a) {
            return smk_app(shar_linear_head_subst(a.fun, n, x), a.arg);
          },
          [&](const SLinSub& s) {
            if (s.var == x)
              throw HeadMismatch("substitution variable is linearly bound");
            return smk_linsub(shar_linear_head_subst(s.body, n, x), s.arg,
                              s.var);
          },
          [&](const SShare& s) {
            if (s.var == x)
              throw HeadMismatch("substitution variable is a sharing variable");
            return smk_share(shar_linear_head_subst(s.body, n, x), s.shared,
                             s.var);
          },
          [&](const SShareSub& s) {
            if (s.var == x)
              throw HeadMismatch("substitution variable is a sharing variable");
            return smk_sharesub(shar_linear_head_subst(s.body, n, x), s.shared,
                                s.var, s.bag, s.has_share);
          },
          [&](const auto&) -> SharTermPtr {
            throw HeadMismatch("shar_linear_head_subst: unexpected shape");
          },
      },
      t->node);
}

// ---- validation ----

namespace {

// Occurrences of x in sharing-variable position (the x of [xs <- x]).
int share_position_count(const Var& x, const SharTermPtr& t) {
  return std::visit(
      overloaded{
          [&](const SVar&) { return 0; },
          [&](const SAbs& n) {
            return n.param == x ? 0 : share_position_count(x, n.body);
          },
          [&](const SApp& n) {
            int c = share_position_count(x, n.fun);
            for (auto& m : n.arg.items) c += share_position_count(x, m);
            return c;
          },
          [&](const SLinSub& n) {
            int c = n.var == x ? 0 : share_position_count(x, n.body);
            return c + share_position_count(x, n.arg);
          },
          [&](const SFail&) { return 0; },
          [&](const SShare& n) {
            int c = n.var == x ? 1 : 0;
            if (!std::count(n.shared.begin(), n.shared.end(), x))
              c += share_position_count(x, n.body);
            return c;
          },
          [&](const SShareSub& n) {
            int c = 0;
            if (!std::count(n.shared.begin(), n.shared.end(), x) && n.var != x)
              c += share_position_count(x, n.body);
            for (auto& m : n.bag.items) c += share_position_count(x, m);
            return c;
          },
          [&](const SCheck&) { return 0; },
      },
      t->node);
}

bool contains_linsub_on(const Var& x, const SharTermPtr& t) {
  return std::visit(
      overloaded{
          [&](const SVar&) { return false; },
          [&](const SAbs& n) { return contains_linsub_on(x, n.body); },
          [&](const SApp& n) {
            if (contains_linsub_on(x, n.fun)) return true;
            for (auto& m : n.arg.items)
              if (contains_linsub_on(x, m)) return true;
            return false;
          },
          [&](const SLinSub& n) {
            return n.var == x || contains_linsub_on(x, n.body) ||
                   contains_linsub_on(x, n.arg);
          },
          [&](const SFail&) { return false; },
          [&](const SShare& n) { return contains_linsub_on(x, n.body); },
          [&](const SShareSub& n) {
            if (contains_linsub_on(x, n.body)) return true;
            for (auto& m : n.bag.items)
              if (contains_linsub_on(x, m)) return true;
            return false;
          },
          [&](const SCheck&) { return false; },
      },
      t->node);
}

std::optional<ValidationError> check_share_vars(const SharTermPtr& body,
                                                const std::vector<Var>& shared,
                                                const std::string& what) {
  for (auto& xi : shared) {
    int occ = shar_occurrence_count(xi, body);
    if (occ != 1)
      return ValidationError{what + ": shared variable " + to_string(xi) +
                             " occurs " + std::to_string(occ) +
                             " times (expected exactly 1)"};
    if (share_position_count(xi, body) > 0)
      return ValidationError{what + ": shared variable " + to_string(xi) +
                             " is itself used as a sharing variable"};
  }
  for (size_t i = 0; i < shared.size(); i++)
    for (size_t j = i + 1; j < shared.size(); j++)
      if (shared[i] == shared[j])
        return ValidationError{what + ": duplicate shared variable " +
                               to_string(shared[i])};
  return std::nullopt;
}

}  // namespace

std::optional<ValidationError> validate(const SharTermPtr& t) {
  using R = std::optional<ValidationError>;
  return std::visit(
      overloaded{
          [&](const SVar&) -> R { return std::nullopt; },
          [&](const SAbs& n) -> R {
            const SShare* sh = std::get_if<SShare>(&n.body->node);
            if (!sh || sh->var != n.param)
              return ValidationError{
                  "abstraction body must share its bound variable"};
            return validate(n.body);
          },
          [&](const SApp& n) -> R {
            if (auto e = validate(n.fun)) return e;
            for (auto& m : n.arg.items)
              if (auto e = validate(m)) return e;
            return std::nullopt;
          },
          [&](const SLinSub& n) -> R {
            int occ = shar_occurrence_count(n.var, n.body);
            if (occ != 1)
              return ValidationError{
                  "linear substitution variable " + to_string(n.var) +
                  " occurs " + std::to_string(occ) + " times (expected 1)"};
            if (share_position_count(n.var, n.body) > 0)
              return ValidationError{"linear substitution variable " +
                                     to_string(n.var) +
                                     " is used as a sharing variable"};
            if (contains_linsub_on(n.var, n.body))
              return ValidationError{
                  "nested linear substitutions on " + to_string(n.var)};
            if (auto e = validate(n.body)) return e;
            return validate(n.arg);
          },
          [&](const SFail&) -> R { return std::nullopt; },
          [&](const SShare& n) -> R {
            if (auto e = check_share_vars(n.body, n.shared, "sharing")) return e;
            return validate(n.body);
          },
          [&](const SShareSub& n) -> R {
            if (!n.has_share)
              return ValidationError{
                  "explicit substitution without a sharing prefix on " +
                  to_string(n.var)};
            if (auto e = check_share_vars(n.body, n.shared,
                                          "substituted sharing"))
              return e;
            if (auto e = validate(n.body)) return e;
            for (auto& m : n.bag.items)
              if (auto e = validate(m)) return e;
            return std::nullopt;
          },
          [&](const SCheck&) -> R { return std::nullopt; },
      },
      t->node);
}

std::optional<ValidationError> validate(const SharExpr& e) {
  for (auto& m : e.sum)
    if (auto err = validate(m)) return err;
  return std::nullopt;
}

// ---- renaming ----

SharTermPtr shar_rename_free(const SharTermPtr& t, const Var& x,
                             const Var& y) {
  auto ren_bag = [&](const SharBag& b) {
    SharBag out;
    for (auto& m : b.items) out.items.push_back(shar_rename_free(m, x, y));
    return out;
  };
  auto ren_list = [&](std::vector<Var> vs) {
    for (auto& v : vs)
      if (v == x) v = y;
    return vs;
  };
  return std::visit(
      overloaded{
          [&](const SVar& n) { return n.var == x ? smk_var(y) : t; },
          [&](const SAbs& n) {
            if (n.param == x) return t;
            return smk_abs(n.param, shar_rename_free(n.body, x, y));
          },
          [&](const SApp& n) {
            return smk_app(shar_rename_free(n.fun, x, y), ren_bag(n.arg));
          },
          [&](const SLinSub& n) {
            SharTermPtr body =
                n.var == x ? n.body : shar_rename_free(n.body, x, y);
            return smk_linsub(body, shar_rename_free(n.arg, x, y), n.var);
          },
          [&](const SFail& n) {
            std::vector<Var> vars = n.vars;
            for (auto& v : vars)
              if (v == x) v = y;
            return smk_fail(std::move(vars));
          },
          [&](const SShare& n) {
            SharTermPtr body = n.body;
            if (!std::count(n.shared.begin(), n.shared.end(), x))
              body = shar_rename_free(body, x, y);
            return smk_share(body, n.shared, n.var == x ? y : n.var);
          },
          [&](const SShareSub& n) {
            SharTermPtr body = n.body;
            if (!std::count(n.shared.begin(), n.shared.end(), x) && n.var != x)
              body = shar_rename_free(body, x, y);
            return smk_sharesub(body, n.shared, n.var, ren_bag(n.bag),
                                n.has_share);
          },
          [&](const SCheck&) { return t; },
      },
      t->node);
}

void shar_all_vars(const SharTermPtr& t, VarSet& out) {
  std::visit(overloaded{
                 [&](const SVar& n) { out.insert(n.var); },
                 [&](const SAbs& n) {
                   out.insert(n.param);
                   shar_all_vars(n.body, out);
                 },
                 [&](const SApp& n) {
                   shar_all_vars(n.fun, out);
                   for (auto& m : n.arg.items) shar_all_vars(m, out);
                 },
                 [&](const SLinSub& n) {
                   out.insert(n.var);
                   shar_all_vars(n.body, out);
                   shar_all_vars(n.arg, out);
                 },
                 [&](const SFail& n) {
                   for (auto& v : n.vars) out.insert(v);
                 },
                 [&](const SShare& n) {
                   out.insert(n.var);
                   for (auto& v : n.shared) out.insert(v);
                   shar_all_vars(n.body, out);
                 },
                 [&](const SShareSub& n) {
                   out.insert(n.var);
                   for (auto& v : n.shared) out.insert(v);
                   shar_all_vars(n.body, out);
                   for (auto& m : n.bag.items) shar_all_vars(m, out);
                 },
                 [&](const SCheck&) {},
             },
             t->node);
}

SharTermPtr shar_alpha_avoid(const SharTermPtr& t, const VarSet& avoid,
                             NameGen& gen) {
  auto avoid_bag = [&](const SharBag& b) {
    SharBag out;
    for (auto& m : b.items)
      out.items.push_back(shar_alpha_avoid(m, avoid, gen));
    return out;
  };
  return std::visit(
      overloaded{
          [&](const SVar&) { return t; },
          [&](const SAbs& n) {
            SharTermPtr body = shar_alpha_avoid(n.body, avoid, gen);
            if (contains(avoid, n.param)) {
              Var fresh = gen.fresh(n.param.base);
              return smk_abs(fresh, shar_rename_free(body, n.param, fresh));
            }
            return smk_abs(n.param, body);
          },
          [&](const SApp& n) {
            return smk_app(shar_alpha_avoid(n.fun, avoid, gen),
                           avoid_bag(n.arg));
          },
          [&](const SLinSub& n) {
            SharTermPtr body = shar_alpha_avoid(n.body, avoid, gen);
            SharTermPtr arg = shar_alpha_avoid(n.arg, avoid, gen);
            if (contains(avoid, n.var)) {
              Var fresh = gen.fresh(n.var.base);
              return smk_linsub(shar_rename_free(body, n.var, fresh), arg,
                                fresh);
            }
            return smk_linsub(body, arg, n.var);
          },
          [&](const SFail&) { return t; },
          [&](const SShare& n) {
            SharTermPtr body = shar_alpha_avoid(n.body, avoid, gen);
            std::vector<Var> shared = n.shared;
            for (auto& v : shared) {
              if (contains(avoid, v)) {
                Var fresh = gen.fresh(v.base);
                body = shar_rename_free(body, v, fresh);
                v = fresh;
              }
            }
            return smk_share(body, shared, n.var);
          },
          [&](const SShareSub& n) {
            SharTermPtr body = shar_alpha_avoid(n.body, avoid, gen);
            std::vector<Var> shared = n.shared;
            for (auto& v : shared) {
              if (contains(avoid, v)) {
                Var fresh = gen.fresh(v.base);
                body = shar_rename_free(body, v, fresh);
                v = fresh;
              }
            }
            SharBag bag = avoid_bag(n.bag);
            Var var = n.var;
            if (contains(avoid, var)) {
              Var fresh = gen.fresh(var.base);
              body = shar_rename_free(body, var, fresh);
              var = fresh;
            }
            return smk_sharesub(body, shared, var, bag, n.has_share);
          },
          [&](const SCheck&) { return t; },
      },
      t->node);
}

std::vector<SharBag> shar_bag_perm_seq(const SharBag& b) {
  std::vector<SharBag> out;
  for (auto& perm : index_permutations(b.items.size())) {
    SharBag p;
    for (size_t i : perm) p.items.push_back(b.items[i]);
    out.push_back(std::move(p));
  }
  return out;
}

// ---- printing ----

namespace {

using AlphaEnv = std::map<Var, std::string>;

std::string sshow_var(const Var& v, const AlphaEnv* env) {
  if (env) {
    auto it = env->find(v);
    if (it != env->end()) return it->second;
  }
  return to_string(v);
}

std::string sshow(const SharTermPtr& t, const AlphaEnv* env, int* counter);

std::string sshow_bag(const SharBag& b, const AlphaEnv* env, int* counter) {
  if (b.items.empty()) return "1";
  std::string out;
  for (size_t i = 0; i < b.items.size(); i++) {
    if (i) out += "*";
    out += "[" + sshow(b.items[i], env, counter) + "]";
  }
  return out;
}

bool share_target_parens(const SharTermPtr& t) {
  return std::holds_alternative<SAbs>(t->node);
}

bool fun_parens(const SharTermPtr& t) {
  return std::holds_alternative<SAbs>(t->node);
}

std::string sshow(const SharTermPtr& t, const AlphaEnv* env, int* counter) {
  auto bind = [&](AlphaEnv& inner, const Var& v) {
    inner[v] = "%" + std::to_string((*counter)++);
    return inner[v];
  };
  return std::visit(
      overloaded{
          [&](const SVar& n) { return sshow_var(n.var, env); },
          [&](const SAbs& n) {
            if (env) {
              AlphaEnv inner = *env;
              std::string p = bind(inner, n.param);
              return "\\" + p + ". " + sshow(n.body, &inner, counter);
            }
            return "\\" + to_string(n.param) + ". " + sshow(n.body, env, counter);
          },
          [&](const SApp& n) {
            std::string f = sshow(n.fun, env, counter);
            if (fun_parens(n.fun)) f = "(" + f + ")";
            return f + " " + sshow_bag(n.arg, env, counter);
          },
          [&](const SLinSub& n) {
            std::string arg = sshow(n.arg, env, counter);
            std::string body, v;
            if (env) {
              AlphaEnv inner = *env;
              v = bind(inner, n.var);
              body = sshow(n.body, &inner, counter);
            } else {
              v = to_string(n.var);
              body = sshow(n.body, env, counter);
            }
            if (fun_parens(n.body)) body = "(" + body + ")";
            return body + " <|" + arg + "/" + v + "|>";
          },
          [&](const SFail& n) {
            std::string out = "fail{";
            for (size_t i = 0; i < n.vars.size(); i++) {
              if (i) out += ",";
              out += sshow_var(n.vars[i], env);
            }
            return out + "}";
          },
          [&](const SShare& n) {
            std::string v = sshow_var(n.var, env);
            std::string body, vars;
            if (env) {
              AlphaEnv inner = *env;
              std::vector<std::string> names;
              for (auto& s : n.shared) names.push_back(bind(inner, s));
              body = sshow(n.body, &inner, counter);
              for (size_t i = 0; i < names.size(); i++)
                vars += (i ? "," : "") + names[i];
            } else {
              body = sshow(n.body, env, counter);
              for (size_t i = 0; i < n.shared.size(); i++)
                vars += (i ? "," : "") + to_string(n.shared[i]);
            }
            if (share_target_parens(n.body)) body = "(" + body + ")";
            return body + "[" + vars + "<-" + v + "]";
          },
          [&](const SShareSub& n) {
            std::string bag = sshow_bag(n.bag, env, counter);
            std::string body, vars, v;
            if (env) {
              AlphaEnv inner = *env;
              std::vector<std::string> names;
              for (auto& s : n.shared) names.push_back(bind(inner, s));
              v = bind(inner, n.var);
              body = sshow(n.body, &inner, counter);
              for (size_t i = 0; i < names.size(); i++)
                vars += (i ? "," : "") + names[i];
            } else {
              v = to_string(n.var);
              body = sshow(n.body, env, counter);
              for (size_t i = 0; i < n.shared.size(); i++)
                vars += (i ? "," : "") + to_string(n.shared[i]);
            }
            if (share_target_parens(n.body)) body = "(" + body + ")";
            if (!n.has_share) return body + " <<" + bag + "/" + v + ">>";
            return body + "[" + vars + "<-" + v + "]<<" + bag + "/" + v + ">>";
          },
          [&](const SCheck&) { return std::string("check"); },
      },
      t->node);
}

}  // namespace

std::string print_shar_term(const SharTermPtr& t) {
  return sshow(t, nullptr, nullptr);
}
std::string print_shar_bag(const SharBag& b) {
  return sshow_bag(b, nullptr, nullptr);
}
std::string print_shar_expr(const SharExpr& e) {
  std::string out;
  for (size_t i = 0; i < e.sum.size(); i++) {
    if (i) out += " + ";
    out += print_shar_term(e.sum[i]);
  }
  return out;
}

std::string alpha_print(const SharTermPtr& t) {
  AlphaEnv env;
  int counter = 0;
  return sshow(t, &env, &counter);
}

std::string alpha_print(const SharExpr& e) {
  std::string out;
  for (size_t i = 0; i < e.sum.size(); i++) {
    if (i) out += " + ";
    out += alpha_print(e.sum[i]);
  }
  return out;
}

SharTermPtr canon_shar_term(const SharTermPtr& t) {
  auto canon_bag = [](const SharBag& b) {
    std::vector<std::pair<std::string, SharTermPtr>> keyed;
    keyed.reserve(b.items.size());
    for (auto& m : b.items) {
      SharTermPtr c = canon_shar_term(m);
      keyed.emplace_back(alpha_print(c), c);
    }
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& c) { return a.first < c.first; });
    SharBag out;
    for (auto& [k, m] : keyed) out.items.push_back(m);
    return out;
  };
  return std::visit(
      overloaded{
          [&](const SVar&) { return t; },
          [&](const SAbs& n) { return smk_abs(n.param, canon_shar_term(n.body)); },
          [&](const SApp& n) {
            return smk_app(canon_shar_term(n.fun), canon_bag(n.arg));
          },
          [&](const SLinSub& n) {
            return smk_linsub(canon_shar_term(n.body), canon_shar_term(n.arg),
                              n.var);
          },
          [&](const SFail&) { return t; },
          [&](const SShare& n) {
            return smk_share(canon_shar_term(n.body), n.shared, n.var);
          },
          [&](const SShareSub& n) {
            return smk_sharesub(canon_shar_term(n.body), n.shared, n.var,
                                canon_bag(n.bag), n.has_share);
          },
          [&](const SCheck&) { return t; },
      },
      t->node);
}

SharExpr canon_shar_expr(const SharExpr& e) {
  std::vector<std::pair<std::string, SharTermPtr>> keyed;
  keyed.reserve(e.sum.size());
  for (auto& m : e.sum) {
    SharTermPtr c = canon_shar_term(m);
    keyed.emplace_back(alpha_print(c), c);
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SharExpr out;
  for (auto& [k, m] : keyed) out.sum.push_back(m);
  return out;
}

std::string canonical_key(const SharTermPtr& t) {
  return alpha_print(canon_shar_term(t));
}
std::string canonical_key(const SharExpr& e) {
  return alpha_print(canon_shar_expr(e));
}
bool shar_term_equal(const SharTermPtr& a, const SharTermPtr& b) {
  return canonical_key(a) == canonical_key(b);
}
bool shar_expr_equal(const SharExpr& a, const SharExpr& b) {
  return canonical_key(a) == canonical_key(b);
}

// ---- parsing ----

namespace {

SharTermPtr parse_sterm_at(TokenStream& ts);

SharBag parse_sbag_at(TokenStream& ts) {
  if (ts.accept_symbol("(")) {
    SharBag inner = parse_sbag_at(ts);
    ts.expect_symbol(")");
    return inner;
  }
  if (ts.peek().kind == Token::Number && ts.peek().number == 1) {
    ts.next();
    return SharBag{};
  }
  SharBag out;
  ts.expect_symbol("[");
  out.items.push_back(parse_sterm_at(ts));
  ts.expect_symbol("]");
  while (ts.accept_symbol("*")) {
    if (ts.peek().kind == Token::Number && ts.peek().number == 1) {
      ts.next();
      break;
    }
    ts.expect_symbol("[");
    out.items.push_back(parse_sterm_at(ts));
    ts.expect_symbol("]");
  }
  return out;
}

// A '[' opens a share when the bracket content is `<-` or `ident (`,`|`<-`)`.
bool starts_share(const TokenStream& ts) {
  if (!ts.is_symbol("[")) return false;
  if (ts.is_symbol("<-", 1)) return true;
  return ts.peek(1).kind == Token::Ident &&
         (ts.is_symbol(",", 2) || ts.is_symbol("<-", 2));
}

bool starts_sbag(const TokenStream& ts) {
  if (starts_share(ts)) return false;
  if (ts.is_symbol("[") ||
      (ts.peek().kind == Token::Number && ts.peek().number == 1))
    return true;
  return ts.is_symbol("(") &&
         (ts.is_symbol("[", 1) ||
          (ts.peek(1).kind == Token::Number && ts.peek(1).number == 1));
}

SharTermPtr parse_satom(TokenStream& ts) {
  const Token& t = ts.peek();
  if (ts.accept_symbol("(")) {
    SharTermPtr inner = parse_sterm_at(ts);
    ts.expect_symbol(")");
    return inner;
  }
  if (t.kind == Token::Ident) {
    if (t.text == "fail") {
      ts.next();
      ts.expect_symbol("{");
      std::vector<Var> vars;
      if (!ts.is_symbol("}")) {
        vars.push_back(ts.expect_ident());
        while (ts.accept_symbol(",")) vars.push_back(ts.expect_ident());
      }
      ts.expect_symbol("}");
      return smk_fail(std::move(vars));
    }
    if (t.text == "check" && t.var_index < 0) {
      ts.next();
      return smk_check();
    }
    ts.next();
    return smk_var(t.as_var());
  }
  throw SyntaxError("expected a term, found '" + t.text + "'", t.pos);
}

SharTermPtr parse_sterm_at(TokenStream& ts) {
  if (ts.accept_symbol("\\")) {
    Var param = ts.expect_ident();
    ts.expect_symbol(".");
    return smk_abs(param, parse_sterm_at(ts));
  }
  SharTermPtr acc = parse_satom(ts);
  for (;;) {
    if (starts_share(ts)) {
      ts.expect_symbol("[");
      std::vector<Var> shared;
      if (!ts.is_symbol("<-")) {
        shared.push_back(ts.expect_ident());
        while (ts.accept_symbol(",")) shared.push_back(ts.expect_ident());
      }
      ts.expect_symbol("<-");
      Var v = ts.expect_ident();
      ts.expect_symbol("]");
      acc = smk_share(acc, std::move(shared), v);
    } else if (starts_sbag(ts)) {
      acc = smk_app(acc, parse_sbag_at(ts));
    } else if (ts.accept_symbol("<<")) {
      SharBag b = parse_sbag_at(ts);
      ts.expect_symbol("/");
      Var v = ts.expect_ident();
      ts.expect_symbol(">>");
      // fuse the share + substitution form
      if (auto* sh = std::get_if<SShare>(&acc->node); sh && sh->var == v) {
        acc = smk_sharesub(sh->body, sh->shared, v, std::move(b), true);
      } else {
        acc = smk_sharesub(acc, {}, v, std::move(b), false);
      }
    } else if (ts.accept_symbol("<|")) {
      SharTermPtr arg = parse_sterm_at(ts);
      ts.expect_symbol("/");
      Var v = ts.expect_ident();
      ts.expect_symbol("|>");
      acc = smk_linsub(acc, arg, v);
    } else {
      break;
    }
  }
  return acc;
}

}  // namespace

SharExpr parse_shar_expr(const std::string& text) {
  TokenStream ts(text);
  SharExpr out;
  out.sum.push_back(parse_sterm_at(ts));
  while (ts.accept_symbol("+")) out.sum.push_back(parse_sterm_at(ts));
  ts.expect_end();
  return out;
}

SharTermPtr parse_shar_term(const std::string& text) {
  TokenStream ts(text);
  SharTermPtr t = parse_sterm_at(ts);
  ts.expect_end();
  return t;
}

}  // namespace lampi
