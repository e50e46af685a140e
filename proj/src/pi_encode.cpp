#include "lampi/pi_encode.hpp"

#include <algorithm>

namespace lampi {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

SPtr encode_strict_type(const StrictPtr& t) {
  if (std::holds_alternative<TUnit>(t->node)) return st_with(st_one());
  auto& a = std::get<TArrow>(t->node);
  SPtr dom = encode_multiset_type(a.domain, TypeParams{mk_unit(), 0});
  return st_with(st_parr(dual(dom), encode_strict_type(a.codomain)));
}

SPtr encode_multiset_type(const MultisetType& m, const TypeParams& params) {
  if (m.count == 0) {
    if (params.i == 0)
      return st_plus(st_parr(st_with(st_one()), st_plus(st_with(st_one()))));
    SPtr tail = encode_multiset_type(
        MultisetType{nullptr, 0}, TypeParams{params.sigma, params.i - 1});
    return st_plus(st_parr(
        st_with(st_one()),
        st_plus(st_with(
            st_tensor(st_plus(encode_strict_type(params.sigma)), tail)))));
  }
  StrictPtr base = m.base ? m.base : mk_unit();
  SPtr rest =
      encode_multiset_type(MultisetType{base, m.count - 1}, params);
  return st_plus(st_parr(
      st_with(st_one()),
      st_plus(st_with(st_tensor(st_plus(encode_strict_type(base)), rest)))));
}

TypingEnv encode_typing_env(const TypeContext& ctx) {
  TypingEnv out;
  for (auto& [v, t] : ctx.strict)
    out[v] = st_with(dual(encode_strict_type(t)));
  for (auto& [v, m] : ctx.multi) {
    // multiset assignments already carry the non-deterministic structure;
    // only strict assignments gain the outer modality
    TypeParams params{m.count > 0 && m.base ? m.base : mk_unit(), 0};
    out[v] = dual(encode_multiset_type(m, params));
  }
  return out;
}

std::pair<TypeParams, TypeParams> choose_params(int j, int k,
                                                const StrictPtr& sigma) {
  if (j > k) return {TypeParams{mk_unit(), 0}, TypeParams{sigma, j - k}};
  if (j < k) return {TypeParams{sigma, k - j}, TypeParams{mk_unit(), 0}};
  return {TypeParams{mk_unit(), 0}, TypeParams{mk_unit(), 0}};
}

namespace {

std::vector<Name> sorted_names(VarSet s) {
  return std::vector<Name>(s.begin(), s.end());
}

std::vector<Name> with_u(const Name& u, VarSet s) {
  s.insert(u);
  return sorted_names(std::move(s));
}

struct PiEncoder {
  NameGen gen;
  const SharingTypeInfo* info;

  ProcPtr term(const SharTermPtr& t, const Name& u);
  ProcPtr bag(const SharBag& b, const Name& x);
  ProcPtr share(const SharTermPtr& body, const std::vector<Name>& shared,
                const Name& x, const Name& u);

  SPtr sub_annotation(const SharTerm* node) {
    if (!info) return nullptr;
    auto it = info->subs.find(node);
    if (it == info->subs.end()) return nullptr;
    auto [pj, pk] =
        choose_params(it->second.bag_count, it->second.shared_count,
                      it->second.sigma);
    return encode_multiset_type(
        MultisetType{it->second.sigma, it->second.bag_count}, pj);
  }
  SPtr app_annotation(const SharTerm* node) {
    if (!info) return nullptr;
    auto it = info->apps.find(node);
    if (it == info->apps.end()) return nullptr;
    auto [pj, pk] = choose_params(it->second.dom_count, it->second.bag_count,
                                  it->second.sigma);
    SPtr bag_side = encode_multiset_type(
        MultisetType{it->second.sigma, it->second.bag_count}, pk);
    return st_plus(
        st_tensor(bag_side, dual(encode_strict_type(it->second.result))));
  }
  SPtr linsub_annotation(const SharTerm* node) {
    if (!info) return nullptr;
    auto it = info->linsubs.find(node);
    if (it == info->linsubs.end()) return nullptr;
    return st_plus(encode_strict_type(it->second));
  }
};

// The sharing construct [x1,...,xk <- x]: one handshake per shared variable,
// terminated by the failure handshake and x.none!.
ProcPtr PiEncoder::share(const SharTermPtr& body,
                         const std::vector<Name>& shared, const Name& x,
                         const Name& u) {
  VarSet body_fv = shar_free_vars(body);
  // innermost stage: signal that no shared variables remain
  Name y = gen.fresh("y");
  VarSet tail_deps = body_fv;
  ProcPtr tail = p_some_out(
      x, p_out(x, y,
               p_par(p_some_in(y, with_u(u, tail_deps),
                               p_close_in(y, term(body, u))),
                     p_none_out(x))));
  // wrap the per-variable receive stages, last shared variable innermost
  ProcPtr acc = tail;
  for (size_t i = shared.size(); i-- > 0;) {
    Name yi = gen.fresh("y");
    VarSet deps = body_fv;
    for (size_t j = i; j < shared.size(); j++) deps.erase(shared[j]);
    ProcPtr stage = p_some_out(
        x,
        p_out(x, yi,
              p_par(p_some_in(yi, {}, p_close_in(yi, p_nil())),
                    p_some_out(x, p_some_in(x, with_u(u, deps),
                                            p_in(x, shared[i], acc))))));
    acc = stage;
  }
  return acc;
}

ProcPtr PiEncoder::bag(const SharBag& b, const Name& x) {
  if (b.items.empty()) {
    Name y = gen.fresh("y");
    return p_some_in(
        x, {},
        p_in(x, y,
             p_par(p_some_out(y, p_close_out(y)),
                   p_some_in(x, {}, p_none_out(x)))));
  }
  VarSet whole_fv = shar_free_vars(b);
  SharBag rest{{b.items.begin() + 1, b.items.end()}};
  Name yi = gen.fresh("y");
  Name xi = gen.fresh("x");
  ProcPtr head_elem =
      p_some_in(xi, sorted_names(shar_free_vars(b.items[0])),
                term(b.items[0], xi));
  return p_some_in(
      x, sorted_names(whole_fv),
      p_in(x, yi,
           p_some_in(x, with_u(yi, whole_fv),
                     p_some_out(x, p_out(x, xi,
                                         p_par(head_elem,
                                               p_par(bag(rest, x),
                                                     p_none_out(yi))))))));
}

ProcPtr PiEncoder::term(const SharTermPtr& t, const Name& u) {
  return std::visit(
      overloaded{
          [&](const SVar& n) { return p_some_out(n.var, p_fwd(n.var, u)); },
          [&](const SAbs& n) {
            auto& sh = std::get<SShare>(n.body->node);
            return p_some_out(
                u, p_in(u, n.param, share(sh.body, sh.shared, sh.var, u)));
          },
          [&](const SApp& n) {
            VarSet bag_fv = shar_free_vars(n.arg);
            SPtr annot = app_annotation(t.get());
            std::vector<ProcPtr> branches;
            for (auto& bi : shar_bag_perm_seq(n.arg)) {
              Name v = gen.fresh("v");
              Name x = gen.fresh("x");
              branches.push_back(p_res(
                  v, annot ? dual(annot) : nullptr,
                  p_par(term(n.fun, v),
                        p_some_in(v, with_u(u, bag_fv),
                                  p_out(v, x,
                                        p_par(p_fwd(v, u), bag(bi, x)))))));
            }
            return p_choice_all(std::move(branches));
          },
          [&](const SLinSub& n) {
            return p_res(
                n.var, linsub_annotation(t.get()),
                p_par(term(n.body, u),
                      p_some_in(n.var, sorted_names(shar_free_vars(n.arg)),
                                term(n.arg, n.var))));
          },
          [&](const SFail& n) {
            std::vector<ProcPtr> parts{p_none_out(u)};
            for (auto& v : n.vars) parts.push_back(p_none_out(v));
            return p_par_all(std::move(parts));
          },
          [&](const SShare& n) {
            return share(n.body, n.shared, n.var, u);
          },
          [&](const SShareSub& n) {
            SPtr annot = sub_annotation(t.get());
            SharTermPtr share_part = smk_share(n.body, n.shared, n.var);
            std::vector<ProcPtr> branches;
            for (auto& bi : shar_bag_perm_seq(n.bag)) {
              branches.push_back(
                  p_res(n.var, annot,
                        p_par(term(share_part, u), bag(bi, n.var))));
            }
            return p_choice_all(std::move(branches));
          },
          [&](const SCheck&) { return p_check(); },
      },
      t->node);
}

}  // namespace

ProcPtr encode_process(const SharTermPtr& t, const Name& u,
                       const SharingTypeInfo* info) {
  PiEncoder enc;
  enc.info = info;
  VarSet used;
  shar_all_vars(t, used);
  used.insert(u);
  // fresh internal names must avoid every source variable
  int max_index = 0;
  for (auto& v : used) max_index = std::max(max_index, v.index + 1);
  enc.gen.counter = max_index;
  return enc.term(t, u);
}

ProcPtr encode_process(const SharExpr& e, const Name& u,
                       const SharingTypeInfo* info) {
  PiEncoder enc;
  enc.info = info;
  VarSet used;
  for (auto& m : e.sum) shar_all_vars(m, used);
  used.insert(u);
  int max_index = 0;
  for (auto& v : used) max_index = std::max(max_index, v.index + 1);
  enc.gen.counter = max_index;
  std::vector<ProcPtr> branches;
  for (auto& m : e.sum) branches.push_back(enc.term(m, u));
  return p_choice_all(std::move(branches));
}

}  // namespace lampi
