#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lampi/var.hpp"

namespace lampi {

using Name = Var;

// ---- session types ----

struct SessionType;
using SPtr = std::shared_ptr<const SessionType>;

struct StBot {};
struct StOne {};
struct StTensor {
  SPtr left, right;
};
struct StParr {
  SPtr left, right;
};
struct StWith {  // &A: may produce A
  SPtr inner;
};
struct StPlus {  // +A: may consume A
  SPtr inner;
};
struct StMeta {  // checker-internal; dualized marks dual(?id)
  int id;
  bool dualized;
};

struct SessionType {
  std::variant<StBot, StOne, StTensor, StParr, StWith, StPlus, StMeta> node;
};

SPtr st_bot();
SPtr st_one();
SPtr st_tensor(SPtr a, SPtr b);
SPtr st_parr(SPtr a, SPtr b);
SPtr st_with(SPtr a);
SPtr st_plus(SPtr a);
SPtr st_meta(int id, bool dualized);

SPtr dual(const SPtr& t);
std::string print_session_type(const SPtr& t);
SPtr parse_session_type(const std::string& text);
bool session_equal(const SPtr& a, const SPtr& b);

// ---- processes ----

struct Process;
using ProcPtr = std::shared_ptr<const Process>;

struct PNil {};
struct POut {  // x!(y).P
  Name subject, bound;
  ProcPtr cont;
};
struct PIn {  // x?(y).P
  Name subject, bound;
  ProcPtr cont;
};
struct PPar {
  ProcPtr left, right;
};
struct PRes {  // new x [: T]. P
  Name name;
  SPtr annot;  // may be null
  ProcPtr body;
};
struct PFwd {  // [x<->y]
  Name a, b;
};
struct PCloseOut {  // x.close!
  Name subject;
};
struct PCloseIn {  // x.close?;P
  Name subject;
  ProcPtr cont;
};
struct PSomeOut {  // x.some!;P
  Name subject;
  ProcPtr cont;
};
struct PNoneOut {  // x.none!
  Name subject;
};
struct PSomeIn {  // x.some?(w1,...,wn);P
  Name subject;
  std::vector<Name> deps;
  ProcPtr cont;
};
struct PChoice {  // P (+) Q
  ProcPtr left, right;
};
struct PCheck {};

struct Process {
  std::variant<PNil, POut, PIn, PPar, PRes, PFwd, PCloseOut, PCloseIn,
               PSomeOut, PNoneOut, PSomeIn, PChoice, PCheck>
      node;
};

ProcPtr p_nil();
ProcPtr p_out(Name subject, Name bound, ProcPtr cont);
ProcPtr p_in(Name subject, Name bound, ProcPtr cont);
ProcPtr p_par(ProcPtr l, ProcPtr r);
ProcPtr p_par_all(std::vector<ProcPtr> ps);  // right-nested; empty is 0
ProcPtr p_res(Name name, SPtr annot, ProcPtr body);
ProcPtr p_fwd(Name a, Name b);
ProcPtr p_close_out(Name subject);
ProcPtr p_close_in(Name subject, ProcPtr cont);
ProcPtr p_some_out(Name subject, ProcPtr cont);
ProcPtr p_none_out(Name subject);
ProcPtr p_some_in(Name subject, std::vector<Name> deps, ProcPtr cont);
ProcPtr p_choice(ProcPtr l, ProcPtr r);
ProcPtr p_choice_all(std::vector<ProcPtr> ps);
ProcPtr p_check();

VarSet free_names(const ProcPtr& p);
// Capture-avoiding name substitution p{y/x}.
ProcPtr subst_name(const ProcPtr& p, const Name& x, const Name& y);

std::string print_process(const ProcPtr& p);
std::string alpha_print(const ProcPtr& p);
ProcPtr parse_process(const std::string& text);

// Structural-congruence normal form: choices distributed out of restrictions,
// parallel compositions flattened and sorted, units erased, restrictions
// extruded and ordered, forwarders oriented.
ProcPtr canonical_form(const ProcPtr& p);
std::string canonical_key(const ProcPtr& p);
bool process_congruent(const ProcPtr& a, const ProcPtr& b);

// Unguarded occurrence of the success construct.
bool has_unguarded_check(const ProcPtr& p);

}  // namespace lampi
