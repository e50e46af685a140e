#pragma once

#include "lampi/check.hpp"
#include "lampi/spi.hpp"

namespace lampi {

using TypingEnv = std::map<Name, SPtr>;

std::string print_typing_env(const TypingEnv& env);
TypingEnv parse_typing_env(const std::string& text);

struct PiCheckResult {
  bool ok = false;
  Derivation deriv;
  std::string reason;
  TypingEnv inferred;  // the synthesized context (ok case)
};

// Checks P |- env. Cut types are synthesized by unification; restriction
// annotations, when present, are unified in as constraints.
PiCheckResult pi_typecheck(const ProcPtr& p, const TypingEnv& env);

// Synthesizes some env with P |- env (unconstrained endpoints default to one).
PiCheckResult pi_typesynth(const ProcPtr& p);

}  // namespace lampi
