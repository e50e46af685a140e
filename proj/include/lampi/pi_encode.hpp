#pragma once

#include "lampi/check.hpp"
#include "lampi/sharing.hpp"
#include "lampi/spi.hpp"
#include "lampi/spi_check.hpp"

namespace lampi {

// Parameter pair (sigma, i) of the multiset-type translation.
struct TypeParams {
  StrictPtr sigma;
  int i = 0;
};

SPtr encode_strict_type(const StrictPtr& t);
SPtr encode_multiset_type(const MultisetType& m, const TypeParams& params);
TypingEnv encode_typing_env(const TypeContext& ctx);

// Parameters making the translations of sigma^j and sigma^k coincide;
// first component for the j side, second for the k side.
std::pair<TypeParams, TypeParams> choose_params(int j, int k,
                                                const StrictPtr& sigma);

// The process translation. When `info` is supplied (from
// check_wellformed_sharing_info), restrictions are annotated with the
// translated cut types chosen via choose_params.
ProcPtr encode_process(const SharExpr& e, const Name& u,
                       const SharingTypeInfo* info = nullptr);
ProcPtr encode_process(const SharTermPtr& t, const Name& u,
                       const SharingTypeInfo* info = nullptr);

}  // namespace lampi
