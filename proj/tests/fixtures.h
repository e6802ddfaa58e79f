// Small builders for logical forms used across the tests.
#pragma once

#include "mwp/formalism.h"

namespace mwp::fixture {

inline LogicalForm container(const std::string& agent, std::int64_t q, const std::string& entity) {
  return {Predicate::kContainer, {{PropertyKey::kAgent, agent}, {PropertyKey::kQuantity, q}, {PropertyKey::kEntity, entity}}};
}

inline LogicalForm transfer(std::optional<std::string> receiver, std::optional<std::string> sender, std::int64_t q,
                            const std::string& entity) {
  LogicalForm lf{Predicate::kTransfer, {{PropertyKey::kQuantity, q}, {PropertyKey::kEntity, entity}}};
  if (receiver) lf.args[PropertyKey::kReceiverAgent] = *receiver;
  if (sender) lf.args[PropertyKey::kSenderAgent] = *sender;
  return lf;
}

inline LogicalForm comparison(std::string_view type, const std::string& a, const std::string& b, std::int64_t q,
                              const std::string& entity) {
  return {Predicate::kComparison,
          {{PropertyKey::kType, std::string(type)},
           {PropertyKey::kAgentA, a},
           {PropertyKey::kAgentB, b},
           {PropertyKey::kQuantity, q},
           {PropertyKey::kEntity, entity}}};
}

inline LogicalForm rate(const std::string& agent, std::int64_t q, const std::string& entity_a,
                        const std::string& entity_b) {
  return {Predicate::kRate,
          {{PropertyKey::kAgent, agent},
           {PropertyKey::kQuantity, q},
           {PropertyKey::kEntityA, entity_a},
           {PropertyKey::kEntityB, entity_b}}};
}

}  // namespace mwp::fixture
