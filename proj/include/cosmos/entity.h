#ifndef COSMOS_ENTITY_H_
#define COSMOS_ENTITY_H_

#include <optional>
#include <string>
#include <string_view>

namespace cosmos {

enum class EntityCategory { kPerson, kTime, kLocation, kVerb };

std::string_view CategoryName(EntityCategory c);
std::optional<EntityCategory> ParseCategory(std::string_view name);

// A categorized mention inside one sentence; [token_start, token_end).
struct EntitySpan {
  EntityCategory category = EntityCategory::kPerson;
  int token_start = 0;
  int token_end = 0;
  std::string text;

  int length() const { return token_end - token_start; }
  bool operator==(const EntitySpan&) const = default;
};

}  // namespace cosmos

#endif  // COSMOS_ENTITY_H_
