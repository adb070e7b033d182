#include "patchcert/mutation.hpp"

#include <array>
#include <utility>

namespace patchcert {
namespace {

constexpr std::array<std::pair<Mutation, std::string_view>, 5> kNames{{
    {Mutation::none, "none"},
    {Mutation::voting_nac_drop_overlap, "voting-nac-drop-overlap"},
    {Mutation::voting_nac_strict, "voting-nac-strict"},
    {Mutation::revised_skip_case3_warning, "revised-skip-case3-warning"},
    {Mutation::revised_iterate_minority, "revised-iterate-minority"},
}};

}  // namespace

std::string_view to_string(Mutation m) {
  for (const auto& [value, name] : kNames) {
    if (value == m) return name;
  }
  return "?";
}

std::optional<Mutation> parse_mutation(std::string_view name) {
  for (const auto& [value, text] : kNames) {
    if (text == name) return value;
  }
  return std::nullopt;
}

std::vector<Mutation> all_mutations() {
  return {Mutation::voting_nac_drop_overlap, Mutation::voting_nac_strict,
          Mutation::revised_skip_case3_warning, Mutation::revised_iterate_minority};
}

}  // namespace patchcert
