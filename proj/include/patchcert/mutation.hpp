#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace patchcert {

/// Deliberate defender faults used to show that the oracle validators can fail.
/// Production runs always use Mutation::none.
enum class Mutation {
  none,
  voting_nac_drop_overlap,    // NAC_voting without the +|X_p| term
  voting_nac_strict,          // NAC_voting with '>' instead of '>='
  revised_skip_case3_warning, // revised prediction returns Case III without a warning
  revised_iterate_minority,   // revised prediction loops over M_min instead of M
};

std::string_view to_string(Mutation m);
std::optional<Mutation> parse_mutation(std::string_view name);
std::vector<Mutation> all_mutations();

}  // namespace patchcert
