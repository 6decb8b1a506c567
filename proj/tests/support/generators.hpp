#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "adapterforge/aslt.hpp"
#include "adapterforge/spec.hpp"

namespace adapterforge::testing {

using Rng = std::mt19937_64;

int uniform(Rng& rng, int lo, int hi);
bool chance(Rng& rng, double p);

std::string random_identifier(Rng& rng, std::string_view prefix);
spec::ConceptId random_concept(Rng& rng, std::size_t max_depth);
spec::SemType random_type(Rng& rng, bool allow_unit);
/// A literal that inhabits `ty` and survives format/parse unchanged.
spec::Value random_literal(Rng& rng, const spec::SemType& ty);

/// Valid (validate() is empty) component with meta, both directions, annotations and defaults.
spec::ComponentSpec random_component(Rng& rng);
/// Project over the given component names (connections need not resolve).
spec::ProjectSpec random_project(Rng& rng);

/// Arbitrary tree built through AsltBuilder, respecting the kind hierarchy.
aslt::Aslt random_tree(Rng& rng, std::size_t max_nodes);
aslt::FoldPattern random_pattern(Rng& rng, const aslt::Aslt& tree);

/// A project whose every connection is EXACT or ADAPTABLE by construction.
struct HealCase {
  spec::ProjectSpec project;
  std::vector<spec::ComponentSpec> components;
};

/// Each consumer operation is derived from a provider operation by renaming, permuting,
/// representation changes covered by the built-in conversion table, dropping defaulted
/// parameters and at most one concept hop, keeping the total penalty within the threshold.
HealCase random_heal_case(Rng& rng);

}  // namespace adapterforge::testing
