#pragma once

// Seeded two-mode data with planted block structure, for tests and demos.

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "gsim/ingest.hpp"

namespace gsim {

struct PlantedBlocks {
  std::size_t actors = 2000;
  std::size_t attributes = 200;
  std::size_t blocks = 4;
  double p_in = 0.2;   // declaration probability inside an actor's own block
  double p_out = 0.05;  // elsewhere
  std::uint64_t seed = 1;
};

struct SyntheticData {
  BipartitePairs pairs;
  // Planted block of every generated label.
  std::unordered_map<std::string, std::size_t> actor_block;
  std::unordered_map<std::string, std::size_t> attribute_block;
};

// Actor i belongs to block i * blocks / actors (likewise for attributes).
// Labels are "u<i>" and "a<j>", zero padded. Deterministic for a given seed.
SyntheticData generate_planted(const PlantedBlocks& spec);

// Seeded bernoulli(density) matrix of the given shape, constant rows and
// columns removed through build_incidence.
IncidenceMatrix random_incidence(std::size_t actors, std::size_t attributes, double density,
                                 std::uint64_t seed);

}  // namespace gsim
