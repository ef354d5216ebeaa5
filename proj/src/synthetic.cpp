#include "gsim/synthetic.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace gsim {
namespace {

// Integer bernoulli draw so streams are identical across standard libraries.
class Coin {
 public:
  explicit Coin(std::uint64_t seed) : rng_(seed) {}
  bool flip(double p) {
    if (p <= 0) return (void)rng_(), false;
    if (p >= 1) return (void)rng_(), true;
    const auto cut = static_cast<std::uint64_t>(std::ldexp(p, 64));
    return rng_() < cut;
  }

 private:
  std::mt19937_64 rng_;
};

std::string padded(char prefix, std::size_t i, std::size_t n) {
  std::string digits = std::to_string(i);
  const std::size_t width = std::to_string(n > 0 ? n - 1 : 0).size();
  return prefix + std::string(width - std::min(width, digits.size()), '0') + digits;
}

}  // namespace

SyntheticData generate_planted(const PlantedBlocks& spec) {
  if (spec.blocks == 0 || spec.actors < spec.blocks || spec.attributes < spec.blocks)
    throw std::invalid_argument("planted blocks: need at least one actor and attribute per block");
  if (!(spec.p_in >= 0 && spec.p_in <= 1 && spec.p_out >= 0 && spec.p_out <= 1))
    throw std::invalid_argument("planted blocks: probabilities must lie in [0, 1]");
  SyntheticData out;
  std::vector<std::string> attrs(spec.attributes);
  for (std::size_t j = 0; j < spec.attributes; ++j) {
    attrs[j] = padded('a', j, spec.attributes);
    out.attribute_block[attrs[j]] = j * spec.blocks / spec.attributes;
  }
  Coin coin(spec.seed);
  std::vector<Declaration> raw;
  for (std::size_t i = 0; i < spec.actors; ++i) {
    const auto actor = padded('u', i, spec.actors);
    const std::size_t block = i * spec.blocks / spec.actors;
    out.actor_block[actor] = block;
    for (std::size_t j = 0; j < spec.attributes; ++j) {
      const bool inside = out.attribute_block[attrs[j]] == block;
      if (coin.flip(inside ? spec.p_in : spec.p_out)) raw.push_back({actor, attrs[j]});
    }
  }
  out.pairs = BipartitePairs(raw, "planted seed=" + std::to_string(spec.seed));
  return out;
}

IncidenceMatrix random_incidence(std::size_t actors, std::size_t attributes, double density,
                                 std::uint64_t seed) {
  PlantedBlocks spec;
  spec.actors = actors;
  spec.attributes = attributes;
  spec.blocks = 1;
  spec.p_in = density;
  spec.p_out = density;
  spec.seed = seed;
  return build_incidence(generate_planted(spec).pairs).matrix;
}

}  // namespace gsim
