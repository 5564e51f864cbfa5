#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmdom/gamma_mixture.hpp"

namespace gmdom {

struct PosteriorMeta {
  std::string label;
  std::uint64_t seed = 0;
  std::string config_digest;

  bool operator==(const PosteriorMeta&) const = default;
};

/// Ordered MCMC draws for one income distribution.
struct PosteriorSample {
  std::vector<MixtureDraw> draws;
  PosteriorMeta meta;

  std::size_t size() const noexcept { return draws.size(); }
  bool empty() const noexcept { return draws.empty(); }
  bool operator==(const PosteriorSample&) const = default;
};

/// Appends the draws of `parts` in order. Metadata comes from the first part.
PosteriorSample concatenate(std::vector<PosteriorSample> parts);

}  // namespace gmdom
