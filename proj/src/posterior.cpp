#include "gmdom/posterior.hpp"

namespace gmdom {

PosteriorSample concatenate(std::vector<PosteriorSample> parts) {
  PosteriorSample out;
  if (parts.empty()) return out;
  out.meta = parts.front().meta;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.draws.size();
  out.draws.reserve(total);
  for (auto& p : parts) {
    for (auto& d : p.draws) out.draws.push_back(std::move(d));
  }
  return out;
}

}  // namespace gmdom
