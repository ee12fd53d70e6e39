#pragma once

#include <vector>

#include "fairaudit/rng.hpp"
#include "fairaudit/types.hpp"

namespace bench {

inline std::vector<fairaudit::ScoredRecord> scored_records(std::size_t n,
                                                           std::uint64_t seed = 1) {
  fairaudit::Rng rng(seed);
  std::vector<fairaudit::ScoredRecord> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    fairaudit::ScoredRecord r;
    r.label = rng.bernoulli(0.01) ? 1 : 0;
    r.score = r.label == 1 ? 0.3 + 0.7 * rng.uniform() : 0.7 * rng.uniform();
    r.group = rng.bernoulli(0.5) ? fairaudit::Gender::Male : fairaudit::Gender::Female;
    r.value = 10.0 + 100.0 * rng.uniform();
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace bench
