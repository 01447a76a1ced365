#pragma once

#include "oddchern/flatband.hpp"
#include "oddchern/invariants.hpp"
#include "oddchern/models.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace oddchern {

// Runs fn(0..n-1), possibly on a small thread pool. Each call writes only its own
// slot, so results do not depend on scheduling. thread_count 0 picks the hardware
// concurrency; set_default_thread_count overrides it process-wide (0 = auto).
void parallel_for(long n, const std::function<void(long)>& fn, int thread_count = 0);
void set_default_thread_count(int n);
int default_thread_count();

// One accepted ensemble member.
struct EnsembleSample {
  std::uint64_t realization_index = 0;
  std::uint64_t sample_key = 0;
  double gap = 0.0;
  FlatBand flat_band;
};

struct EnsembleOptions {
  double gap_tol = 1e-8;
  int max_attempts_factor = 3;  // stop after factor * count + 8 attempts
};

// Draws flat bands for `count` realizations of the model, skipping gapless samples
// (counted in rejected). Realization indices start at index_offset and the accepted
// set never depends on thread count.
struct EnsembleDraw {
  std::vector<EnsembleSample> samples;
  std::vector<LatticeRealization> realizations;  // aligned with samples
  long rejected = 0;
};

EnsembleDraw draw_ensemble(const HoppingModel& model, int L, int count,
                           std::uint64_t master_seed, const EnsembleOptions& opts = {},
                           std::uint64_t index_offset = 0);

}  // namespace oddchern
