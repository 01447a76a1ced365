#include "oddchern/ensemble.hpp"

#include <atomic>
#include <mutex>
#include <thread>

namespace oddchern {

namespace {
std::atomic<int> g_default_threads{0};
}

void set_default_thread_count(int n) { g_default_threads.store(n); }

int default_thread_count() {
  const int configured = g_default_threads.load();
  if (configured > 0) return configured;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

void parallel_for(long n, const std::function<void(long)>& fn, int thread_count) {
  if (n <= 0) return;
  int workers = thread_count > 0 ? thread_count : default_thread_count();
  workers = static_cast<int>(std::min<long>(workers, n));
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const long i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

EnsembleDraw draw_ensemble(const HoppingModel& model, int L, int count,
                           std::uint64_t master_seed, const EnsembleOptions& opts,
                           std::uint64_t index_offset) {
  EnsembleDraw out;
  if (count <= 0) return out;

  struct Slot {
    bool attempted = false;
    bool accepted = false;
    std::optional<LatticeRealization> realization;
    std::optional<FlatBand> fb;
  };

  const long cap = static_cast<long>(opts.max_attempts_factor) * count + 8;
  std::vector<Slot> slots(cap);

  const auto attempt = [&](long i) {
    Slot& slot = slots[i];
    slot.attempted = true;
    LatticeRealization sample = realize(model, L, master_seed, index_offset + i);
    try {
      FlatBand fb = spectral_flatband(sample, opts.gap_tol);
      slot.fb = std::move(fb);
      slot.realization = std::move(sample);
      slot.accepted = true;
    } catch (const GaplessSample&) {
      slot.accepted = false;
    }
  };

  // First batch in parallel, then serial extension until enough samples are
  // accepted. The accepted set is the first `count` accepted indices in index
  // order, independent of scheduling.
  parallel_for(std::min<long>(count, cap), attempt);
  long accepted = 0;
  for (long i = 0; i < std::min<long>(count, cap); ++i)
    if (slots[i].accepted) ++accepted;
  long frontier = std::min<long>(count, cap);
  while (accepted < count && frontier < cap) {
    attempt(frontier);
    if (slots[frontier].accepted) ++accepted;
    ++frontier;
  }

  long taken = 0;
  for (long i = 0; i < frontier && taken < count; ++i) {
    if (!slots[i].attempted) continue;
    if (slots[i].accepted) {
      EnsembleSample s;
      s.realization_index = index_offset + i;
      s.sample_key = slots[i].realization->sample_key;
      s.gap = slots[i].fb->gap;
      s.flat_band = std::move(*slots[i].fb);
      out.samples.push_back(std::move(s));
      out.realizations.push_back(std::move(*slots[i].realization));
      ++taken;
    } else {
      ++out.rejected;
    }
  }
  return out;
}

}  // namespace oddchern
