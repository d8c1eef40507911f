#pragma once

#include <array>
#include <cstdint>

namespace ambit::rng {

/// Philox4x32-10 block function. Counter-based: the stream for (seed, id) is
/// the sequence of blocks at counters 0,1,2,..., so disjoint ids give
/// statistically independent streams that can be sampled in any order and
/// from any worker.
std::array<std::uint32_t, 4> philox4x32(std::uint64_t key_lo,
                                        std::uint64_t key_hi,
                                        std::uint64_t ctr_lo,
                                        std::uint64_t ctr_hi);

/// Derives an independent 64-bit seed for a child object (path, worker)
/// from a root seed; used to split Monte Carlo replications across workers
/// without coupling results to the worker count.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

/// One logical random stream identified by (seed, stream id). Draws consume
/// a deterministic number of counter blocks regardless of thread placement.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_(stream_id) {}

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on (0,1): never returns 0 or 1, so logs and inverses are safe.
  double uniform();
  /// Uniform on (a,b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  /// Standard normal via Box-Muller (pairs cached).
  double normal();
  /// Poisson count by Knuth multiplication; mean must be modest (the
  /// simulator budgets total expected counts before sampling).
  std::uint64_t poisson(double mean);
  /// Exponential with the given rate.
  double exponential(double rate);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int avail_ = 0;
  bool have_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace ambit::rng
