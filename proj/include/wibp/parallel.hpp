#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace wibp {

/// Worker count used by the chunked loops below. Results never depend on it:
/// work is split into fixed chunks whose partial results are combined in
/// chunk order.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls fn(chunk) for every chunk in [0, chunks). If any call throws, the
/// exception of the lowest-numbered failing chunk is rethrown.
void parallel_for_chunks(std::size_t chunks, const std::function<void(std::size_t)>& fn);

template <class T, class F>
std::vector<T> map_chunks(std::size_t chunks, F&& fn) {
  std::vector<T> out(chunks);
  parallel_for_chunks(chunks, [&](std::size_t c) { out[c] = fn(c); });
  return out;
}

/// Generator for chunk `chunk` of a stream identified by `seed`.
std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t chunk);

inline constexpr std::size_t kChunkSize = 4096;

inline std::size_t chunk_count(std::size_t total, std::size_t chunk = kChunkSize) {
  return (total + chunk - 1) / chunk;
}

}  // namespace wibp
