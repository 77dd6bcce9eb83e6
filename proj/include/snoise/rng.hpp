#pragma once

#include <array>
#include <cstdint>

namespace snoise {

// Stream tags partition the random numbers drawn for one path so that adding a
// consumer (say, Brownian increments) never shifts the draws of another.
enum class StreamTag : std::uint32_t {
  Arrivals = 1,   // candidate arrival times for thinning
  Acceptance = 2, // thinning accept/reject coins
  Marks = 3,      // mark draws
  Brownian = 4,   // Gaussian increments of the stock model
  Hawkes = 5,     // Ogata thinning for the self-exciting intensity
  States = 6,     // auxiliary draws (random states, test batteries)
};

// Philox4x32-10 counter-based generator. A stream is keyed by the run seed and
// addressed by (path_index, tag); the block counter walks within the stream.
// Results depend only on (seed, path_index, tag, draw number), never on how
// paths are scheduled across threads.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t path_index, StreamTag tag);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1).
  double uniform();
  double exponential(double rate);
  double normal();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

}  // namespace snoise
