#pragma once

#include <array>
#include <cstddef>

#include "emden/kernels.hpp"

namespace emden::kernels::detail {

struct Chunk {
  std::size_t begin;
  std::size_t end;
};

inline Chunk chunk_bounds(std::size_t n, std::size_t c) {
  return {n * c / kReductionChunks, n * (c + 1) / kReductionChunks};
}

// Sum of body(i) over [0, n) with a fixed chunk partition and an in-order
// combine; the serial and OpenMP variants produce the same bits.
template <class Body>
double chunked_sum(std::size_t n, Body const& body, bool parallel) {
  std::array<double, kReductionChunks> partial{};
  auto run = [&](std::size_t c) {
    auto const [b, e] = chunk_bounds(n, c);
    double acc = 0.0;
    for (std::size_t i = b; i < e; ++i) acc += body(i);
    partial[c] = acc;
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t c = 0; c < kReductionChunks; ++c) run(c);
  } else {
    for (std::size_t c = 0; c < kReductionChunks; ++c) run(c);
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

}  // namespace emden::kernels::detail
