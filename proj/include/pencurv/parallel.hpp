#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace pencurv {

// Hardware concurrency, capped by PENCIL_CURVATURE_THREADS when set.
unsigned worker_count();

// Runs body(i) for i in [0, n). Results must not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// One splitmix64 step; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace pencurv
