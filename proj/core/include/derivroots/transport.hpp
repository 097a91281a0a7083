#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace derivroots {

inline constexpr std::size_t kTransportSupportCap = 5000;

// Minimum-cost transportation between supplies and demands that both sum
// to 1, solved exactly by the network simplex method on the bipartite
// graph. Weights are quantized to multiples of 2^-50 (with the rounding
// residue assigned to the largest weight) so flows are integral. `cost` is
// row-major supplies x demands. Returns the optimal cost.
double transport_cost(std::span<const double> supply, std::span<const double> demand,
                      std::span<const double> cost);

}  // namespace derivroots
