#pragma once

#include <cstdint>
#include <vector>

namespace rffkim {

/// sigma_v in {-1, +1}, indexed by vertex.
using SpinConfig = std::vector<std::int8_t>;
/// omega_e in {0, 1}, indexed by edge.
using EdgeConfig = std::vector<std::uint8_t>;

}  // namespace rffkim
