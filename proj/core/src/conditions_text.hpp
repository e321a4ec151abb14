#pragma once

#include <array>

namespace clin::detail {

extern const std::array<const char*, 4> kPrintedOde;
extern const std::array<const char*, 4> kPrintedPde;

}  // namespace clin::detail
