#pragma once

namespace scnplus {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace scnplus
