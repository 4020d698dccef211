#pragma once

namespace splitlab {

inline constexpr const char* kVersion = "0.1.0";

// Identifies the counter-based generator so manifests can pin
// bit-reproducibility to a concrete keyed function.
inline constexpr const char* kGeneratorId = "philox2x64-10";

} // namespace splitlab
