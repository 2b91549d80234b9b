#pragma once

namespace mixer {

inline constexpr const char* kVersion = "1.0.0";

// Bumped whenever a CSV column set changes; pinned by tests so downstream
// parsers can rely on it.
inline constexpr const char* kCsvSchema = "mixer-csv-v1";

}  // namespace mixer
