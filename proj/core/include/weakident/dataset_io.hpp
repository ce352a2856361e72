#pragma once

#include <string>

#include "weakident/types.hpp"

namespace weakident {

// WIDENT1 on-disk datasets: a UTF-8 "key = value" header `<prefix>.widh` plus
// one raw little-endian float64 payload `<prefix>.<var>.widb` per variable,
// row-major with t slowest. Round-trips are bit-exact.

/// Writes `<prefix>.widh` and one `.widb` per variable.
void save_dataset(const ObservationSet& data, const std::string& prefix);

/// Accepts either the prefix or the `.widh` path. Throws InputError with
/// category "format" (malformed header), "size" (payload length mismatch) or
/// "values" (non-finite payload).
ObservationSet load_dataset(const std::string& path);

} // namespace weakident
