#pragma once

#include <string>

#include "jsvqa/algorithms.hpp"

namespace jsvqa {

// FNV-1a 64-bit over raw bytes, hex-encoded. Stable across platforms.
std::string fingerprint_bytes(const std::string& bytes);
std::string fingerprint_file(const std::string& path);  // throws InstanceError

// Versioned CSV: '#'-prefixed header with the config snapshot and instance
// fingerprint, the fixed column row, one line per IterationRecord, and a
// trailing '# terminal_theta=' line. Cells for non-applicable fields are
// empty. Wall times are omitted unless requested, keeping the default output
// byte-reproducible.
std::string trace_to_csv(const Trace& trace, bool include_wall_times = false);
void write_trace_csv(const Trace& trace, const std::string& path,
                     bool include_wall_times = false);

// Round-trip parser for the schema above.
Trace trace_from_csv(const std::string& text);
Trace read_trace_csv(const std::string& path);

}  // namespace jsvqa
