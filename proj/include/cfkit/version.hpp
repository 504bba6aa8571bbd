#pragma once

namespace cfkit {

// Stamped into every dataset record. Bump on any change that can alter
// generated bytes, and record the bump in CHANGELOG notes.
inline constexpr const char* kGeneratorVersion = "cfkit-1.0.0";

// Schema of the JSONL record layout, independent of generator behavior.
inline constexpr int kSchemaVersion = 1;

}  // namespace cfkit
