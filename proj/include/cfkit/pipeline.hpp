#pragma once

#include <cstdint>
#include <vector>

#include "cfkit/store.hpp"

namespace cfkit {

struct PipelineStats {
  std::uint64_t attempts = 0;
  std::uint64_t instantiation_rejections = 0;
  std::uint64_t verify_failures = 0;
  std::uint64_t dedup_rejections = 0;
  std::uint64_t assembly_failures = 0;
  std::uint64_t records = 0;
};

// Full generation pipeline: templates -> candidates -> oracle (or the gsm
// graph builder) -> prompt-bearing records, in deterministic id order.
// A fixed config yields byte-identical output on every run.
// Throws GenerationExhausted / AssemblyExhausted when budgets run out and
// ConfigError on invalid configs.
std::vector<DatasetRecord> run_generate(const RunConfig& config, PipelineStats* stats = nullptr);

}  // namespace cfkit
