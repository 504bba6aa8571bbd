#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cfkit/interp.hpp"
#include "cfkit/templates.hpp"

namespace cfkit {

// Count-and-flow summary of a function: static element counts plus the
// execution sequence observed on canonical probe inputs. Identifier names and
// concrete constants are deliberately excluded so cosmetic renames cannot
// defeat deduplication; constants still matter exactly as far as they change
// behavior on the probes.
struct StructuralFingerprint {
  enum Feature {
    kParams, kAssign, kChainedAssign, kAugAssign, kIf, kElifArm, kElseBlock,
    kWhileStmt, kForStmt, kPassStmt, kReturnStmt,
    kOpAdd, kOpSub, kOpMul, kOpFloorDiv, kOpMod, kOpPow,
    kCmpEq, kCmpNe, kCmpLt, kCmpLe, kCmpGt, kCmpGe,
    kBoolAnd, kBoolOr, kUnNeg, kUnAbs, kIntLit, kNameRef,
    kFeatureCount
  };
  std::array<int, kFeatureCount> counts{};
  // Execution trace on two fixed probe inputs, concatenated: statement tags
  // in the order they ran, so loop iterations repeat and only the branch arm
  // actually taken appears (docs/formats.md lists the alphabet). Two programs
  // share flow only when they both look and behave alike.
  std::vector<std::uint16_t> flow;
  int mass = 0;  // sum of counts; a cheap size proxy for diagnostics

  static const char* feature_name(int feature);
};

StructuralFingerprint fingerprint(const FunctionAst& f);

// Human-readable flow rendering ("a+ if( ?0 a* ) r%"), for diagnostics.
std::string flow_string(const StructuralFingerprint& fp);

// s = 0.7 * count_sim + 0.3 * flow_sim, where count_sim is the per-bucket
// overlap ratio of the count vectors (sum of min over sum of max) and
// flow_sim the normalized longest-common-subsequence ratio of flow tags.
// Symmetric, s(a,a) = 1.
double similarity(const StructuralFingerprint& a, const StructuralFingerprint& b);

struct ProblemCandidate {
  FunctionAst ast;
  std::string source;
  std::vector<LatentDomain> domains;  // parameter order
  LogicFamily family;
  std::string template_id;
  std::uint64_t seed;  // per-attempt seed that reproduces this candidate
};

// Greedy in-order filter: keep a candidate iff its similarity to every
// previously kept one is strictly below the threshold.
std::vector<ProblemCandidate> dedup(std::vector<ProblemCandidate> candidates,
                                    double threshold = 0.8);

struct GenConfig {
  Split split = Split::Eval;
  Value x_min = 1;
  Value x_max = 25;
  int verification_points = 16;
  double dedup_threshold = 0.8;
  bool dedup_enabled = true;  // the training pipeline switches this off
  int retry_factor = 50;      // attempt budget = retry_factor * n
  EvalLimits limits{};
};

struct VerifyResult {
  bool pass;
  std::string diagnostics;  // failing error and inputs when !pass
};

// Executes the candidate on `verification_points` uniformly drawn
// (x, latents) tuples; any evaluation error fails the candidate.
VerifyResult verify_candidate(const ProblemCandidate& c, SplitMix64& rng,
                              const GenConfig& config = {});

struct GenStats {
  std::uint64_t attempts = 0;
  std::uint64_t instantiation_rejections = 0;  // unparseable or off-family fills
  std::uint64_t verify_failures = 0;
  std::uint64_t dedup_rejections = 0;
};

// Streaming core shared by generate_batch and the dataset pipeline: draws
// verified candidates under a per-attempt seed schedule; duplicate tracking
// is explicit so callers can defer acceptance until downstream stages pass.
class CandidateSource {
 public:
  CandidateSource(LogicFamily family, std::uint64_t seed, std::uint64_t attempt_budget,
                  const GenConfig& config);

  // Next verified (pre-dedup) candidate, or nullopt once the budget is spent.
  std::optional<ProblemCandidate> next();

  bool is_duplicate(const ProblemCandidate& c);
  void accept(const ProblemCandidate& c);

  const GenStats& stats() const { return stats_; }
  GenStats& stats() { return stats_; }

 private:
  LogicFamily family_;
  std::uint64_t seed_;
  std::uint64_t budget_;
  GenConfig config_;
  const std::vector<MetaTemplate>* templates_;
  std::vector<StructuralFingerprint> kept_;
  GenStats stats_;
};

// Exactly n candidates that pass verification and survive dedup, in a
// deterministic order for fixed (family, n, seed, config).
// Throws GenerationExhausted when the retry budget runs out.
std::vector<ProblemCandidate> generate_batch(LogicFamily family, int n, std::uint64_t seed,
                                             const GenConfig& config = {},
                                             GenStats* stats = nullptr);

}  // namespace cfkit
