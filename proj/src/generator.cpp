#include "cfkit/generator.hpp"

#include <algorithm>
#include <sstream>

#include "cfkit/parser.hpp"

namespace cfkit {

namespace {

// Per-probe trace length cap. Two probes per fingerprint keeps the LCS cost
// in is_duplicate bounded at roughly (2*cap)^2 per close pair.
constexpr std::size_t kProbeTagCap = 96;

struct Collector {
  StructuralFingerprint& fp;

  void bump(int feature) { ++fp.counts[feature]; }

  void expr(const Expr& e) {
    using F = StructuralFingerprint;
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            bump(F::kIntLit);
          } else if constexpr (std::is_same_v<T, Name>) {
            bump(F::kNameRef);
          } else if constexpr (std::is_same_v<T, Unary>) {
            bump(n.op == UnOp::Neg ? F::kUnNeg : F::kUnAbs);
            expr(*n.operand);
          } else if constexpr (std::is_same_v<T, Binary>) {
            switch (n.op) {
              case BinOp::Add: bump(F::kOpAdd); break;
              case BinOp::Sub: bump(F::kOpSub); break;
              case BinOp::Mul: bump(F::kOpMul); break;
              case BinOp::FloorDiv: bump(F::kOpFloorDiv); break;
              case BinOp::Mod: bump(F::kOpMod); break;
              case BinOp::Pow: bump(F::kOpPow); break;
            }
            expr(*n.lhs);
            expr(*n.rhs);
          } else if constexpr (std::is_same_v<T, Compare>) {
            switch (n.op) {
              case CmpOp::Eq: bump(F::kCmpEq); break;
              case CmpOp::Ne: bump(F::kCmpNe); break;
              case CmpOp::Lt: bump(F::kCmpLt); break;
              case CmpOp::Le: bump(F::kCmpLe); break;
              case CmpOp::Gt: bump(F::kCmpGt); break;
              case CmpOp::Ge: bump(F::kCmpGe); break;
            }
            expr(*n.lhs);
            expr(*n.rhs);
          } else if constexpr (std::is_same_v<T, Bool>) {
            bump(n.op == BoolOp::And ? F::kBoolAnd : F::kBoolOr);
            expr(*n.lhs);
            expr(*n.rhs);
          }
        },
        e.node);
  }

  void block(const Block& b) {
    using F = StructuralFingerprint;
    for (const auto& sp : b) {
      std::visit(
          [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Assign>) {
              bump(F::kAssign);
              if (s.targets.size() > 1) bump(F::kChainedAssign);
              // Targets are structure, not data references, so they do not
              // count as name refs; reads inside the value do.
              expr(*s.value);
            } else if constexpr (std::is_same_v<T, AugAssign>) {
              bump(F::kAugAssign);
              switch (s.op) {
                case BinOp::Add: bump(F::kOpAdd); break;
                case BinOp::Sub: bump(F::kOpSub); break;
                case BinOp::Mul: bump(F::kOpMul); break;
                case BinOp::FloorDiv: bump(F::kOpFloorDiv); break;
                case BinOp::Mod: bump(F::kOpMod); break;
                case BinOp::Pow: bump(F::kOpPow); break;
              }
              expr(*s.value);
            } else if constexpr (std::is_same_v<T, If>) {
              bump(F::kIf);
              for (std::size_t i = 0; i < s.arms.size(); ++i) {
                if (i > 0) bump(F::kElifArm);
                expr(*s.arms[i].cond);
                block(s.arms[i].body);
              }
              if (!s.orelse.empty()) {
                bump(F::kElseBlock);
                block(s.orelse);
              }
            } else if constexpr (std::is_same_v<T, While>) {
              bump(F::kWhileStmt);
              expr(*s.cond);
              block(s.body);
            } else if constexpr (std::is_same_v<T, ForRange>) {
              bump(F::kForStmt);
              expr(*s.count);
              block(s.body);
            } else if constexpr (std::is_same_v<T, Pass>) {
              bump(F::kPassStmt);
            } else if constexpr (std::is_same_v<T, Return>) {
              bump(F::kReturnStmt);
              expr(*s.value);
            }
          },
          sp->node);
    }
  }
};

// Longest common subsequence length; O(la*lb) with a rolling row.
std::size_t lcs_length(const std::vector<std::uint16_t>& a, const std::vector<std::uint16_t>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double count_similarity(const StructuralFingerprint& a, const StructuralFingerprint& b) {
  // Per-bucket overlap ratio (weighted Jaccard). Comparing each element type
  // separately means a disparity in, say, multiplications registers even when
  // the two programs have the same number of statements overall; an aggregate
  // difference-over-mass score would let the shared assignment and name-ref
  // bulk wash that signal out.
  long shared = 0, total = 0;
  for (int i = 0; i < StructuralFingerprint::kFeatureCount; ++i) {
    shared += std::min(a.counts[i], b.counts[i]);
    total += std::max(a.counts[i], b.counts[i]);
  }
  return total == 0 ? 1.0 : static_cast<double>(shared) / static_cast<double>(total);
}

// Exact similarity, but bail out before the (comparatively pricey) LCS when
// even a perfect flow match could not reach the threshold.
bool at_least(const StructuralFingerprint& a, const StructuralFingerprint& b, double threshold) {
  double cs = count_similarity(a, b);
  std::size_t la = a.flow.size(), lb = b.flow.size();
  double fs_max = (la + lb) == 0 ? 1.0
                                 : 2.0 * static_cast<double>(std::min(la, lb)) /
                                       static_cast<double>(la + lb);
  if (0.7 * cs + 0.3 * fs_max < threshold) return false;
  double fs = (la + lb) == 0 ? 1.0
                             : 2.0 * static_cast<double>(lcs_length(a.flow, b.flow)) /
                                   static_cast<double>(la + lb);
  return 0.7 * cs + 0.3 * fs >= threshold;
}

}  // namespace

const char* StructuralFingerprint::feature_name(int feature) {
  static const char* names[kFeatureCount] = {
      "params",  "assign",    "chained_assign", "aug_assign", "if",      "elif_arm",
      "else",    "while",     "for",            "pass",       "return",  "op_add",
      "op_sub",  "op_mul",    "op_floordiv",    "op_mod",     "op_pow",  "cmp_eq",
      "cmp_ne",  "cmp_lt",    "cmp_le",         "cmp_gt",     "cmp_ge",  "bool_and",
      "bool_or", "unary_neg", "abs",            "int_lit",    "name_ref"};
  return feature >= 0 && feature < kFeatureCount ? names[feature] : "?";
}

StructuralFingerprint fingerprint(const FunctionAst& f) {
  StructuralFingerprint fp;
  fp.counts[StructuralFingerprint::kParams] = static_cast<int>(f.params.size());
  Collector{fp}.block(f.body);
  fp.mass = 0;
  for (int c : fp.counts) fp.mass += c;

  // Behavioral component: execution traces on two fixed probe points, so
  // branch selection and loop lengths count toward distinctness. Probe values
  // are part of the fingerprint definition, not drawn from any domain, which
  // keeps fingerprints a pure function of the AST. A small fuel budget is
  // enough: the tag cap stops runaway loops long before fuel matters.
  static constexpr struct {
    Value x, fill;
  } kProbes[] = {{4, 2}, {9, 3}};
  EvalLimits probe_limits;
  probe_limits.fuel = 4096;
  std::vector<Value> args(f.params.size());
  for (const auto& probe : kProbes) {
    args[0] = probe.x;
    for (std::size_t i = 1; i < args.size(); ++i) args[i] = probe.fill;
    std::vector<std::uint16_t> t = execution_trace(f, args, probe_limits, kProbeTagCap);
    fp.flow.insert(fp.flow.end(), t.begin(), t.end());
  }
  return fp;
}

std::string flow_string(const StructuralFingerprint& fp) {
  std::ostringstream out;
  bool first = true;
  for (std::uint16_t t : fp.flow) {
    if (!first) out << ' ';
    first = false;
    char detail = static_cast<char>(t & 0xFF);
    switch (t >> 8) {
      case kFlowAssign: out << 'a' << detail; break;
      case kFlowChained: out << 'C' << detail; break;
      case kFlowAug: out << 'g' << detail; break;
      case kFlowReturn: out << 'r' << detail; break;
      case kFlowIfOpen: out << "if("; break;
      case kFlowArmTaken: out << '?' << int(static_cast<unsigned char>(detail)); break;
      case kFlowElseTaken: out << '!'; break;
      case kFlowIfClose: out << ')'; break;
      case kFlowWhileOpen: out << "w("; break;
      case kFlowWhileClose: out << ')'; break;
      case kFlowForOpen: out << "f("; break;
      case kFlowForClose: out << ')'; break;
      case kFlowPass: out << 'p'; break;
      case kFlowEvalError: out << '#'; break;
      case kFlowTraceCap: out << '~'; break;
      default: out << '?'; break;
    }
  }
  return out.str();
}

double similarity(const StructuralFingerprint& a, const StructuralFingerprint& b) {
  double cs = count_similarity(a, b);
  std::size_t la = a.flow.size(), lb = b.flow.size();
  double fs = (la + lb) == 0 ? 1.0
                             : 2.0 * static_cast<double>(lcs_length(a.flow, b.flow)) /
                                   static_cast<double>(la + lb);
  return 0.7 * cs + 0.3 * fs;
}

std::vector<ProblemCandidate> dedup(std::vector<ProblemCandidate> candidates, double threshold) {
  std::vector<ProblemCandidate> kept;
  std::vector<StructuralFingerprint> fps;
  kept.reserve(candidates.size());
  for (auto& c : candidates) {
    StructuralFingerprint fp = fingerprint(c.ast);
    bool dup = false;
    for (const auto& k : fps) {
      if (at_least(fp, k, threshold)) {
        dup = true;
        break;
      }
    }
    if (!dup) {
      fps.push_back(std::move(fp));
      kept.push_back(std::move(c));
    }
  }
  return kept;
}

VerifyResult verify_candidate(const ProblemCandidate& c, SplitMix64& rng,
                              const GenConfig& config) {
  std::vector<Value> args(1 + c.domains.size());
  for (int point = 0; point < config.verification_points; ++point) {
    args[0] = rng.range(config.x_min, config.x_max);
    for (std::size_t i = 0; i < c.domains.size(); ++i) {
      args[1 + i] = rng.range(c.domains[i].min_r, c.domains[i].max_r);
    }
    try {
      evaluate_params(c.ast, args, config.limits);
    } catch (const EvalError& e) {
      std::ostringstream msg;
      msg << e.what() << " at " << c.ast.params[0] << "=" << args[0];
      for (std::size_t i = 0; i < c.domains.size(); ++i) {
        msg << ", " << c.domains[i].name << "=" << args[1 + i];
      }
      return {false, msg.str()};
    }
  }
  return {true, ""};
}

CandidateSource::CandidateSource(LogicFamily family, std::uint64_t seed,
                                 std::uint64_t attempt_budget, const GenConfig& config)
    : family_(family),
      seed_(seed),
      budget_(attempt_budget),
      config_(config),
      templates_(&builtin_templates(family, config.split)) {}

std::optional<ProblemCandidate> CandidateSource::next() {
  while (stats_.attempts < budget_) {
    std::uint64_t attempt = stats_.attempts++;
    std::uint64_t cseed = record_seed(seed_, attempt);
    SplitMix64 rng(cseed);
    const MetaTemplate& tmpl = (*templates_)[rng.bounded(templates_->size())];
    Instantiation inst;
    try {
      inst = instantiate(tmpl, rng);
    } catch (const InstantiationError&) {
      ++stats_.instantiation_rejections;
      continue;
    }
    ProblemCandidate c{parse_function(inst.source), std::move(inst.source),
                       std::move(inst.domains), family_, tmpl.template_id, cseed};
    SplitMix64 vrng(salted_seed(cseed, "verify"));
    if (!verify_candidate(c, vrng, config_).pass) {
      ++stats_.verify_failures;
      continue;
    }
    return c;
  }
  return std::nullopt;
}

bool CandidateSource::is_duplicate(const ProblemCandidate& c) {
  if (!config_.dedup_enabled) return false;
  StructuralFingerprint fp = fingerprint(c.ast);
  for (const auto& k : kept_) {
    if (at_least(fp, k, config_.dedup_threshold)) return true;
  }
  return false;
}

void CandidateSource::accept(const ProblemCandidate& c) {
  if (config_.dedup_enabled) kept_.push_back(fingerprint(c.ast));
}

std::vector<ProblemCandidate> generate_batch(LogicFamily family, int n, std::uint64_t seed,
                                             const GenConfig& config, GenStats* stats) {
  if (n <= 0) throw ConfigError("generate_batch: n must be positive");
  std::uint64_t budget = static_cast<std::uint64_t>(config.retry_factor) * n;
  CandidateSource source(family, seed, budget, config);
  std::vector<ProblemCandidate> out;
  out.reserve(n);
  while (out.size() < static_cast<std::size_t>(n)) {
    auto c = source.next();
    if (!c) {
      if (stats) *stats = source.stats();  // the caller still wants the tallies
      std::ostringstream msg;
      msg << family_name(family) << ": produced " << out.size() << "/" << n << " candidates in "
          << budget << " attempts (" << source.stats().instantiation_rejections
          << " bad instantiations, " << source.stats().verify_failures << " verify failures, "
          << source.stats().dedup_rejections << " dedup rejections)";
      throw GenerationExhausted(msg.str());
    }
    if (source.is_duplicate(*c)) {
      ++source.stats().dedup_rejections;
      continue;
    }
    source.accept(*c);
    out.push_back(std::move(*c));
  }
  if (stats) *stats = source.stats();
  return out;
}

}  // namespace cfkit
