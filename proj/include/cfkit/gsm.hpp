#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cfkit/interp.hpp"
#include "cfkit/mode.hpp"
#include "cfkit/rng.hpp"

namespace cfkit {

// Money is integer cents throughout; doubles never touch a total.
using Cents = std::int64_t;

// The one latent node of a shopping-trip graph.
enum class HiddenKind {
  FlatAddOn,             // one-time charge of hidden amount
  PerItemAddOn,          // hidden per-item fee
  UnknownQtyKnownPrice,  // hidden count of extra items at a known price
};

// Where an add-on enters relative to the discount. UnknownQtyKnownPrice is
// always part of the items subtotal, so effectively pre-discount.
enum class Attachment { PreDiscount, PostDiscount };

const char* hidden_kind_name(HiddenKind k);
const char* attachment_name(Attachment a);

struct GsmGraph {
  std::string scenario;  // tag into the scenario lexicon
  long long qty;
  Cents unit_price;      // whole dollars, in cents
  int discount_pct;      // whole percent, applied to the pre-discount subtotal
  Cents visible_fee;     // 0 = absent; always added after the discount
  HiddenKind hidden_kind;
  Attachment attachment;
  long long hidden_value;  // cents for add-ons, a count for the unknown-qty kind
  Cents extra_price;       // unit price of the hidden extra items (whole dollars)
  long long qty_cf;        // the quantity the question switches to
};

// Hidden-node search range used by generation, the sensitivity check, and the
// abduction audit; `step` is the granularity the value is drawn at.
struct HiddenDomain {
  long long lo;
  long long hi;
  long long step;
};
HiddenDomain hidden_domain(const GsmGraph& g);

struct GsmOverrides {
  std::optional<long long> qty;
  std::optional<long long> hidden;
};

// q/d rounded half-up; q >= 0, d > 0.
long long round_half_up(long long q, long long d);

// Total in cents under the graph with optional node overrides.
// Throws NegativeQuantity when a count override is negative.
Cents execute(const GsmGraph& g, const GsmOverrides& overrides = {});

// True when every in-range perturbation of the hidden value (one step down,
// one step up, doubled) changes the counterfactual total.
bool check_sensitivity(const GsmGraph& g);

// Enumerates the hidden domain: every value reproducing the factual total
// must yield the same counterfactual total. False means the stated answer
// would not be forced by the observation.
bool abduction_audit(const GsmGraph& g);

// Number of hidden values in the domain that reproduce the factual total
// (>= 1, since the graph's own value always does).
int gsm_consistent_count(const GsmGraph& g);

// Natural-language rendering. Counterfactual mode conceals the hidden value;
// interventional mode states it. Identical rng states give sentence-aligned
// texts across modes.
std::string verbalize(const GsmGraph& g, Mode mode, SplitMix64& rng);

// Deterministic variant: one phrasing index per sentence slot, in order
// opening, price, hidden, fee, discount, factual, question. All-zero indices
// select the reference phrasings.
std::string verbalize(const GsmGraph& g, Mode mode, const std::vector<int>& variants);

struct GsmConfig {
  long long qty_min = 2, qty_max = 12;
  long long qty_cf_min = 2, qty_cf_max = 18;
  Cents price_min = 500, price_max = 9000;        // whole dollars
  int discount_min = 5, discount_max = 25;
  Cents extra_price_min = 200, extra_price_max = 1500;
  int visible_fee_num = 1, visible_fee_den = 3;   // probability a visible fee appears
  Cents visible_fee_min = 100, visible_fee_max = 1500;  // 25-cent steps
  int retries = 40;
  bool paper_fixture = false;  // freeze the reference office-lunch instance
};

struct GsmProblem {
  std::string id;  // assigned by the dataset pipeline
  GsmGraph graph;
  Cents factual_total;
  Cents answer;  // unique by the abduction audit
  std::string text_cf;
  std::string text_interv;
  std::uint64_t seed;
};

GsmGraph build_scenario(const GsmConfig& config, SplitMix64& rng);

// Builds a graph that passes the sensitivity check and abduction audit,
// executes it, and verbalizes both modes. Throws AssemblyExhausted after
// config.retries failed builds.
GsmProblem gsm_problem(const GsmConfig& config, SplitMix64& rng);

// "$68" for whole dollars, "$0.50" / "$353.88" otherwise.
std::string format_money(Cents cents);

}  // namespace cfkit
