#include <string>
#include <vector>

#include "cfkit/gsm.hpp"
#include "doctest.h"

using namespace cfkit;

namespace {

// qty=3 at $10, 10% discount, $2 visible fee, hidden $5 flat / $1 per item.
GsmGraph base_graph(HiddenKind kind, Attachment att, long long hidden) {
  GsmGraph g{};
  g.scenario = "office_lunch";
  g.qty = 3;
  g.unit_price = 1000;
  g.discount_pct = 10;
  g.visible_fee = 200;
  g.hidden_kind = kind;
  g.attachment = att;
  g.hidden_value = hidden;
  g.extra_price = 400;
  g.qty_cf = 5;
  return g;
}

GsmGraph reference_fixture() {
  GsmConfig config;
  config.paper_fixture = true;
  SplitMix64 rng(0);
  return build_scenario(config, rng);
}

}  // namespace

TEST_CASE("round_half_up rounds .5 away from zero at the cent boundary") {
  CHECK(round_half_up(0, 100) == 0);
  CHECK(round_half_up(49, 100) == 0);
  CHECK(round_half_up(50, 100) == 1);
  CHECK(round_half_up(149, 100) == 1);
  CHECK(round_half_up(150, 100) == 2);
  CHECK(round_half_up(5, 2) == 3);
  CHECK(round_half_up(7, 2) == 4);
  CHECK(round_half_up(3518850, 10000) == 352);  // a real discount product
  CHECK(round_half_up(86, 100) == 1);
  CHECK(round_half_up(344, 100) == 3);
}

TEST_CASE("execute handles every hidden kind and attachment by hand-checked totals") {
  // items 3000, flat 500 pre: (3500 * 90) / 100 = 3150, + fee 200.
  CHECK(execute(base_graph(HiddenKind::FlatAddOn, Attachment::PreDiscount, 500)) == 3350);
  // discount first: 2700, then fee and the flat charge.
  CHECK(execute(base_graph(HiddenKind::FlatAddOn, Attachment::PostDiscount, 500)) == 3400);
  // per item $1 x 3 inside the discount: (3300 * 90) / 100 = 2970, + 200.
  CHECK(execute(base_graph(HiddenKind::PerItemAddOn, Attachment::PreDiscount, 100)) == 3170);
  // outside: 2700 + 200 + 300.
  CHECK(execute(base_graph(HiddenKind::PerItemAddOn, Attachment::PostDiscount, 100)) == 3200);
  // two hidden utensil packs at $4 join the items subtotal: 3800 -> 3420 + 200.
  CHECK(execute(base_graph(HiddenKind::UnknownQtyKnownPrice, Attachment::PreDiscount, 2)) == 3620);

  // Overrides replace exactly the named node.
  auto g = base_graph(HiddenKind::PerItemAddOn, Attachment::PostDiscount, 100);
  CHECK(execute(g, {5, std::nullopt}) == 4500 + 200 + 500);  // (5000*90)/100 + fee + 5*100
  CHECK(execute(g, {std::nullopt, 200}) == 2700 + 200 + 600);
  CHECK_THROWS_AS(execute(g, {-1, std::nullopt}), NegativeQuantity);
  CHECK_THROWS_AS(execute(g, {std::nullopt, -50}), NegativeQuantity);
}

TEST_CASE("reference fixture reproduces the published totals") {
  GsmGraph g = reference_fixture();
  CHECK(g.qty == 6);
  CHECK(g.unit_price == 6800);
  CHECK(g.qty_cf == 11);
  CHECK(execute(g) == 35388);
  CHECK(execute(g, {g.qty_cf, std::nullopt}) == 64878);
  CHECK(check_sensitivity(g));
  CHECK(abduction_audit(g));
  CHECK(gsm_consistent_count(g) == 1);
}

TEST_CASE("reference verbalization is byte-stable and conceals only in counterfactual mode") {
  GsmGraph g = reference_fixture();
  std::vector<int> zeros(7, 0);
  std::string cf = verbalize(g, Mode::Counterfactual, zeros);
  std::string iv = verbalize(g, Mode::Interventional, zeros);

  CHECK(cf ==
        "Ravi is organizing an office lunch. Every catering tray is priced at $68. "
        "There is also a per-catering tray service fee. A discount of 14% is applied to "
        "the items subtotal (before any fees). For 6 catering trays, the total shown is "
        "$353.88. If instead 11 catering trays were ordered, with all else unchanged, "
        "what amount would be shown?");
  CHECK(iv ==
        "Ravi is organizing an office lunch. Every catering tray is priced at $68. "
        "There is also a per-catering tray service fee of $0.50. A discount of 14% is "
        "applied to the items subtotal (before any fees). For 6 catering trays, the "
        "total shown is $353.88. If instead 11 catering trays were ordered, with all "
        "else unchanged, what amount would be shown?");

  // The two modes differ only by the inserted amount.
  CHECK(cf.find("$0.50") == std::string::npos);
  CHECK(iv.find("service fee of $0.50") != std::string::npos);
}

TEST_CASE("verbalize covers the hidden kinds, fee sentence, and variant count") {
  std::vector<int> zeros(7, 0);
  CHECK_THROWS_AS(verbalize(reference_fixture(), Mode::Counterfactual, {0, 0, 0}), ConfigError);

  auto unknown = base_graph(HiddenKind::UnknownQtyKnownPrice, Attachment::PreDiscount, 2);
  std::string cf = verbalize(unknown, Mode::Counterfactual, zeros);
  std::string iv = verbalize(unknown, Mode::Interventional, zeros);
  CHECK(cf.find("some extra utensil packs at $4 each") != std::string::npos);
  CHECK(iv.find("includes 2 extra utensil packs at $4 each") != std::string::npos);
  CHECK(cf.find("A delivery fee of $2 is added after the discount.") != std::string::npos);

  auto flat = base_graph(HiddenKind::FlatAddOn, Attachment::PreDiscount, 500);
  flat.visible_fee = 0;
  std::string flat_cf = verbalize(flat, Mode::Counterfactual, zeros);
  CHECK(flat_cf.find("one-time setup charge") != std::string::npos);
  CHECK(flat_cf.find("delivery fee") == std::string::npos);
  // Pre-discount add-ons are named inside the discount sentence.
  CHECK(flat_cf.find("A discount of 10% is applied to the subtotal including the setup charge.") !=
        std::string::npos);
  std::string flat_iv = verbalize(flat, Mode::Interventional, zeros);
  CHECK(flat_iv.find("setup charge of $5.") != std::string::npos);

  // Alternate phrasings are distinct but keep the same facts.
  std::vector<int> ones(7, 1);
  std::string alt = verbalize(reference_fixture(), Mode::Counterfactual, ones);
  CHECK(alt != verbalize(reference_fixture(), Mode::Counterfactual, zeros));
  CHECK(alt.find("$353.88") != std::string::npos);
  CHECK(alt.find("11 catering trays") != std::string::npos);

  GsmGraph bogus = reference_fixture();
  bogus.scenario = "no_such_place";
  CHECK_THROWS_AS(verbalize(bogus, Mode::Counterfactual, zeros), ConfigError);
}

TEST_CASE("sensitivity check fails exactly when the hidden node cannot move the answer") {
  // A hidden count of free items changes nothing; every probe reproduces the
  // counterfactual total.
  auto dead = base_graph(HiddenKind::UnknownQtyKnownPrice, Attachment::PreDiscount, 3);
  dead.extra_price = 0;
  CHECK_FALSE(check_sensitivity(dead));
  CHECK(gsm_consistent_count(dead) == 9);  // whole domain reproduces the factual

  for (auto kind : {HiddenKind::FlatAddOn, HiddenKind::PerItemAddOn}) {
    for (auto att : {Attachment::PreDiscount, Attachment::PostDiscount}) {
      auto g = base_graph(kind, att, kind == HiddenKind::FlatAddOn ? 500 : 100);
      CAPTURE(hidden_kind_name(kind));
      CAPTURE(attachment_name(att));
      CHECK(check_sensitivity(g));
      // Whole-dollar (pre) and quarter (post) grids shift the total by at
      // least one cent per step, so the observation pins the hidden value.
      CHECK(gsm_consistent_count(g) == 1);
      CHECK(abduction_audit(g));
    }
  }
}

TEST_CASE("randomized scenario graphs stay inside the configured ranges") {
  GsmConfig config;
  SplitMix64 rng(77);
  for (int i = 0; i < 200; ++i) {
    GsmGraph g = build_scenario(config, rng);
    CHECK(g.qty >= config.qty_min);
    CHECK(g.qty <= config.qty_max);
    CHECK(g.qty_cf >= config.qty_cf_min);
    CHECK(g.qty_cf <= config.qty_cf_max);
    CHECK(g.qty_cf != g.qty);
    CHECK(g.unit_price % 100 == 0);
    CHECK(g.unit_price >= config.price_min);
    CHECK(g.unit_price <= config.price_max);
    CHECK(g.discount_pct >= config.discount_min);
    CHECK(g.discount_pct <= config.discount_max);
    HiddenDomain dom = hidden_domain(g);
    CHECK(g.hidden_value >= dom.lo);
    CHECK(g.hidden_value <= dom.hi);
    CHECK(g.hidden_value % dom.step == 0);
    if (g.hidden_kind == HiddenKind::UnknownQtyKnownPrice) {
      CHECK(g.attachment == Attachment::PreDiscount);
      CHECK(g.extra_price >= config.extra_price_min);
      CHECK(g.extra_price <= config.extra_price_max);
    }
    if (g.visible_fee != 0) {
      CHECK(g.visible_fee % 25 == 0);
      CHECK(g.visible_fee >= config.visible_fee_min);
      CHECK(g.visible_fee <= config.visible_fee_max);
    }
  }
}

TEST_CASE("gsm_problem emits audited problems deterministically") {
  GsmConfig config;
  SplitMix64 rng(2024);
  SplitMix64 rng2(2024);
  for (int i = 0; i < 25; ++i) {
    GsmProblem p = gsm_problem(config, rng);
    CHECK(check_sensitivity(p.graph));
    CHECK(abduction_audit(p.graph));
    CHECK(p.factual_total == execute(p.graph));
    CHECK(p.answer == execute(p.graph, {p.graph.qty_cf, std::nullopt}));
    CHECK(p.answer != 0);
    CHECK(p.text_cf != p.text_interv);
    CHECK(p.text_cf.find(format_money(p.factual_total)) != std::string::npos);
    CHECK(p.text_interv.find(format_money(p.factual_total)) != std::string::npos);

    GsmProblem q = gsm_problem(config, rng2);
    CHECK(q.graph.scenario == p.graph.scenario);
    CHECK(q.factual_total == p.factual_total);
    CHECK(q.answer == p.answer);
    CHECK(q.text_cf == p.text_cf);
    CHECK(q.text_interv == p.text_interv);
  }

  GsmConfig fixture;
  fixture.paper_fixture = true;
  SplitMix64 frozen(1);
  GsmProblem p = gsm_problem(fixture, frozen);
  CHECK(p.factual_total == 35388);
  CHECK(p.answer == 64878);
  CHECK(p.text_cf.find("what amount would be shown?") != std::string::npos);
}

TEST_CASE("format_money prints whole dollars bare and cents zero-padded") {
  CHECK(format_money(6800) == "$68");
  CHECK(format_money(50) == "$0.50");
  CHECK(format_money(35388) == "$353.88");
  CHECK(format_money(5) == "$0.05");
  CHECK(format_money(730) == "$7.30");
  CHECK(format_money(0) == "$0");
  CHECK(format_money(100000) == "$1000");
}
