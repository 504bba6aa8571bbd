#include "cfkit/gsm.hpp"

#include <sstream>

#include "cfkit/embedded_data.hpp"
#include "cfkit/version.hpp"
#include "json.hpp"

namespace cfkit {

namespace {

struct Lexicon {
  std::string tag;
  std::vector<std::string> opening;
  std::string item, items;          // "catering tray(s)"
  std::string per_item_noun;        // "service fee"
  std::string flat_noun;            // "setup charge"
  std::string fee_noun;             // "delivery fee" (the visible one)
  std::string extra_item, extra_items;
};

const std::vector<Lexicon>& lexicons() {
  static const std::vector<Lexicon> all = [] {
    auto doc = nlohmann::json::parse(data::embedded_file("gsm/scenarios.json"));
    if (doc.at("schema_version").get<int>() != kSchemaVersion) {
      throw SchemaVersionMismatch("gsm scenario lexicon");
    }
    std::vector<Lexicon> out;
    for (const auto& s : doc.at("scenarios")) {
      Lexicon lex;
      lex.tag = s.at("tag").get<std::string>();
      for (const auto& o : s.at("opening")) lex.opening.push_back(o.get<std::string>());
      lex.item = s.at("item").get<std::string>();
      lex.items = s.at("items").get<std::string>();
      lex.per_item_noun = s.at("per_item_noun").get<std::string>();
      lex.flat_noun = s.at("flat_noun").get<std::string>();
      lex.fee_noun = s.at("fee_noun").get<std::string>();
      lex.extra_item = s.at("extra_item").get<std::string>();
      lex.extra_items = s.at("extra_items").get<std::string>();
      if (lex.opening.empty()) throw ConfigError("scenario " + lex.tag + ": no opening");
      out.push_back(std::move(lex));
    }
    if (out.empty()) throw ConfigError("gsm scenario lexicon is empty");
    return out;
  }();
  return all;
}

const Lexicon& lexicon_for(const std::string& tag) {
  for (const auto& lex : lexicons()) {
    if (lex.tag == tag) return lex;
  }
  throw ConfigError("unknown gsm scenario '" + tag + "'");
}

}  // namespace

const char* hidden_kind_name(HiddenKind k) {
  switch (k) {
    case HiddenKind::FlatAddOn: return "flat_add_on";
    case HiddenKind::PerItemAddOn: return "per_item_add_on";
    case HiddenKind::UnknownQtyKnownPrice: return "unknown_qty_known_price";
  }
  return "?";
}

const char* attachment_name(Attachment a) {
  return a == Attachment::PreDiscount ? "pre_discount" : "post_discount";
}

HiddenDomain hidden_domain(const GsmGraph& g) {
  bool pre = g.attachment == Attachment::PreDiscount;
  switch (g.hidden_kind) {
    // Pre-discount money stays at whole dollars so the discount is exact in
    // cents; post-discount money moves in quarter steps.
    case HiddenKind::FlatAddOn: return pre ? HiddenDomain{100, 2000, 100} : HiddenDomain{25, 2000, 25};
    case HiddenKind::PerItemAddOn: return pre ? HiddenDomain{100, 500, 100} : HiddenDomain{25, 500, 25};
    case HiddenKind::UnknownQtyKnownPrice: return {1, 9, 1};
  }
  return {0, 0, 1};
}

long long round_half_up(long long q, long long d) {
  return (2 * q + d) / (2 * d);
}

Cents execute(const GsmGraph& g, const GsmOverrides& overrides) {
  long long qty = overrides.qty.value_or(g.qty);
  long long hidden = overrides.hidden.value_or(g.hidden_value);
  if (qty < 0) throw NegativeQuantity("item count " + std::to_string(qty));
  if (hidden < 0) throw NegativeQuantity("hidden value " + std::to_string(hidden));

  Cents items = qty * g.unit_price;
  if (g.hidden_kind == HiddenKind::UnknownQtyKnownPrice) items += hidden * g.extra_price;

  Cents pre = items;
  if (g.attachment == Attachment::PreDiscount) {
    if (g.hidden_kind == HiddenKind::FlatAddOn) pre += hidden;
    if (g.hidden_kind == HiddenKind::PerItemAddOn) pre += qty * hidden;
  }

  Cents discounted = round_half_up(pre * (100 - g.discount_pct), 100);

  Cents total = discounted + g.visible_fee;
  if (g.attachment == Attachment::PostDiscount) {
    if (g.hidden_kind == HiddenKind::FlatAddOn) total += hidden;
    if (g.hidden_kind == HiddenKind::PerItemAddOn) total += qty * hidden;
  }
  return total;
}

bool check_sensitivity(const GsmGraph& g) {
  HiddenDomain dom = hidden_domain(g);
  Cents base = execute(g, {g.qty_cf, std::nullopt});
  long long h = g.hidden_value;
  int checked = 0;
  for (long long perturbed : {h - dom.step, h + dom.step, 2 * h}) {
    if (perturbed < dom.lo || perturbed > dom.hi || perturbed == h) continue;  // vacuous
    ++checked;
    if (execute(g, {g.qty_cf, perturbed}) == base) return false;
  }
  return checked >= 1;
}

bool abduction_audit(const GsmGraph& g) {
  Cents factual = execute(g);
  Cents answer = execute(g, {g.qty_cf, std::nullopt});
  HiddenDomain dom = hidden_domain(g);
  for (long long h = dom.lo; h <= dom.hi; h += dom.step) {
    if (execute(g, {std::nullopt, h}) != factual) continue;
    if (execute(g, {g.qty_cf, h}) != answer) return false;
  }
  return true;  // g.hidden_value itself always reproduces the factual total
}

int gsm_consistent_count(const GsmGraph& g) {
  Cents factual = execute(g);
  HiddenDomain dom = hidden_domain(g);
  int count = 0;
  for (long long h = dom.lo; h <= dom.hi; h += dom.step) {
    if (execute(g, {std::nullopt, h}) == factual) ++count;
  }
  return count;
}

std::string format_money(Cents cents) {
  std::ostringstream out;
  out << "$" << cents / 100;
  if (cents % 100 != 0) {
    out << "." << (cents % 100 < 10 ? "0" : "") << cents % 100;
  }
  return out.str();
}

std::string verbalize(const GsmGraph& g, Mode mode, const std::vector<int>& variants) {
  if (variants.size() != 7) throw ConfigError("verbalize: expected 7 variant indices");
  const Lexicon& lex = lexicon_for(g.scenario);
  bool interv = mode == Mode::Interventional;
  std::ostringstream out;

  out << lex.opening[variants[0] % lex.opening.size()];

  if (variants[1] % 2 == 0) {
    out << " Every " << lex.item << " is priced at " << format_money(g.unit_price) << ".";
  } else {
    out << " Each " << lex.item << " costs " << format_money(g.unit_price) << ".";
  }

  std::string amt = format_money(g.hidden_value);
  switch (g.hidden_kind) {
    case HiddenKind::PerItemAddOn:
      if (variants[2] % 2 == 0) {
        out << " There is also a per-" << lex.item << " " << lex.per_item_noun;
        if (interv) out << " of " << amt;
        out << ".";
      } else {
        out << " Each " << lex.item << " additionally carries a " << lex.per_item_noun;
        if (interv) out << " of " << amt;
        out << ".";
      }
      break;
    case HiddenKind::FlatAddOn:
      if (variants[2] % 2 == 0) {
        out << " There is also a one-time " << lex.flat_noun;
        if (interv) out << " of " << amt;
        out << ".";
      } else {
        out << " A one-time " << lex.flat_noun;
        if (interv) out << " of " << amt;
        out << " also applies.";
      }
      break;
    case HiddenKind::UnknownQtyKnownPrice:
      if (variants[2] % 2 == 0) {
        out << " The order also includes ";
        if (interv) {
          out << g.hidden_value;
        } else {
          out << "some";
        }
        out << " extra " << lex.extra_items << " at " << format_money(g.extra_price) << " each.";
      } else {
        if (interv) {
          out << " " << g.hidden_value;
        } else {
          out << " Some";
        }
        out << " extra " << lex.extra_items << " at " << format_money(g.extra_price)
            << " apiece are part of the order as well.";
      }
      break;
  }

  if (g.visible_fee > 0) {
    if (variants[3] % 2 == 0) {
      out << " A " << lex.fee_noun << " of " << format_money(g.visible_fee)
          << " is added after the discount.";
    } else {
      out << " After the discount, a " << lex.fee_noun << " of " << format_money(g.visible_fee)
          << " is added.";
    }
  }

  bool pre = g.attachment == Attachment::PreDiscount &&
             g.hidden_kind != HiddenKind::UnknownQtyKnownPrice;
  std::string included;
  if (pre) {
    included = g.hidden_kind == HiddenKind::FlatAddOn
                   ? "the " + lex.flat_noun
                   : "the per-" + lex.item + " " + lex.per_item_noun;
  }
  if (variants[4] % 2 == 0) {
    out << " A discount of " << g.discount_pct << "% is applied to ";
    out << (pre ? "the subtotal including " + included
                : std::string("the items subtotal (before any fees)"));
    out << ".";
  } else {
    out << " " << (pre ? "The subtotal including " + included
                       : std::string("The items subtotal (before any fees)"));
    out << " receives a " << g.discount_pct << "% discount.";
  }

  Cents factual = execute(g);
  if (variants[5] % 2 == 0) {
    out << " For " << g.qty << " " << lex.items << ", the total shown is "
        << format_money(factual) << ".";
  } else {
    out << " With " << g.qty << " " << lex.items << " ordered, the register shows "
        << format_money(factual) << ".";
  }

  if (variants[6] % 2 == 0) {
    out << " If instead " << g.qty_cf << " " << lex.items
        << " were ordered, with all else unchanged, what amount would be shown?";
  } else {
    out << " Had " << g.qty_cf << " " << lex.items
        << " been ordered instead, with all else unchanged, what amount would be shown?";
  }

  return out.str();
}

std::string verbalize(const GsmGraph& g, Mode mode, SplitMix64& rng) {
  std::vector<int> variants(7);
  for (int& v : variants) v = static_cast<int>(rng.bounded(2));
  return verbalize(g, mode, variants);
}

GsmGraph build_scenario(const GsmConfig& config, SplitMix64& rng) {
  GsmGraph g{};
  if (config.paper_fixture) {
    g.scenario = "office_lunch";
    g.qty = 6;
    g.unit_price = 6800;
    g.discount_pct = 14;
    g.visible_fee = 0;
    g.hidden_kind = HiddenKind::PerItemAddOn;
    g.attachment = Attachment::PostDiscount;
    g.hidden_value = 50;
    g.extra_price = 0;
    g.qty_cf = 11;
    return g;
  }

  const auto& all = lexicons();
  g.scenario = all[rng.bounded(all.size())].tag;
  g.qty = rng.range(config.qty_min, config.qty_max);
  do {
    g.qty_cf = rng.range(config.qty_cf_min, config.qty_cf_max);
  } while (g.qty_cf == g.qty);
  g.unit_price = 100 * rng.range(config.price_min / 100, config.price_max / 100);
  g.discount_pct = static_cast<int>(rng.range(config.discount_min, config.discount_max));

  switch (rng.bounded(3)) {
    case 0:
      g.hidden_kind = HiddenKind::FlatAddOn;
      g.attachment = rng.chance(1, 2) ? Attachment::PreDiscount : Attachment::PostDiscount;
      break;
    case 1:
      g.hidden_kind = HiddenKind::PerItemAddOn;
      g.attachment = rng.chance(1, 2) ? Attachment::PreDiscount : Attachment::PostDiscount;
      break;
    default:
      g.hidden_kind = HiddenKind::UnknownQtyKnownPrice;
      g.attachment = Attachment::PreDiscount;
      g.extra_price = 100 * rng.range(config.extra_price_min / 100, config.extra_price_max / 100);
      break;
  }
  HiddenDomain dom = hidden_domain(g);
  g.hidden_value = dom.step * rng.range(dom.lo / dom.step, dom.hi / dom.step);

  if (rng.chance(config.visible_fee_num, config.visible_fee_den)) {
    g.visible_fee = 25 * rng.range(config.visible_fee_min / 25, config.visible_fee_max / 25);
  }
  return g;
}

GsmProblem gsm_problem(const GsmConfig& config, SplitMix64& rng) {
  for (int attempt = 0; attempt < config.retries; ++attempt) {
    GsmGraph g = build_scenario(config, rng);
    if (!check_sensitivity(g) || !abduction_audit(g)) continue;

    GsmProblem p;
    p.graph = g;
    p.factual_total = execute(g);
    p.answer = execute(g, {g.qty_cf, std::nullopt});
    std::vector<int> variants(7, 0);
    if (!config.paper_fixture) {
      for (int& v : variants) v = static_cast<int>(rng.bounded(2));
    }
    p.text_cf = verbalize(g, Mode::Counterfactual, variants);
    p.text_interv = verbalize(g, Mode::Interventional, variants);
    p.seed = 0;
    return p;
  }
  throw AssemblyExhausted("gsm: no graph passed the audits after " +
                          std::to_string(config.retries) + " builds");
}

}  // namespace cfkit
