#pragma once

#include <string_view>

namespace cfkit {

// Question regime: counterfactual keeps the latents hidden behind an observed
// run; interventional states them outright.
enum class Mode { Counterfactual, Interventional };

constexpr std::string_view mode_name(Mode m) {
  return m == Mode::Counterfactual ? "counterfactual" : "interventional";
}

}  // namespace cfkit
