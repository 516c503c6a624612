#pragma once

#include "gpdr/sim.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace gpdr {

// The six hand-designed rules, plus three evolved closed forms kept as
// analysis fixtures (named for the clinic they were evolved on).
enum class RuleName {
  IBFI,       // individual blocks, fixed interval: A_i = i·M
  TwoBeg,     // two at the beginning, then fixed interval
  MBFI,       // pairs at every other slot
  Offset,     // fixed interval plus a piecewise offset in V
  Dome,       // three-piece rise/plateau/fall offset
  Rule7,      // two at the beginning plus a growing V term
  EvolvedC9,
  EvolvedC10,
  EvolvedC14,
};

// Piecewise cut points default to k = ceil(P/2), k1 = ceil(P/3), k2 = ceil(2P/3).
struct RuleParams {
  std::optional<int> offset_k;
  std::optional<int> dome_k1;
  std::optional<int> dome_k2;
};

std::span<const RuleName> manual_rules();  // the six named rules
std::string_view rule_name(RuleName rule);
std::optional<RuleName> rule_from_name(std::string_view name);

std::vector<double> rule_schedule(RuleName rule, const ClinicConfig& clinic,
                                  const RuleParams& params = {});

struct DomeProfile {
  std::vector<double> intervals;  // A_{i+1} - A_i
  bool is_dome = false;           // single-peaked, ignoring trailing clamp zeros
};

DomeProfile dome_profile(const std::vector<double>& schedule);

}  // namespace gpdr
