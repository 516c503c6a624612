#include "gpdr/rules.hpp"

#include <cmath>
#include <stdexcept>

namespace gpdr {

std::span<const RuleName> manual_rules() {
  static const RuleName rules[] = {RuleName::IBFI, RuleName::TwoBeg,  RuleName::MBFI,
                                   RuleName::Offset, RuleName::Dome, RuleName::Rule7};
  return rules;
}

std::string_view rule_name(RuleName rule) {
  switch (rule) {
    case RuleName::IBFI: return "IBFI";
    case RuleName::TwoBeg: return "2BEG";
    case RuleName::MBFI: return "MBFI";
    case RuleName::Offset: return "OFFSET";
    case RuleName::Dome: return "DOME";
    case RuleName::Rule7: return "RULE7";
    case RuleName::EvolvedC9: return "EVOLVED_C9";
    case RuleName::EvolvedC10: return "EVOLVED_C10";
    case RuleName::EvolvedC14: return "EVOLVED_C14";
  }
  return "";
}

std::optional<RuleName> rule_from_name(std::string_view name) {
  for (RuleName r : {RuleName::IBFI, RuleName::TwoBeg, RuleName::MBFI, RuleName::Offset,
                     RuleName::Dome, RuleName::Rule7, RuleName::EvolvedC9, RuleName::EvolvedC10,
                     RuleName::EvolvedC14})
    if (rule_name(r) == name) return r;
  return std::nullopt;
}

std::vector<double> rule_schedule(RuleName rule, const ClinicConfig& c, const RuleParams& params) {
  const int P = c.P;
  const double M = c.M, V = c.V;
  const int k = params.offset_k.value_or(static_cast<int>(std::ceil(P / 2.0)));
  const int k1 = params.dome_k1.value_or(static_cast<int>(std::ceil(P / 3.0)));
  const int k2 = params.dome_k2.value_or(static_cast<int>(std::ceil(2.0 * P / 3.0)));

  std::vector<double> raw(P);
  for (int i = 0; i < P; ++i) {
    switch (rule) {
      case RuleName::IBFI:
        raw[i] = i * M;
        break;
      case RuleName::TwoBeg:
        raw[i] = i <= 1 ? 0.0 : (i - 1) * M;
        break;
      case RuleName::MBFI:
        raw[i] = i % 2 == 0 ? i * M : (i - 1) * M;
        break;
      case RuleName::Offset:
        raw[i] = i * M + (i <= k ? 0.15 : 0.3) * (i - k) * V;
        break;
      case RuleName::Dome:
        if (i <= k1)
          raw[i] = i * M + 0.15 * (i - k1) * V;
        else if (i <= k2)
          raw[i] = i * M + 0.3 * (i - k1) * V;
        else
          raw[i] = i * M - 0.05 * (i - k2) * V;
        break;
      case RuleName::Rule7:
        raw[i] = i <= 1 ? 0.0 : (i - 1) * M + 0.3 * (i - 1) * V;
        break;
      case RuleName::EvolvedC9:
        raw[i] = (i - c.CR) * M + (std::min(0.2 * c.CR * i * i, 0.8) - 0.2) * M;
        break;
      case RuleName::EvolvedC10:
        raw[i] = (i - 0.31003) * M +
                 0.18 * std::min(c.PW * (i - c.PW - 1.0) / (V / M), 1.0) * i * V;
        break;
      case RuleName::EvolvedC14:
        raw[i] = i * M + 0.43479 * std::min((0.43479 * i - 2.0) * std::sqrt(double(i)),
                                            static_cast<double>(i)) * V;
        break;
    }
  }
  return clamp_schedule(std::move(raw), c.L);
}

DomeProfile dome_profile(const std::vector<double>& schedule) {
  constexpr double eps = 1e-9;
  DomeProfile p;
  for (std::size_t i = 0; i + 1 < schedule.size(); ++i)
    p.intervals.push_back(schedule[i + 1] - schedule[i]);

  // the feasibility clamp flattens out-of-session tail slots; ignore them
  std::size_t n = p.intervals.size();
  while (n > 0 && std::abs(p.intervals[n - 1]) <= eps) --n;

  p.is_dome = true;
  bool rising = true;
  for (std::size_t i = 1; i < n; ++i) {
    if (rising) {
      if (p.intervals[i] < p.intervals[i - 1] - eps) rising = false;
    } else if (p.intervals[i] > p.intervals[i - 1] + eps) {
      p.is_dome = false;
      break;
    }
  }
  return p;
}

}  // namespace gpdr
