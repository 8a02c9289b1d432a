#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "mmdscan/experiments.hpp"

namespace mmdscan {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kConfigGrammarVersion = 1;

/// Flat key-value experiment configuration.
///
///   # comment
///   key = value
///
/// One pair per line; keys are unique; lists are comma-separated. Keys:
///
///   scenario            reference | loo                     (reference)
///   mode                argmax | top-s | threshold          (argmax)
///   delta               auto | <real>                       (auto)
///   majority_anomalous  true | false                        (false)
///   subsample_l         none | auto | <int>                 (none)
///   kernel              gaussian | laplace                  (gaussian)
///   sigma               <real>                              (1)
///   sweep               m | n                               (m)
///   n, s, m             <int list>                          (n = 100, s = 1)
///   trials, seed, workers
///   schedule.m_rule     log-power | constant                (sweep = n only)
///   schedule.m_coef, schedule.m_power, schedule.m_value
///   schedule.delta_rule inverse-log-power | constant
///   schedule.delta_power, schedule.delta_value
///   p.*, q.*            distributions, see below
///
/// A distribution under prefix P is P.family plus:
///   gaussian | laplace: P.mean, P.variance
///   bernoulli:          P.p0
///   mixture:            P.components = K, then P.0.* ... P.(K-1).* each with
///                       a .weight and a nested distribution
///   contaminated:       P.epsilon and P.tilde.*; the result is
///                       (1 - epsilon) p + epsilon tilde (q only)
struct KeyValues {
  std::map<std::string, std::string> values;
  std::map<std::string, std::size_t> line_of;
};

/// Throws ParseError on malformed lines or duplicate keys.
KeyValues parse_key_values(std::istream& in);

/// Throws InvalidInput (or ParseError naming the line) on unknown keys or
/// bad values.
ExperimentSpec experiment_from_config(const KeyValues& kv);

nlohmann::json to_json(const DistSpec& d);
nlohmann::json to_json(const ExperimentSpec& spec);
nlohmann::json to_json(const ErrorCurve& curve);

}  // namespace mmdscan
