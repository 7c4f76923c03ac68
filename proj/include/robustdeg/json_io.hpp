#pragma once

#include <json.hpp>

#include <cmath>
#include <string>

#include "robustdeg/certificates.hpp"
#include "robustdeg/concentration.hpp"
#include "robustdeg/estimators.hpp"

namespace robustdeg {

namespace detail {

/// Non-finite values become null.
inline nlohmann::json number_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

}  // namespace detail

inline nlohmann::json to_json(const GoodnessReport& r) {
  return {
      {"gamma", detail::number_or_null(r.gamma)},
      {"p1_bound", detail::number_or_null(r.p1_bound)},
      {"spectral_norm", detail::number_or_null(r.spectral_norm)},
      {"w_norm_bound", detail::number_or_null(r.w_norm_bound)},
      {"p2_bound", detail::number_or_null(r.p2_bound)},
      {"combined_sq_bound", detail::number_or_null(r.combined_sq_bound)},
      {"delta_threshold", detail::number_or_null(r.delta_threshold)},
      {"satisfied", r.satisfied},
  };
}

/// satisfied, slack and rounds are null for estimators that do not produce them.
inline nlohmann::json to_json(const EstimateResult& r) {
  nlohmann::json j = {
      {"estimator", r.estimator},
      {"d_hat", detail::number_or_null(r.d_hat)},
      {"pruned_count", r.pruned.size()},
      {"satisfied", nullptr},
      {"slack", nullptr},
      {"rounds", nullptr},
  };
  if (r.certificate) j["satisfied"] = r.certificate->satisfied;
  else if (r.estimator == "brute") j["satisfied"] = true;
  if (auto it = r.diagnostics.find("slack"); it != r.diagnostics.end())
    j["slack"] = detail::number_or_null(it->second);
  if (auto it = r.diagnostics.find("rounds"); it != r.diagnostics.end())
    j["rounds"] = static_cast<std::int64_t>(it->second);
  nlohmann::json diag = nlohmann::json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = detail::number_or_null(v);
  j["diagnostics"] = std::move(diag);
  if (r.certificate) j["certificate"] = to_json(*r.certificate);
  return j;
}

inline nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : r.params) params[k] = detail::number_or_null(v);
  return {
      {"lemma_id", r.lemma_id},
      {"trials", r.trials},
      {"violations", r.violations},
      {"empirical_max_ratio", detail::number_or_null(r.empirical_max_ratio)},
      {"params", std::move(params)},
  };
}

}  // namespace robustdeg
