#pragma once

#include <ostream>
#include <string>
#include <type_traits>

#include <json.hpp>

#include "distributions.hpp"
#include "suite.hpp"

namespace rpq {

namespace detail {

template <class Real>
nlohmann::json real_to_json(const Real& v) {
  if constexpr (std::is_same_v<Real, double>) {
    return v;
  } else {
    // wider types go through their own decimal printer so no digits are lost
    return v.str(std::numeric_limits<Real>::max_digits10);
  }
}

template <class Real>
std::string real_to_text(const Real& v) {
  if constexpr (std::is_same_v<Real, double>) {
    return format_full(v);
  } else {
    return v.str(std::numeric_limits<Real>::max_digits10);
  }
}

}  // namespace detail

// Column layout: r_1,...,r_k,probability. The defect and truncation flag ride
// along as comment lines so the numeric block stays machine readable.
template <class Real>
void write_csv(std::ostream& os, const PmfTable<Real>& table) {
  const long long k = table.spec.k;
  for (long long j = 1; j <= k; ++j) os << "r_" << j << ",";
  os << "probability\n";
  for (const auto& [idx, value] : table.entries) {
    for (long long v : idx) os << v << ",";
    os << detail::real_to_text(value) << "\n";
  }
  os << "# normalization_defect = " << detail::real_to_text(table.normalization_defect)
     << "\n";
  os << "# truncated = " << (table.truncated ? "true" : "false") << "\n";
}

template <class Real>
void write_draws_csv(std::ostream& os, long long k,
                     const std::vector<MultiIndex>& draws) {
  for (long long j = 1; j <= k; ++j) os << "r_" << j << (j < k ? "," : "\n");
  for (const auto& idx : draws) {
    for (size_t j = 0; j < idx.size(); ++j)
      os << idx[j] << (j + 1 < idx.size() ? "," : "\n");
  }
}

template <class Real>
nlohmann::json spec_meta(const DistributionSpec<Real>& d) {
  nlohmann::json meta;
  // always the caller-facing parameters: absorption kinds run on the inverted
  // algebra internally but are recorded under the base name and levels
  meta["algebra"] = d.base.name();
  if (kind_uses_absorption(d.kind)) {
    nlohmann::json ms = nlohmann::json::array();
    for (const Real& m : d.m_abs) ms.push_back(detail::real_to_json(m));
    meta["m_abs"] = ms;
  }
  meta["p"] = detail::real_to_json(d.base.p());
  meta["q"] = detail::real_to_json(d.base.q());
  nlohmann::json th = nlohmann::json::array();
  for (const Real& t : d.theta) th.push_back(detail::real_to_json(t));
  meta["theta"] = th;
  meta["n"] = d.n;
  meta["kind"] = to_string(d.kind);
  if (!std::is_same_v<Real, double>) meta["precision"] = "extended";
  return meta;
}

template <class Real>
nlohmann::json table_meta(const PmfTable<Real>& table) {
  nlohmann::json meta = spec_meta(table.spec);
  meta["normalization_defect"] = detail::real_to_json(table.normalization_defect);
  meta["truncated"] = table.truncated;
  return meta;
}

template <class Real>
nlohmann::json table_to_json(const PmfTable<Real>& table) {
  nlohmann::json j;
  j["meta"] = table_meta(table);
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [idx, value] : table.entries) {
    nlohmann::json row = nlohmann::json::array();
    row.push_back(nlohmann::json(idx));
    row.push_back(detail::real_to_json(value));
    entries.push_back(std::move(row));
  }
  j["entries"] = std::move(entries);
  return j;
}

// Rebuilds the distribution from the recorded meta block and restores the
// stored entries verbatim. Double tables round-trip bit for bit because the
// serializer emits shortest-round-trip decimals.
inline PmfTable<double> read_table_json(const nlohmann::json& j) {
  const auto& meta = j.at("meta");
  if (meta.contains("precision") && meta["precision"] != "standard")
    throw domain_error("read_table_json: only standard precision tables are readable");
  auto alg = make_preset_algebra<double>(meta.at("algebra").get<std::string>(),
                                         meta.at("p").get<double>(),
                                         meta.at("q").get<double>());
  Kind kind = kind_from_string(meta.at("kind").get<std::string>());
  std::vector<double> params;
  if (kind_uses_absorption(kind))
    params = meta.at("m_abs").get<std::vector<double>>();
  else
    params = meta.at("theta").get<std::vector<double>>();
  auto d = make_distribution(kind, alg, meta.at("n").get<long long>(), params);
  PmfTable<double> table{std::move(d),
                         {},
                         meta.at("normalization_defect").get<double>(),
                         meta.at("truncated").get<bool>(),
                         false};
  for (const auto& row : j.at("entries")) {
    table.entries.emplace_back(row.at(0).get<MultiIndex>(),
                               row.at(1).get<double>());
  }
  return table;
}

inline nlohmann::json report_to_json(const VerificationReport& r) {
  nlohmann::json j;
  j["identity"] = r.identity;
  j["preset"] = r.preset;
  j["params"] = r.params;
  j["max_abs_residual"] = r.max_abs_residual;
  j["max_rel_residual"] = r.max_rel_residual;
  j["verdict"] = to_string(r.verdict);
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

inline void write_report_lines(std::ostream& os,
                               const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports) os << report_to_json(r).dump() << "\n";
}

}  // namespace rpq
