#pragma once

#include <string>

#include <json.hpp>

#include "copson/aux_weights.hpp"
#include "copson/evaluator.hpp"
#include "copson/scalar_core.hpp"
#include "copson/sharpness.hpp"

namespace copson {

using Json = nlohmann::ordered_json;

/// Compact one-line JSON. Doubles print with 17 significant digits (".0" kept
/// on integral values so they stay floats), non-finite doubles as null.
[[nodiscard]] std::string dump_json(const Json& j);

/// Header line plus one row of the object's scalar members; nested values are skipped.
[[nodiscard]] std::string flat_csv(const Json& j);

/// %.17g rendering (round-trips exactly) shared by JSON and CSV; "null" if non-finite.
[[nodiscard]] std::string format_double(double v);

[[nodiscard]] Json to_json(const TruncationReport& r);
[[nodiscard]] Json to_json(const ScalarCheck& c);
[[nodiscard]] Json to_json(double p, const C0Solution& s);
[[nodiscard]] Json to_json(const WeightCertificate& c, bool with_residuals);
[[nodiscard]] Json to_json(const MasterReport& r);
[[nodiscard]] Json to_json(const RatioScan& s);
[[nodiscard]] Json to_json(const NormEstimate& n);
[[nodiscard]] Json to_json(const SearchResult& r);
/// Full map: cells with class, plus overlay samples.
[[nodiscard]] Json to_json(const RegionMap& m);
/// Sidecar of a CSV region map: overlay samples and per-cell classes.
[[nodiscard]] Json overlay_json(const RegionMap& m);

/// CSV with header mode,p,second,cert_verdict,battery_verdict,min_margin.
[[nodiscard]] std::string region_csv(const RegionMap& m);

}  // namespace copson
