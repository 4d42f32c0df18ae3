#pragma once

#include <json.hpp>
#include <string>

#include "garding/friedrichs.hpp"
#include "garding/garding.hpp"
#include "garding/selftest.hpp"

namespace garding {

using Json = nlohmann::ordered_json;

// Doubles print as %.17g; JSON numbers as the shortest text that reads back to the same bits.
std::string format_double(double v);

Json to_json(const GroupDescriptor& g);
GroupDescriptor group_from_json(const Json& j);
Json to_json(const DualIndex& xi);
DualIndex dual_from_json(const Json& j);
Json to_json(const SymbolClassParams& p);
SymbolClassParams params_from_json(const Json& j);

// Symbol files hold sampled values: grid metadata, then per dual a row-major
// list of [re, im] pairs for every grid node.
Json to_json(const SampledTable& t);
SampledTable sampled_table_from_json(const Json& j);
void save_symbol(const std::string& path, const Symbol& a, double grid_degree, double cutoff);
Symbol load_symbol(const std::string& path);

Json to_json(const OperatorMatrix& A, bool with_entries = true);
OperatorMatrix operator_from_json(const Json& j);

Json to_json(const SweepRow& r);
Json to_json(const NonnegativityScan& s);
Json to_json(const GardingReport& r);
Json to_json(const RemainderReport& r);
Json to_json(const PositivityVerdict& v);
Json to_json(const ManifestCheck& m);
Json to_json(const ProbeRow& r);
Json to_json(const std::vector<ExponentRow>& t);
Json to_json(const ClassFitReport& r);
Json to_json(const InclusionReport& r);
Json to_json(const CheckResult& r);

// One row per cutoff: cutoff, lambda_min, s, theta, C_estimate, verdict.
inline constexpr const char* kCsvSchema = "garding-report-v1";
std::string report_csv(const GardingReport& r);

// Temp file in the same directory, then rename.
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace garding
