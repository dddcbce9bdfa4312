#pragma once

#include <string>

#include "harqlink/chain.hpp"
#include "harqlink/config.hpp"
#include "harqlink/effcap.hpp"
#include "harqlink/sim.hpp"

namespace harqlink {

// JSON fragments for the structured reports. All builders use ordered maps
// so serialized documents are stable byte for byte.
ordered_json tool_json();
ordered_json derived_json(const SystemParams& sp, const ScenarioProfile& pr);
ordered_json chain_json(const HarqChain& ch, const SystemParams& sp);
ordered_json effcap_json(const EffCapResult& r);
ordered_json sim_report_json(const SimReport& rep);

// Fixed-format value for CSV cells (12 significant digits, '.' decimal).
std::string csv_number(double v);

// Serializes a report document (trailing newline included).
std::string dump_report(const ordered_json& doc);

// Writes content to path, or to stdout when path is empty.
void write_output(const std::string& path, const std::string& content);

// Inserts "_tag" before the extension: out("r.csv", "m4") -> "r_m4.csv".
std::string tagged_path(const std::string& path, const std::string& tag);

}  // namespace harqlink
