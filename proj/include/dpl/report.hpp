// SPDX-License-Identifier: MIT
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace dpl {

// Outcome of an inequality / property check: the empirical constant is the
// maximum LHS/RHS ratio seen over all tested regions, `pass` compares it
// against the configured cap (default: no cap).
struct CheckReport {
    std::string check;
    std::string variant;
    int dim = 0;
    int depth = 0;
    double empirical_constant = 0.0;
    std::string worst_region;
    std::vector<std::string> violations;
    std::map<std::string, std::string> params;
    bool pass = true;

    // Per-region detail, in canonical sweep order. Kept in memory only;
    // the JSON serialization carries the schema fields above.
    std::vector<std::pair<std::string, double>> ratios;
};

// Result of a weight-characteristic supremum ([w]_{A_p^d}, [w]_{A_2^R}).
struct CharacteristicReport {
    double value = 1.0;
    std::string argmax;
    double p = 2.0;
    std::vector<std::string> violations;
};

// Fixed 17-significant-digit decimal rendering; round-trips doubles exactly.
std::string format_double(double v);

// Byte-stable JSON (keys sorted, LF line endings, format_double numbers).
std::string to_json(const CheckReport& report);
std::string to_json(const CharacteristicReport& report);

// Format dispatcher for report serialization; only "json" applies to
// structured reports (tables are CSV). Throws on unsupported formats.
std::string emit_report(const CheckReport& report, const std::string& format);
std::string emit_report(const CharacteristicReport& report, const std::string& format);

std::string json_escape(const std::string& s);

}  // namespace dpl
