// SPDX-License-Identifier: MIT
#include "dpl/report.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace dpl {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

namespace {

void append_string_array(std::ostringstream& os, const std::vector<std::string>& values) {
    os << "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os << ",";
        os << "\"" << json_escape(values[i]) << "\"";
    }
    os << "]";
}

}  // namespace

std::string to_json(const CheckReport& r) {
    std::ostringstream os;
    os << "{";
    os << "\"check\":\"" << json_escape(r.check) << "\",";
    os << "\"depth\":" << r.depth << ",";
    os << "\"dim\":" << r.dim << ",";
    os << "\"empirical_constant\":" << format_double(r.empirical_constant) << ",";
    os << "\"params\":{";
    bool first = true;
    for (const auto& [k, v] : r.params) {
        if (!first) os << ",";
        first = false;
        os << "\"" << json_escape(k) << "\":\"" << json_escape(v) << "\"";
    }
    os << "},";
    os << "\"pass\":" << (r.pass ? "true" : "false") << ",";
    os << "\"variant\":\"" << json_escape(r.variant) << "\",";
    os << "\"violations\":";
    append_string_array(os, r.violations);
    os << ",";
    os << "\"worst_region\":\"" << json_escape(r.worst_region) << "\"";
    os << "}";
    return os.str();
}

std::string to_json(const CharacteristicReport& r) {
    std::ostringstream os;
    os << "{";
    os << "\"argmax\":\"" << json_escape(r.argmax) << "\",";
    os << "\"p\":" << format_double(r.p) << ",";
    os << "\"value\":" << format_double(r.value) << ",";
    os << "\"violations\":";
    append_string_array(os, r.violations);
    os << "}";
    return os.str();
}

std::string emit_report(const CheckReport& report, const std::string& format) {
    if (format == "json") return to_json(report);
    throw std::invalid_argument("emit_report: unsupported format '" + format + "'");
}

std::string emit_report(const CharacteristicReport& report, const std::string& format) {
    if (format == "json") return to_json(report);
    throw std::invalid_argument("emit_report: unsupported format '" + format + "'");
}

}  // namespace dpl
