#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

namespace relhyp {

inline constexpr const char* kReportFormatVersion = "relhyp-report/1";

// Insertion-ordered, so key order is fixed by the code that builds the report.
using Json = nlohmann::ordered_json;

// SHA-1 of "blob <size>\0" followed by the content, as git hashes a file.
std::string git_blob_sha1(std::string_view content);

// Finite values as numbers; infinities and NaN as the strings "inf", "-inf", "nan".
Json json_number(double x);

// Two-space indentation and a trailing newline.
std::string dump_report(const Json& report);

}  // namespace relhyp
