#pragma once

// Flat key/value records and their CSV, newline-delimited JSON and human
// renderings. Machine formats carry 12 significant digits, human output 6.

#include "invseq/confidence_limits.hpp"
#include "invseq/coverage.hpp"

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace invseq {

using FieldValue = std::variant<std::monostate, double, std::uint64_t, std::string, bool>;

struct OutputRecord {
    std::vector<std::pair<std::string, FieldValue>> fields;

    void add(std::string key, FieldValue value) { fields.emplace_back(std::move(key), std::move(value)); }
};

enum class OutputFormat { Csv, Json, Human };

OutputFormat parse_format(std::string_view name);

inline constexpr int kMachineDigits = 12;
inline constexpr int kHumanDigits = 6;

/// %.<digits>g; non-finite values render as "nan"/"inf".
std::string format_double(double x, int digits);

OutputRecord to_record(const ConfidenceInterval& ci);
OutputRecord to_record(const CoverageCell& cell);
/// One record per checked side ("left", "right", "binomial-right").
std::vector<OutputRecord> to_records(const TailCheckRow& row);

/// Writes records sharing one schema. CSV emits a header line first; JSON
/// emits one object per line; human emits an aligned table.
void write_records(std::ostream& out, const std::vector<OutputRecord>& records, OutputFormat format);

} // namespace invseq
