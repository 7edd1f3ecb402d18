#include "invseq/report_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <stdexcept>

namespace invseq {

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::string render(const FieldValue& v, int digits) {
    return std::visit(
        [digits](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return "";
            } else if constexpr (std::is_same_v<T, double>) {
                return format_double(x, digits);
            } else if constexpr (std::is_same_v<T, std::uint64_t>) {
                return std::to_string(x);
            } else if constexpr (std::is_same_v<T, bool>) {
                return x ? "true" : "false";
            } else {
                return x;
            }
        },
        v);
}

nlohmann::ordered_json to_json(const FieldValue& v) {
    return std::visit(
        [](const auto& x) -> nlohmann::ordered_json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return nullptr;
            } else if constexpr (std::is_same_v<T, double>) {
                if (!std::isfinite(x)) return nullptr;
                // Same rounding as the CSV text, so both formats carry identical values.
                return std::strtod(format_double(x, kMachineDigits).c_str(), nullptr);
            } else {
                return x;
            }
        },
        v);
}

void write_csv(std::ostream& out, const std::vector<OutputRecord>& records) {
    const auto& head = records.front().fields;
    for (std::size_t i = 0; i < head.size(); ++i) out << (i ? "," : "") << head[i].first;
    out << '\n';
    for (const auto& r : records) {
        for (std::size_t i = 0; i < r.fields.size(); ++i) {
            out << (i ? "," : "") << csv_escape(render(r.fields[i].second, kMachineDigits));
        }
        out << '\n';
    }
}

void write_json(std::ostream& out, const std::vector<OutputRecord>& records) {
    for (const auto& r : records) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (const auto& [key, value] : r.fields) obj[key] = to_json(value);
        out << obj.dump() << '\n';
    }
}

void write_human(std::ostream& out, const std::vector<OutputRecord>& records) {
    const auto& head = records.front().fields;
    std::vector<std::vector<std::string>> table;
    std::vector<std::string> header;
    for (const auto& f : head) header.push_back(f.first);
    table.push_back(header);
    for (const auto& r : records) {
        std::vector<std::string> row;
        for (const auto& f : r.fields) {
            auto cell = render(f.second, kHumanDigits);
            row.push_back(cell.empty() ? "-" : cell);
        }
        table.push_back(std::move(row));
    }
    std::vector<std::size_t> widths(header.size(), 0);
    for (const auto& row : table) {
        for (std::size_t i = 0; i < row.size() && i < widths.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
    }
    for (const auto& row : table) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) line += "  ";
            line += row[i];
            if (i + 1 < row.size()) line.append(widths[i] - row[i].size(), ' ');
        }
        out << line << '\n';
    }
}

void add_optional(OutputRecord& rec, std::string key, const std::optional<double>& v) {
    rec.add(std::move(key), v ? FieldValue{*v} : FieldValue{});
}

} // namespace

OutputFormat parse_format(std::string_view name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    if (name == "human") return OutputFormat::Human;
    throw std::invalid_argument("unknown format '" + std::string(name) + "' (expected csv, json or human)");
}

std::string format_double(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
    return buf;
}

OutputRecord to_record(const ConfidenceInterval& ci) {
    OutputRecord rec;
    rec.add("method", std::string(to_string(ci.method)));
    rec.add("n", ci.inputs.n);
    rec.add("gamma", ci.inputs.gamma);
    rec.add("delta", ci.inputs.delta);
    rec.add("lower", ci.lower);
    rec.add("upper", ci.upper);
    rec.add("width", ci.width());
    add_optional(rec, "residual", ci.max_residual());
    if (const auto it = ci.total_iterations()) {
        rec.add("iterations", static_cast<std::uint64_t>(*it));
    } else {
        rec.add("iterations", std::monostate{});
    }
    return rec;
}

OutputRecord to_record(const CoverageCell& cell) {
    OutputRecord rec;
    rec.add("method", std::string(to_string(cell.method)));
    rec.add("gamma", cell.gamma);
    rec.add("delta", cell.delta);
    rec.add("dist", cell.dist);
    rec.add("trials", cell.trials);
    rec.add("seed", cell.seed);
    rec.add("coverage", cell.coverage);
    rec.add("coverage_stderr", cell.coverage_stderr);
    rec.add("mean_n", cell.mean_n);
    rec.add("mean_n_stderr", cell.mean_n_stderr);
    rec.add("pass", cell.pass);
    rec.add("mu", cell.mu);
    rec.add("violations", cell.violations);
    rec.add("margin", cell.margin);
    rec.add("clamped", cell.clamped);
    return rec;
}

std::vector<OutputRecord> to_records(const TailCheckRow& row) {
    std::vector<OutputRecord> out;
    auto side_record = [&](std::string_view name, const TailSide& side) {
        OutputRecord rec;
        rec.add("dist", row.dist);
        rec.add("mu", row.mu);
        rec.add("gamma", row.gamma);
        rec.add("epsilon", row.epsilon);
        rec.add("trials", row.trials);
        rec.add("side", std::string(name));
        rec.add("threshold", side.threshold);
        rec.add("empirical", side.empirical);
        rec.add("stderr", side.stderr_);
        add_optional(rec, "bound", side.bound);
        rec.add("status", std::string(to_string(side.status)));
        out.push_back(std::move(rec));
    };
    side_record("left", row.left);
    side_record("right", row.right);
    if (row.binomial_right) side_record("binomial-right", *row.binomial_right);
    return out;
}

void write_records(std::ostream& out, const std::vector<OutputRecord>& records, OutputFormat format) {
    if (records.empty()) return;
    switch (format) {
    case OutputFormat::Csv:
        write_csv(out, records);
        break;
    case OutputFormat::Json:
        write_json(out, records);
        break;
    case OutputFormat::Human:
        write_human(out, records);
        break;
    }
}

} // namespace invseq
