#include "invseq/report_io.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

using namespace invseq;

namespace {

using Row = std::vector<std::string>;

// RFC 4180 style reader: quoted fields may hold commas, doubled quotes and newlines.
std::vector<Row> read_csv(const std::string& text) {
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            row.push_back(field);
            field.clear();
        } else if (ch == '\n') {
            row.push_back(field);
            rows.push_back(row);
            row.clear();
            field.clear();
        } else {
            field += ch;
        }
    }
    return rows;
}

std::vector<nlohmann::json> read_ndjson(const std::string& text) {
    std::vector<nlohmann::json> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(nlohmann::json::parse(line));
    return out;
}

std::string render(const std::vector<OutputRecord>& records, OutputFormat format) {
    std::ostringstream os;
    write_records(os, records, format);
    return os.str();
}

// Relative agreement to the 12 significant digits the machine formats carry.
bool same_to_12_digits(double parsed, double original) {
    if (original == 0.0) return parsed == 0.0;
    return std::abs(parsed - original) <= 5e-12 * std::abs(original);
}

std::vector<OutputRecord> sample_intervals() {
    std::vector<OutputRecord> rows;
    for (auto method : {MethodId::HoeffdingGeneral, MethodId::HoeffdingBernoulli, MethodId::MassartGeneral,
                        MethodId::MassartBernoulli}) {
        for (std::uint64_t n : {10ull, 11ull, 20ull, 333ull}) rows.push_back(to_record(compute_interval(method, {n, 10.0, 0.05})));
    }
    return rows;
}

} // namespace

TEST_CASE("format names", "[report]") {
    CHECK(parse_format("csv") == OutputFormat::Csv);
    CHECK(parse_format("json") == OutputFormat::Json);
    CHECK(parse_format("human") == OutputFormat::Human);
    CHECK_THROWS_AS(parse_format("xml"), std::invalid_argument);
    CHECK_THROWS_AS(parse_format("CSV"), std::invalid_argument);
}

TEST_CASE("number formatting", "[report]") {
    CHECK(format_double(0.77771257975592356, kMachineDigits) == "0.777712579756");
    CHECK(format_double(0.77771257975592356, kHumanDigits) == "0.777713");
    CHECK(format_double(1.0, kMachineDigits) == "1");
    CHECK(format_double(5.6632165642693762e-7, kMachineDigits) == "5.66321656427e-07");
}

TEST_CASE("interval records use the documented columns", "[report]") {
    const auto text = render({to_record(compute_interval(MethodId::HoeffdingBernoulli, {20, 10.0, 0.05}))},
                             OutputFormat::Csv);
    const auto rows = read_csv(text);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == Row{"method", "n", "gamma", "delta", "lower", "upper", "width", "residual", "iterations"});
    CHECK(rows[1][0] == "hoeffding-bernoulli");
    CHECK(rows[1][1] == "20");
    CHECK(rows[1][4] == "0.222287420244");
    CHECK(rows[1][5] == "0.777712579756");

    // Closed-form methods have no solver diagnostics.
    const auto massart = read_csv(render({to_record(compute_interval(MethodId::MassartGeneral, {20, 10.0, 0.05}))},
                                         OutputFormat::Csv));
    CHECK(massart[1][7].empty());
    CHECK(massart[1][8].empty());
}

TEST_CASE("csv and json round-trip to the serialized precision", "[report][property]") {
    const auto records = sample_intervals();
    const auto csv = read_csv(render(records, OutputFormat::Csv));
    const auto json = read_ndjson(render(records, OutputFormat::Json));
    REQUIRE(csv.size() == records.size() + 1);
    REQUIRE(json.size() == records.size());

    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& fields = records[r].fields;
        REQUIRE(csv[r + 1].size() == fields.size());
        REQUIRE(json[r].size() == fields.size());
        std::size_t col = 0;
        for (const auto& [key, value] : fields) {
            INFO("row " << r << " column " << key);
            CHECK(csv[0][col] == key);
            const std::string& cell = csv[r + 1][col];
            const auto& j = json[r].at(key);
            if (const auto* d = std::get_if<double>(&value)) {
                const double from_csv = std::strtod(cell.c_str(), nullptr);
                CHECK(same_to_12_digits(from_csv, *d));
                CHECK(j.get<double>() == from_csv);
            } else if (const auto* u = std::get_if<std::uint64_t>(&value)) {
                CHECK(cell == std::to_string(*u));
                CHECK(j.get<std::uint64_t>() == *u);
            } else if (const auto* s = std::get_if<std::string>(&value)) {
                CHECK(cell == *s);
                CHECK(j.get<std::string>() == *s);
            } else if (std::holds_alternative<std::monostate>(value)) {
                CHECK(cell.empty());
                CHECK(j.is_null());
            }
            ++col;
        }
    }
}

TEST_CASE("json keeps field order and types", "[report]") {
    OutputRecord rec;
    rec.add("name", std::string("x"));
    rec.add("count", std::uint64_t{3});
    rec.add("ratio", 0.1);
    rec.add("ok", true);
    rec.add("missing", std::monostate{});
    rec.add("bad", std::nan(""));
    const auto text = render({rec}, OutputFormat::Json);
    CHECK(text == "{\"name\":\"x\",\"count\":3,\"ratio\":0.1,\"ok\":true,\"missing\":null,\"bad\":null}\n");
    CHECK(render({rec}, OutputFormat::Csv) == "name,count,ratio,ok,missing,bad\nx,3,0.1,true,,nan\n");
}

TEST_CASE("csv quotes fields holding separators", "[report]") {
    OutputRecord rec;
    rec.add("dist", std::string("discrete:0.25@0.5,0.75@0.5"));
    rec.add("note", std::string("say \"hi\""));
    rec.add("plain", std::string("uniform"));
    const auto text = render({rec}, OutputFormat::Csv);
    CHECK(text == "dist,note,plain\n\"discrete:0.25@0.5,0.75@0.5\",\"say \"\"hi\"\"\",uniform\n");
    const auto rows = read_csv(text);
    CHECK(rows[1] == Row{"discrete:0.25@0.5,0.75@0.5", "say \"hi\"", "uniform"});
}

TEST_CASE("human tables align columns with six digits", "[report]") {
    const auto ci = compute_interval(MethodId::MassartGeneral, {20, 10.0, 0.05});
    const auto text = render({to_record(ci)}, OutputFormat::Human);
    std::istringstream in(text);
    std::string header;
    std::string line;
    std::getline(in, header);
    std::getline(in, line);
    CHECK(header.rfind("method", 0) == 0);
    CHECK(line.find("0.218518") != std::string::npos);
    CHECK(line.find("0.2185183") == std::string::npos);
    // Missing diagnostics show as a dash.
    CHECK(line.back() == '-');
    CHECK(header.find("lower") == line.find("0.218518"));
}

TEST_CASE("empty record lists write nothing", "[report]") {
    for (auto f : {OutputFormat::Csv, OutputFormat::Json, OutputFormat::Human}) CHECK(render({}, f).empty());
}

TEST_CASE("coverage and tail records", "[report]") {
    CoverageCell cell;
    cell.dist = "uniform:0,1";
    cell.method = MethodId::MassartGeneral;
    cell.gamma = 5;
    cell.delta = 0.1;
    cell.trials = 100;
    cell.seed = 42;
    cell.coverage = 0.97;
    cell.pass = true;
    const auto rows = read_csv(render({to_record(cell)}, OutputFormat::Csv));
    CHECK(rows[0] == Row{"method", "gamma", "delta", "dist", "trials", "seed", "coverage", "coverage_stderr", "mean_n",
                         "mean_n_stderr", "pass", "mu", "violations", "margin", "clamped"});
    CHECK(rows[1][3] == "uniform:0,1"); // quoted in the raw text, plain once parsed
    CHECK(rows[1][10] == "true");

    TailCheckRow tail;
    tail.dist = "bernoulli:0.5";
    tail.right.status = TailStatus::Skipped;
    const auto recs = to_records(tail);
    REQUIRE(recs.size() == 2);
    const auto t = read_csv(render(recs, OutputFormat::Csv));
    CHECK(t[0] == Row{"dist", "mu", "gamma", "epsilon", "trials", "side", "threshold", "empirical", "stderr", "bound",
                      "status"});
    CHECK(t[2][5] == "right");
    CHECK(t[2][9].empty());
    CHECK(t[2][10] == "skipped");
}
