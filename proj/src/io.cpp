#include "dfbm/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dfbm/errors.hpp"

namespace dfbm {

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != header.size()) {
        throw Error("table row has " + std::to_string(row.size()) + " cells for " +
                    std::to_string(header.size()) + " columns");
    }
    rows.push_back(std::move(row));
}

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return "";
            } else if constexpr (std::is_same_v<T, double>) {
                return format_double(v);
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (v.find_first_of(",\"\n") == std::string::npos) {
                    return v;
                }
                std::string q = "\"";
                for (char ch : v) {
                    if (ch == '"') {
                        q += '"';
                    }
                    q += ch;
                }
                return q + "\"";
            } else {
                return std::to_string(v);
            }
        },
        c);
}

nlohmann::json json_field(const Cell& c) {
    return std::visit(
        [](const auto& v) -> nlohmann::json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return nullptr;
            } else if constexpr (std::is_same_v<T, double>) {
                if (!std::isfinite(v)) {
                    return format_double(v);
                }
                return v;
            } else {
                return v;
            }
        },
        c);
}

}  // namespace

void write_csv(std::ostream& out, const Table& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        out << (i ? "," : "") << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << csv_field(row[i]);
        }
        out << '\n';
    }
}

void write_jsonl(std::ostream& out, const Table& table) {
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            obj[table.header[i]] = json_field(row[i]);
        }
        out << obj.dump() << '\n';
    }
}

void write_table(std::ostream& out, const Table& table, OutputFormat format) {
    if (format == OutputFormat::json) {
        write_jsonl(out, table);
    } else {
        write_csv(out, table);
    }
}

Table series_table(const TimeSeries& series) {
    Table t{{"time", "value"}, {}};
    t.rows.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        t.rows.push_back({series.grid[i], series.values[i]});
    }
    return t;
}

void write_series_csv(std::ostream& out, const TimeSeries& series) {
    write_csv(out, series_table(series));
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, std::size_t line, const char* what) {
    const std::string f = trim(field);
    double v = 0.0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw ParseError(std::string("cannot parse ") + what + " '" + f + "'", line);
    }
    return v;
}

}  // namespace

TimeSeries read_series_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<double> times;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) {
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            if (t != "time,value") {
                throw ParseError("expected header 'time,value', got '" + t + "'", line_no);
            }
            continue;
        }
        const auto comma = t.find(',');
        if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos) {
            throw ParseError("expected two comma-separated fields", line_no);
        }
        const double time = parse_number(t.substr(0, comma), line_no, "time");
        const double value = parse_number(t.substr(comma + 1), line_no, "value");
        if (!times.empty() && !(time > times.back())) {
            throw ParseError("times must be strictly increasing", line_no);
        }
        times.push_back(time);
        values.push_back(value);
    }
    if (!header_seen) {
        throw ParseError("empty input, expected header 'time,value'", line_no + 1);
    }
    if (times.empty()) {
        throw ParseError("no observations after header", line_no + 1);
    }
    return TimeSeries(TimeGrid(std::move(times)), std::move(values));
}

Table loglog_table(const LogLogPlot& plot) {
    Table t{{"ln_tau", "ln_moment", "total_weight"}, {}};
    for (std::size_t i = 0; i < plot.size(); ++i) {
        t.rows.push_back({plot.ln_tau[i], plot.ln_moment[i], plot.total_weight[i]});
    }
    return t;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

}  // namespace dfbm
