#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "dfbm/aam.hpp"
#include "dfbm/types.hpp"

namespace dfbm {

/// One output cell; monostate is written as an empty CSV field / JSON null.
using Cell = std::variant<std::monostate, double, std::int64_t, std::uint64_t, bool, std::string>;

/// A header plus rows, written either as CSV or as JSON lines (one object
/// per row, keys = header). Every tool output goes through this type so the
/// two formats always carry the same data.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

enum class OutputFormat { csv, json };

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

void write_csv(std::ostream& out, const Table& table);
void write_jsonl(std::ostream& out, const Table& table);
void write_table(std::ostream& out, const Table& table, OutputFormat format);

/// `time,value` CSV, decimal point '.', rows in time order.
void write_series_csv(std::ostream& out, const TimeSeries& series);

/// Reads `time,value` CSV. Throws ParseError naming the offending line
/// (1-based, header is line 1) and GridError if times are not increasing.
TimeSeries read_series_csv(std::istream& in);

Table series_table(const TimeSeries& series);

/// `ln_tau,ln_moment,total_weight`.
Table loglog_table(const LogLogPlot& plot);

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace dfbm
