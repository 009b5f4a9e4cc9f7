#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace margint {

enum class ColumnType
{
  integer,
  real,
  text
};

struct Column
{
  std::string name;
  ColumnType type = ColumnType::real;
};

using Cell = std::variant<std::int64_t, double, std::string>;

struct CsvTable
{
  std::vector<Column> schema;
  std::vector<std::vector<Cell>> rows;
};

//! Canonical scientific form with up to 17 significant digits: trailing
//! mantissa zeros and exponent padding are dropped, so 0.25 -> "2.5e-1",
//! 1 -> "1e0", 1234.5 -> "1.2345e3". Non-finite values print as nan, inf,
//! -inf. Independent of locale.
std::string format_real(double value);

//! Header line plus one line per row, '\n' terminated. Throws
//! std::invalid_argument when a row does not match the schema.
std::string to_csv(const CsvTable& table);

//! Writes to_csv(table) byte for byte; throws std::runtime_error on I/O
//! failure.
void write_csv(const CsvTable& table, const std::filesystem::path& path);

} // namespace margint
