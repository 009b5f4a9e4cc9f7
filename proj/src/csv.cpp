#include "margint/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace margint {

std::string
format_real(double value)
{
  if (std::isnan(value))
    return "nan";
  if (std::isinf(value))
    return value > 0 ? "inf" : "-inf";
  if (value == 0.0)
    return "0e0";

  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::scientific, 16);
  const std::string text(buf, res.ptr);
  const auto e = text.find('e');
  std::string mantissa = text.substr(0, e);
  if (mantissa.find('.') != std::string::npos) {
    while (mantissa.back() == '0')
      mantissa.pop_back();
    if (mantissa.back() == '.')
      mantissa.pop_back();
  }
  std::string exponent = text.substr(e + 1);
  bool negative = false;
  if (exponent.front() == '+' || exponent.front() == '-') {
    negative = exponent.front() == '-';
    exponent.erase(0, 1);
  }
  while (exponent.size() > 1 && exponent.front() == '0')
    exponent.erase(0, 1);
  return mantissa + "e" + (negative ? "-" : "") + exponent;
}

namespace {

std::string
format_cell(const Cell& cell, const Column& column)
{
  switch (column.type) {
    case ColumnType::integer:
      if (const auto* v = std::get_if<std::int64_t>(&cell))
        return std::to_string(*v);
      break;
    case ColumnType::real:
      if (const auto* v = std::get_if<double>(&cell))
        return format_real(*v);
      break;
    case ColumnType::text:
      if (const auto* v = std::get_if<std::string>(&cell)) {
        if (v->find_first_of(",\"\n") != std::string::npos)
          throw std::invalid_argument("csv: text cell in column '" + column.name +
                                      "' contains a separator or quote");
        return *v;
      }
      break;
  }
  throw std::invalid_argument("csv: cell type does not match column '" + column.name + "'");
}

} // namespace

std::string
to_csv(const CsvTable& table)
{
  if (table.schema.empty())
    throw std::invalid_argument("csv: empty schema");
  std::string out;
  for (std::size_t c = 0; c < table.schema.size(); ++c) {
    if (c > 0)
      out += ',';
    out += table.schema[c].name;
  }
  out += '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.schema.size())
      throw std::invalid_argument("csv: row " + std::to_string(r) + " has " +
                                  std::to_string(row.size()) + " cells, schema has " +
                                  std::to_string(table.schema.size()));
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0)
        out += ',';
      out += format_cell(row[c], table.schema[c]);
    }
    out += '\n';
  }
  return out;
}

void
write_csv(const CsvTable& table, const std::filesystem::path& path)
{
  const std::string text = to_csv(table);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file)
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file)
    throw std::runtime_error("write to '" + path.string() + "' failed");
}

} // namespace margint
