#include "ineq/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>

#include <fmt/format.h>

#include "ineq/error.hpp"

namespace ineq::csv {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_blank(const std::vector<std::string>& fields) {
  return std::all_of(fields.begin(), fields.end(),
                     [](const std::string& f) { return trim(f).empty(); });
}

}  // namespace

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::optional<std::size_t> Table::column(std::string_view name) const {
  const std::string wanted = lower(trim(name));
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (lower(trim(header[i])) == wanted) return i;
  }
  return std::nullopt;
}

Table read(std::istream& in, std::string_view source) {
  Table table;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool have_header = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto finish_record = [&] {
    fields.push_back(std::move(field));
    field.clear();
    if (!is_blank(fields)) {
      if (!have_header) {
        for (auto& f : fields) f = trim(f);
        table.header = std::move(fields);
        have_header = true;
      } else {
        if (fields.size() != table.header.size()) {
          throw FormatError(std::string(source), record_line,
                            fmt::format("expected {} fields, found {}", table.header.size(),
                                        fields.size()));
        }
        table.rows.push_back(Row{record_line, std::move(fields)});
      }
    }
    fields.clear();
  };

  char c = 0;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        break;
      case '\r':
        break;
      case '\n':
        finish_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(c);
    }
  }
  if (in_quotes) throw FormatError(std::string(source), record_line, "unterminated quoted field");
  if (!field.empty() || !fields.empty()) finish_record();
  if (!have_header) throw FormatError(std::string(source), 0, "missing header row");
  return table;
}

std::optional<double> parse_double(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::string format_number(double value) { return fmt::format("{}", value); }

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace ineq::csv
