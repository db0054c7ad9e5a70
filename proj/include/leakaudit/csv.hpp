#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace leakaudit {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column, -1 if absent.
  int column(const std::string& name) const;
};

// RFC 4180 reader: quoted fields, embedded commas/newlines, CRLF line ends.
// Invalid UTF-8 bytes are replaced with U+FFFD (review text is scraped, so
// the reader is lossy rather than strict). Throws data_error on a missing
// file or structurally broken quoting.
CsvTable read_csv_file(const std::string& path);
CsvTable read_csv(std::istream& in, const std::string& origin);

// Quote a field if it contains a comma, quote, or newline.
std::string csv_quote(const std::string& field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

// Replaces invalid UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(const std::string& raw);

}  // namespace leakaudit
