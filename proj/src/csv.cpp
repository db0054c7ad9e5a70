#include "leakaudit/csv.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "leakaudit/errors.hpp"

namespace leakaudit {

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

// Appends one UTF-8 validated chunk; invalid sequences become U+FFFD.
void append_sanitized(std::string& out, const unsigned char* p, std::size_t n) {
  static const char kReplacement[] = "\xEF\xBF\xBD";
  std::size_t i = 0;
  while (i < n) {
    unsigned char c = p[i];
    std::size_t len;
    if (c < 0x80) {
      len = 1;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
    } else {
      out += kReplacement;
      ++i;
      continue;
    }
    if (i + len > n) {
      out += kReplacement;
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t j = 1; j < len; ++j)
      if ((p[i + j] & 0xC0) != 0x80) ok = false;
    // reject overlong encodings and out-of-range code points
    if (ok && len == 2 && c < 0xC2) ok = false;
    if (ok && len == 3 && c == 0xE0 && p[i + 1] < 0xA0) ok = false;
    if (ok && len == 4 && (c > 0xF4 || (c == 0xF0 && p[i + 1] < 0x90))) ok = false;
    if (ok) {
      out.append(reinterpret_cast<const char*>(p + i), len);
      i += len;
    } else {
      out += kReplacement;
      ++i;
    }
  }
}

}  // namespace

std::string sanitize_utf8(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  append_sanitized(out, reinterpret_cast<const unsigned char*>(raw.data()),
                   raw.size());
  return out;
}

CsvTable read_csv(std::istream& in, const std::string& origin) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any_field = false;
  bool have_header = false;

  auto end_field = [&] {
    record.push_back(sanitize_utf8(field));
    field.clear();
    any_field = true;
  };
  auto end_record = [&] {
    end_field();
    if (!have_header) {
      table.header = std::move(record);
      have_header = true;
    } else {
      table.rows.push_back(std::move(record));
    }
    record.clear();
    any_field = false;
  };

  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r') {
      // swallow; the matching \n (if any) terminates the record
      if (in.peek() != '\n') end_record();
    } else if (c == '\n') {
      end_record();
    } else {
      field += c;
    }
  }
  if (quoted)
    throw data_error(origin + ": unterminated quoted field at end of input");
  if (!field.empty() || any_field) end_record();
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open CSV file: " + path);
  return read_csv(in, path);
}

std::string csv_quote(const std::string& field) {
  bool needs = field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_quote(fields[i]);
  }
  out << '\n';
}

}  // namespace leakaudit
