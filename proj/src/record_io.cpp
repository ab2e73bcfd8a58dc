#include "collector/record_io.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "collector/csv.hpp"
#include "collector/error.hpp"
#include "json.hpp"

namespace collector {
namespace {

constexpr std::string_view kKeystrokeHeader = "code,key,down,up,ctrl,alt,shift,caps";
constexpr std::string_view kMouseHeader = "action,x,y,t";

std::int64_t parse_int(const std::string& text, const char* field) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw Error(ErrorCode::kSchemaViolation, field, "expected integer, got '" + text + "'");
  }
  return value;
}

bool parse_flag(const std::string& text, const char* field) {
  if (text == "0") return false;
  if (text == "1") return true;
  throw Error(ErrorCode::kSchemaViolation, field, "expected 0 or 1, got '" + text + "'");
}

EventEnvelope record_from_csv(EventKind kind, const std::vector<std::string>& fields) {
  if (kind == EventKind::kKeystroke) {
    if (fields.size() != 8) {
      throw Error(ErrorCode::kSchemaViolation, "", "expected 8 columns, got " + std::to_string(fields.size()));
    }
    KeystrokeRecord r;
    r.code = fields[0];
    r.key = fields[1];
    r.down_ms = parse_int(fields[2], "down_ms");
    r.up_ms = parse_int(fields[3], "up_ms");
    r.ctrl = parse_flag(fields[4], "ctrl");
    r.alt = parse_flag(fields[5], "alt");
    r.shift = parse_flag(fields[6], "shift");
    r.caps = parse_flag(fields[7], "caps");
    validate(r);
    return EventEnvelope(std::move(r));
  }
  if (fields.size() != 4) {
    throw Error(ErrorCode::kSchemaViolation, "", "expected 4 columns, got " + std::to_string(fields.size()));
  }
  MouseRecord r;
  const auto action = parse_mouse_action(fields[0]);
  if (!action) throw Error(ErrorCode::kInvariantViolation, "action", "unknown mouse action '" + fields[0] + "'");
  r.action = *action;
  r.x = parse_int(fields[1], "x");
  r.y = parse_int(fields[2], "y");
  r.t_ms = parse_int(fields[3], "t_ms");
  validate(r);
  return EventEnvelope(r);
}

std::vector<std::string> record_to_csv(const EventEnvelope& envelope) {
  if (const auto* k = envelope.keystroke()) {
    return {k->code,
            k->key,
            std::to_string(k->down_ms),
            std::to_string(k->up_ms),
            k->ctrl ? "1" : "0",
            k->alt ? "1" : "0",
            k->shift ? "1" : "0",
            k->caps ? "1" : "0"};
  }
  const auto& m = *envelope.mouse();
  return {std::string(to_string(m.action)), std::to_string(m.x), std::to_string(m.y),
          std::to_string(m.t_ms)};
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::string_view to_string(FileFormat format) {
  return format == FileFormat::kJsonl ? "jsonl" : "csv";
}

std::optional<FileFormat> parse_file_format(std::string_view text) {
  if (text == "jsonl") return FileFormat::kJsonl;
  if (text == "csv") return FileFormat::kCsv;
  return std::nullopt;
}

std::string_view record_csv_header(EventKind kind) {
  return kind == EventKind::kKeystroke ? kKeystrokeHeader : kMouseHeader;
}

void write_records(std::ostream& out, EventKind kind, std::span<const EventEnvelope> records,
                   FileFormat format) {
  if (format == FileFormat::kCsv) out << record_csv_header(kind) << '\n';
  for (const auto& record : records) {
    if (format == FileFormat::kJsonl) {
      out << canonical_json(record) << '\n';
    } else {
      const auto fields = record_to_csv(record);
      out << csv::format_row(fields) << '\n';
    }
  }
}

std::string format_records(EventKind kind, std::span<const EventEnvelope> records, FileFormat format) {
  std::ostringstream out;
  write_records(out, kind, records, format);
  return out.str();
}

LineError::LineError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

bool read_csv_record(std::istream& in, std::string& record, std::size_t& line_no) {
  record.clear();
  std::string physical;
  if (!std::getline(in, physical)) return false;
  ++line_no;
  record = physical;
  // An odd number of quote characters means a quoted field spans a newline.
  while (std::count(record.begin(), record.end(), '"') % 2 == 1) {
    if (!std::getline(in, physical)) break;
    ++line_no;
    record += '\n';
    record += physical;
  }
  strip_cr(record);
  return true;
}

RecordFile read_records(std::istream& in) {
  RecordFile file;
  std::string line;
  std::size_t line_no = 0;

  // The first non-blank line decides the format.
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (!is_blank(line)) break;
  }
  if (is_blank(line)) return file;

  const std::size_t first_line = line_no;
  if (line.front() == '{') {
    file.format = FileFormat::kJsonl;
    auto parse_line = [&](const std::string& text, std::size_t number) {
      if (!file.kind) {
        const auto probe = nlohmann::json::parse(text, nullptr, false);
        file.kind = probe.is_object() && probe.contains("action") ? EventKind::kMouse : EventKind::kKeystroke;
      }
      try {
        file.records.push_back(parse_record_json(*file.kind, text));
      } catch (const Error& e) {
        throw LineError(number, e.what());
      }
    };
    parse_line(line, first_line);
    while (std::getline(in, line)) {
      ++line_no;
      strip_cr(line);
      if (is_blank(line)) continue;
      parse_line(line, line_no);
    }
    return file;
  }

  file.format = FileFormat::kCsv;
  if (line == kKeystrokeHeader) {
    file.kind = EventKind::kKeystroke;
  } else if (line == kMouseHeader) {
    file.kind = EventKind::kMouse;
  } else {
    throw LineError(first_line, "unrecognised header '" + line + "'");
  }

  std::vector<std::string> fields;
  std::string record;
  while (true) {
    const std::size_t record_line = line_no + 1;
    if (!read_csv_record(in, record, line_no)) break;
    if (is_blank(record)) continue;
    if (!csv::parse_row(record, fields)) throw LineError(record_line, "malformed CSV quoting");
    try {
      file.records.push_back(record_from_csv(*file.kind, fields));
    } catch (const Error& e) {
      throw LineError(record_line, e.what());
    }
  }
  return file;
}

}  // namespace collector
