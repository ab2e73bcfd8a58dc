#pragma once

// Export file formats for raw event streams: JSONL (one canonical-JSON record
// per line) and CSV with a fixed header per kind.

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "collector/event_model.hpp"

namespace collector {

enum class FileFormat { kJsonl, kCsv };

std::string_view to_string(FileFormat format);
std::optional<FileFormat> parse_file_format(std::string_view text);

std::string_view record_csv_header(EventKind kind);

void write_records(std::ostream& out, EventKind kind, std::span<const EventEnvelope> records,
                   FileFormat format);
std::string format_records(EventKind kind, std::span<const EventEnvelope> records, FileFormat format);

/// Parse failure in a record or feature file; `line()` is 1-based.
class LineError : public std::runtime_error {
 public:
  LineError(std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct RecordFile {
  std::optional<EventKind> kind;  // unset only for an empty JSONL file
  FileFormat format = FileFormat::kJsonl;
  std::vector<EventEnvelope> records;
};

/// Reads an exported stream. The format is sniffed from the first non-blank
/// line ('{' means JSONL, otherwise a CSV header). Every record is validated.
/// Throws LineError naming the offending line.
RecordFile read_records(std::istream& in);

/// Reads one CSV record, joining physical lines while a quoted field is open.
/// `line_no` is advanced past every physical line consumed.
bool read_csv_record(std::istream& in, std::string& record, std::size_t& line_no);

}  // namespace collector
