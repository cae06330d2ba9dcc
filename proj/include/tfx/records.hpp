#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tfx/engine.hpp"

namespace tfx {

// Plain-text record files. Every renderer emits "\n" line ends and prints
// doubles with enough digits to survive a round trip, so rendering the parse
// of a rendered record reproduces it byte for byte. The structs hold states
// as the rendered text: records stay readable without the space object that
// produced them.

// "lattice <n>" | "metric <distance> <dim>" | "ordinal <bound>"
std::string space_kind_line(const Space& s);

struct TraceRow {
  Ordinal stage;
  std::string state;
  double discrepancy = 0.0;
  bool operator==(const TraceRow&) const = default;
};

struct TraceFile {
  std::string space_name;
  std::string kind_line;
  CheckMode mode = CheckMode::exact;
  double eps = 0.0;
  Ordinal budget;
  std::string measure;
  std::string initial;
  std::vector<TraceRow> stages;
  RunOutcome outcome = RunOutcome::converged;
  std::optional<Ordinal> failed_limit;
  bool operator==(const TraceFile&) const = default;
};

TraceFile make_trace_file(const IterationTrace& tr);
std::string render_trace(const TraceFile& f);
TraceFile parse_trace(const std::string& text);  // ParseError with line numbers

struct CertFile {
  std::string space_name;
  std::string kind_line;
  CheckMode mode = CheckMode::exact;
  double eps = 0.0;
  std::string value;
  Ordinal closure;
  double residual = 0.0;
  bool limit_crossed = false;
  std::string measure;
  std::string check;
  std::vector<std::pair<std::string, std::string>> evidence;  // initial -> final
  bool operator==(const CertFile&) const = default;
};

CertFile make_cert_file(const FixpointCertificate& c, const Space& s);
std::string render_cert(const CertFile& f);
CertFile parse_cert(const std::string& text);

struct UniqFile {
  std::string space_name;
  std::string kind_line;
  CheckMode mode = CheckMode::exact;
  double eps = 0.0;
  UniquenessVerdict verdict = UniquenessVerdict::inconclusive;
  std::vector<std::string> values;
  std::vector<std::string> notes;
  // Per initial, in input order: the converged value, or nothing for a run
  // that failed.
  std::vector<std::pair<std::string, std::optional<std::string>>> evidence;
  bool operator==(const UniqFile&) const = default;
};

UniqFile make_uniq_file(const UniquenessReport& r, const Space& s);
std::string render_uniq(const UniqFile& f);
UniqFile parse_uniq(const std::string& text);

// Free-form keyed rows for ground-truth comparisons; the writer fixes the
// row order, so equal reports render identically.
struct OracleFile {
  std::string kind;
  std::string space_name;
  std::vector<std::pair<std::string, std::string>> rows;
  bool operator==(const OracleFile&) const = default;
};

std::string render_oracle(const OracleFile& f);
OracleFile parse_oracle(const std::string& text);

// Human-oriented stage-by-stage account of a trace: every recorded stage with
// its discrepancy, the outcome, and the earliest recorded stage from which
// the recorded tail stays put (judged at the trace's own tolerance). Works
// from the record alone. EmptyTrace when no stage was recorded.
std::string explain_trace(const TraceFile& f);

std::string read_text_file(const std::string& path);   // ParseError when unreadable
void write_text_file(const std::string& path, const std::string& content);

}  // namespace tfx
