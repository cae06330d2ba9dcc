#include "tfx/records.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tfx/errors.hpp"

namespace tfx {

std::string space_kind_line(const Space& s) {
  if (s.is_lattice()) return "lattice " + std::to_string(s.lattice().size());
  if (s.is_metric()) {
    const auto& m = s.metric();
    return std::string("metric ") + distance_name(m.distance) + " " + std::to_string(m.dimension);
  }
  return "ordinal " + to_string(s.ordinal().bound);
}

namespace {

void put_mode(std::string& out, CheckMode mode, double eps) {
  out += "mode ";
  out += check_mode_name(mode);
  if (mode == CheckMode::tolerant) {
    out += ' ';
    out += render_double(eps);
  }
  out += '\n';
}

// Strict line cursor; every complaint carries the record kind and line number.
class LineReader {
 public:
  LineReader(const std::string& text, const char* what) : what_(what) {
    if (!text.empty() && text.back() != '\n') {
      fail(Errc::parse_error, std::string(what_) + ": missing final newline");
    }
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t nl = text.find('\n', start);
      lines_.push_back(text.substr(start, nl - start));
      start = nl + 1;
    }
  }

  bool done() const { return i_ == lines_.size(); }
  std::size_t line_no() const { return i_ + 1; }

  const std::string& peek() const {
    if (done()) err("unexpected end of record");
    return lines_[i_];
  }

  std::string next() {
    std::string s = peek();
    ++i_;
    return s;
  }

  // The rest of the next line after a required "<key> " prefix; "<key>" alone
  // (no payload) is accepted for empty rests.
  std::string field(const std::string& key) {
    std::string line = next();
    if (line == key) return "";
    if (line.size() > key.size() && line.compare(0, key.size(), key) == 0 &&
        line[key.size()] == ' ') {
      return line.substr(key.size() + 1);
    }
    err("expected '" + key + " ...', got '" + line + "'", i_);
    return "";
  }

  bool starts_with(const std::string& prefix) const {
    return !done() && lines_[i_].size() >= prefix.size() &&
           lines_[i_].compare(0, prefix.size(), prefix) == 0;
  }

  // Complaint about the next unread line (trailing garbage, early end).
  [[noreturn]] void err(const std::string& msg) const { err(msg, i_ + 1); }

  // Complaint about the line just consumed: a field whose payload is bad.
  [[noreturn]] void err_prev(const std::string& msg) const { err(msg, i_ == 0 ? 1 : i_); }

  [[noreturn]] void err(const std::string& msg, std::size_t line) const {
    fail(Errc::parse_error, std::string(what_) + " line " + std::to_string(line) + ": " + msg);
  }

 private:
  std::vector<std::string> lines_;
  std::size_t i_ = 0;
  const char* what_;
};

double parse_full_double(LineReader& r, const std::string& text) {
  if (text.empty()) r.err_prev("expected a number");
  const char* begin = text.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + text.size()) r.err_prev("trailing text after number '" + text + "'");
  return v;
}

Ordinal parse_ord_field(LineReader& r, const std::string& text) {
  try {
    return parse_ordinal(text);
  } catch (const Error& e) {
    r.err_prev(e.what());
  }
}

void parse_mode(LineReader& r, CheckMode& mode, double& eps) {
  std::string m = r.field("mode");
  if (m == "exact") {
    mode = CheckMode::exact;
    eps = 0.0;
    return;
  }
  if (m.rfind("tolerant ", 0) == 0) {
    mode = CheckMode::tolerant;
    eps = parse_full_double(r, m.substr(9));
    return;
  }
  r.err_prev("expected 'exact' or 'tolerant <eps>', got '" + m + "'");
}

// "<left> ; <right>" where only the right side is known to be ';'-free.
std::pair<std::string, std::string> split_last(LineReader& r, const std::string& text) {
  std::size_t pos = text.rfind(" ; ");
  if (pos == std::string::npos) r.err_prev("expected '<a> ; <b>' in '" + text + "'");
  return {text.substr(0, pos), text.substr(pos + 3)};
}

std::pair<std::string, std::string> split_first(LineReader& r, const std::string& text) {
  std::size_t pos = text.find(" ; ");
  if (pos == std::string::npos) r.err_prev("expected '<a> ; <b>' in '" + text + "'");
  return {text.substr(0, pos), text.substr(pos + 3)};
}

void expect_end(LineReader& r) {
  std::string line = r.next();
  if (line != "end") r.err("expected 'end', got '" + line + "'", r.line_no() - 1);
  if (!r.done()) r.err("text after 'end'");
}

}  // namespace

TraceFile make_trace_file(const IterationTrace& tr) {
  if (tr.space == nullptr) fail(Errc::validation_error, "trace has no space");
  TraceFile f;
  f.space_name = tr.space->name;
  f.kind_line = space_kind_line(*tr.space);
  f.mode = tr.mode;
  f.eps = tr.eps;
  f.budget = tr.budget;
  f.measure = tr.measure;
  f.initial = render_state(*tr.space, tr.initial);
  f.stages.reserve(tr.stages.size());
  for (const auto& st : tr.stages) {
    f.stages.push_back({st.stage, render_state(*tr.space, st.state), st.discrepancy});
  }
  f.outcome = tr.outcome;
  f.failed_limit = tr.failed_limit;
  return f;
}

std::string render_trace(const TraceFile& f) {
  std::string out = "trace-format 1\n";
  out += "space " + f.space_name + "\n";
  out += "kind " + f.kind_line + "\n";
  put_mode(out, f.mode, f.eps);
  out += "budget " + to_string(f.budget) + "\n";
  out += "measure " + f.measure + "\n";
  out += "initial " + f.initial + "\n";
  for (const auto& row : f.stages) {
    out += "stage " + to_string(row.stage) + " ; " + row.state + " ; " +
           render_double(row.discrepancy) + "\n";
  }
  out += "outcome " + std::string(run_outcome_name(f.outcome)) + "\n";
  if (f.failed_limit) out += "failed-limit " + to_string(*f.failed_limit) + "\n";
  out += "end\n";
  return out;
}

TraceFile parse_trace(const std::string& text) {
  LineReader r(text, "trace");
  if (r.next() != "trace-format 1") r.err("expected 'trace-format 1' header", 1);
  TraceFile f;
  f.space_name = r.field("space");
  f.kind_line = r.field("kind");
  parse_mode(r, f.mode, f.eps);
  f.budget = parse_ord_field(r, r.field("budget"));
  f.measure = r.field("measure");
  f.initial = r.field("initial");
  while (r.starts_with("stage ")) {
    std::string rest = r.field("stage");
    auto [head, disc_text] = split_last(r, rest);
    auto [ord_text, state_text] = split_first(r, head);
    TraceRow row;
    row.stage = parse_ord_field(r, ord_text);
    row.state = state_text;
    row.discrepancy = parse_full_double(r, disc_text);
    if (!f.stages.empty() && compare(f.stages.back().stage, row.stage) != Ordering::less) {
      r.err_prev("stages not strictly increasing");
    }
    f.stages.push_back(std::move(row));
  }
  std::string outcome = r.field("outcome");
  bool known = false;
  for (RunOutcome o : {RunOutcome::converged, RunOutcome::budget_exhausted,
                       RunOutcome::limit_diverged, RunOutcome::cap_exhausted}) {
    if (outcome == run_outcome_name(o)) {
      f.outcome = o;
      known = true;
    }
  }
  if (!known) r.err_prev("unknown outcome '" + outcome + "'");
  if (r.starts_with("failed-limit ")) {
    f.failed_limit = parse_ord_field(r, r.field("failed-limit"));
  }
  expect_end(r);
  return f;
}

CertFile make_cert_file(const FixpointCertificate& c, const Space& s) {
  CertFile f;
  f.space_name = s.name;
  f.kind_line = space_kind_line(s);
  f.mode = c.mode;
  f.eps = c.eps;
  f.value = render_state(s, c.value);
  f.closure = c.closure;
  f.residual = c.residual;
  f.limit_crossed = c.limit_crossed;
  f.measure = c.measure;
  f.check = c.check;
  f.evidence.reserve(c.uniqueness_evidence.size());
  for (const auto& [init, fin] : c.uniqueness_evidence) {
    f.evidence.emplace_back(render_state(s, init), render_state(s, fin));
  }
  return f;
}

std::string render_cert(const CertFile& f) {
  std::string out = "certificate-format 1\n";
  out += "space " + f.space_name + "\n";
  out += "kind " + f.kind_line + "\n";
  put_mode(out, f.mode, f.eps);
  out += "value " + f.value + "\n";
  out += "closure " + to_string(f.closure) + "\n";
  out += "residual " + render_double(f.residual) + "\n";
  out += std::string("limit-crossed ") + (f.limit_crossed ? "1" : "0") + "\n";
  out += "measure " + f.measure + "\n";
  out += "check " + f.check + "\n";
  for (const auto& [init, fin] : f.evidence) {
    out += "evidence " + init + " ; " + fin + "\n";
  }
  out += "end\n";
  return out;
}

CertFile parse_cert(const std::string& text) {
  LineReader r(text, "certificate");
  if (r.next() != "certificate-format 1") r.err("expected 'certificate-format 1' header", 1);
  CertFile f;
  f.space_name = r.field("space");
  f.kind_line = r.field("kind");
  parse_mode(r, f.mode, f.eps);
  f.value = r.field("value");
  f.closure = parse_ord_field(r, r.field("closure"));
  f.residual = parse_full_double(r, r.field("residual"));
  std::string lc = r.field("limit-crossed");
  if (lc != "0" && lc != "1") r.err_prev("expected 'limit-crossed 0|1'");
  f.limit_crossed = lc == "1";
  f.measure = r.field("measure");
  f.check = r.field("check");
  while (r.starts_with("evidence ")) {
    auto [init, fin] = split_last(r, r.field("evidence"));
    f.evidence.emplace_back(std::move(init), std::move(fin));
  }
  expect_end(r);
  return f;
}

UniqFile make_uniq_file(const UniquenessReport& rep, const Space& s) {
  UniqFile f;
  f.space_name = s.name;
  f.kind_line = space_kind_line(s);
  if (s.is_metric()) {
    f.mode = CheckMode::tolerant;
    f.eps = s.metric().eq_tolerance;
  }
  f.verdict = rep.verdict;
  for (const auto& v : rep.values) f.values.push_back(render_state(s, v));
  f.notes = rep.notes;
  for (const auto& [init, fin] : rep.evidence) {
    std::optional<std::string> fin_text;
    if (fin) fin_text = render_state(s, *fin);
    f.evidence.emplace_back(render_state(s, init), std::move(fin_text));
  }
  return f;
}

std::string render_uniq(const UniqFile& f) {
  std::string out = "uniqueness-format 1\n";
  out += "space " + f.space_name + "\n";
  out += "kind " + f.kind_line + "\n";
  put_mode(out, f.mode, f.eps);
  out += "verdict " + std::string(uniqueness_verdict_name(f.verdict)) + "\n";
  for (const auto& v : f.values) out += "value " + v + "\n";
  for (const auto& n : f.notes) out += "note " + n + "\n";
  for (const auto& [init, fin] : f.evidence) {
    if (fin) {
      out += "evidence " + init + " ; " + *fin + "\n";
    } else {
      out += "failed " + init + "\n";
    }
  }
  out += "end\n";
  return out;
}

UniqFile parse_uniq(const std::string& text) {
  LineReader r(text, "uniqueness");
  if (r.next() != "uniqueness-format 1") r.err("expected 'uniqueness-format 1' header", 1);
  UniqFile f;
  f.space_name = r.field("space");
  f.kind_line = r.field("kind");
  parse_mode(r, f.mode, f.eps);
  std::string verdict = r.field("verdict");
  bool known = false;
  for (UniquenessVerdict v : {UniquenessVerdict::unique, UniquenessVerdict::multiple,
                              UniquenessVerdict::inconclusive}) {
    if (verdict == uniqueness_verdict_name(v)) {
      f.verdict = v;
      known = true;
    }
  }
  if (!known) r.err_prev("unknown verdict '" + verdict + "'");
  while (r.starts_with("value ")) f.values.push_back(r.field("value"));
  while (r.starts_with("note ")) f.notes.push_back(r.field("note"));
  while (r.starts_with("evidence ") || r.starts_with("failed ")) {
    if (r.starts_with("evidence ")) {
      auto [init, fin] = split_last(r, r.field("evidence"));
      f.evidence.emplace_back(std::move(init), std::move(fin));
    } else {
      f.evidence.emplace_back(r.field("failed"), std::nullopt);
    }
  }
  expect_end(r);
  return f;
}

std::string render_oracle(const OracleFile& f) {
  std::string out = "oracle-format 1\n";
  out += "kind " + f.kind + "\n";
  out += "space " + f.space_name + "\n";
  for (const auto& [key, value] : f.rows) {
    out += "row " + key + " ; " + value + "\n";
  }
  out += "end\n";
  return out;
}

OracleFile parse_oracle(const std::string& text) {
  LineReader r(text, "oracle");
  if (r.next() != "oracle-format 1") r.err("expected 'oracle-format 1' header", 1);
  OracleFile f;
  f.kind = r.field("kind");
  f.space_name = r.field("space");
  while (r.starts_with("row ")) {
    auto [key, value] = split_first(r, r.field("row"));
    f.rows.emplace_back(std::move(key), std::move(value));
  }
  expect_end(r);
  return f;
}

namespace {

// Equality of recorded state texts at the trace's own tolerance. Tolerant
// records name a metric space in their kind line, which is enough to rebuild
// the comparison without the original space object.
struct StateTextEq {
  std::optional<Space> metric_space;
  double eps = 0.0;

  explicit StateTextEq(const TraceFile& f) : eps(f.eps) {
    if (f.mode != CheckMode::tolerant) return;
    std::istringstream in(f.kind_line);
    std::string kind, dist;
    int dim = 0;
    if ((in >> kind >> dist >> dim) && kind == "metric") {
      MetricSpaceSpec spec;
      spec.dimension = dim;
      spec.distance = distance_by_name(dist);
      spec.eq_tolerance = f.eps;
      metric_space = Space{"", spec};
    } else {
      fail(Errc::parse_error, "tolerant trace with non-metric kind '" + f.kind_line + "'");
    }
  }

  bool operator()(const std::string& a, const std::string& b) const {
    if (!metric_space) return a == b;
    return states_equal(*metric_space, parse_state(*metric_space, a),
                        parse_state(*metric_space, b), eps);
  }
};

}  // namespace

std::string explain_trace(const TraceFile& f) {
  if (f.stages.empty()) fail(Errc::empty_trace, "trace records no stages");
  StateTextEq eq(f);

  std::string out;
  out += "space '" + f.space_name + "' (" + f.kind_line + ")\n";
  out += "mode " + std::string(check_mode_name(f.mode));
  if (f.mode == CheckMode::tolerant) out += " eps=" + render_double(f.eps);
  out += "; budget " + to_string(f.budget) + "; measure " + f.measure + "\n";
  out += "initial " + f.initial + "\n";
  out += "recorded stages: " + std::to_string(f.stages.size()) + "; outcome " +
         run_outcome_name(f.outcome);
  if (f.failed_limit) out += " at limit " + to_string(*f.failed_limit);
  out += "\n";
  for (const auto& row : f.stages) {
    out += "  stage " + to_string(row.stage) + ": " + row.state + "  (" + f.measure + " " +
           render_double(row.discrepancy) + ")\n";
  }

  // Earliest recorded stage whose state every later recorded stage matches.
  std::size_t n = f.stages.size();
  std::size_t first_stable = n - 1;
  for (std::size_t s = 0; s + 1 < n; ++s) {
    bool all = true;
    for (std::size_t j = s + 1; j < n; ++j) {
      if (!eq(f.stages[s].state, f.stages[j].state)) {
        all = false;
        break;
      }
    }
    if (all) {
      first_stable = s;
      break;
    }
  }
  if (n == 1) {
    out += "single recorded stage; nothing to compare\n";
  } else if (first_stable == n - 1) {
    out += "recorded states keep moving through the final stage\n";
  } else {
    out += "recorded tail stable from stage " + to_string(f.stages[first_stable].stage) + " on\n";
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::parse_error, "cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::validation_error, "cannot open file '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) fail(Errc::validation_error, "failed writing file '" + path + "'");
}

}  // namespace tfx
