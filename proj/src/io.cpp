#include "bib/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "bib/error.hpp"

namespace bib {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

std::int64_t parse_int(const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(text.c_str(), &end, 10);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
    throw Error(Errc::kParse, "not an integer: '" + text + "'");
  }
  return v;
}

bool parse_flag(const std::string& text) {
  if (text == "0") return false;
  if (text == "1") return true;
  throw Error(Errc::kParse, "expected 0 or 1, got '" + text + "'");
}

}  // namespace

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_double(const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw Error(Errc::kParse, "not a number: '" + text + "'");
  }
  return v;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << kTraceHeader << '\n';
  for (const StepRecord& r : trace.records) {
    out << r.t << ',' << format_double(r.d) << ',' << format_double(r.eta) << ','
        << format_double(r.theta) << ',' << format_double(r.phi) << ','
        << format_double(r.sigma) << ',' << format_double(r.alpha) << ','
        << (r.reset ? 1 : 0) << ',' << (r.active ? 1 : 0) << '\n';
  }
}

Trace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip(line) != kTraceHeader) {
    throw Error(Errc::kParse, std::string("trace must start with header '") + kTraceHeader + "'");
  }
  std::vector<StepRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) {
      throw Error(Errc::kParse, "line " + std::to_string(line_no) + ": expected 9 fields, got " +
                                    std::to_string(f.size()));
    }
    try {
      StepRecord r;
      r.t = parse_int(f[0]);
      r.d = parse_double(f[1]);
      r.eta = parse_double(f[2]);
      r.theta = parse_double(f[3]);
      r.phi = parse_double(f[4]);
      r.sigma = parse_double(f[5]);
      r.alpha = parse_double(f[6]);
      r.reset = parse_flag(f[7]);
      r.active = parse_flag(f[8]);
      records.push_back(r);
    } catch (const Error& e) {
      throw Error(Errc::kParse, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  Trace trace = Trace::from_records(std::move(records));
  try {
    trace.validate();
  } catch (const Error& e) {
    throw Error(Errc::kParse, e.what());
  }
  return trace;
}

std::vector<std::int64_t> read_durations_csv(std::istream& in) {
  std::vector<std::int64_t> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;
    try {
      out.push_back(parse_int(line));
    } catch (const Error&) {
      if (line_no == 1) continue;  // header
      throw Error(Errc::kParse, "line " + std::to_string(line_no) + ": not an integer duration");
    }
  }
  return out;
}

void write_durations_csv(std::ostream& out, const std::vector<std::int64_t>& values) {
  out << "duration\n";
  for (std::int64_t v : values) out << v << '\n';
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIo, "cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out) throw Error(Errc::kIo, "write to '" + path.string() + "' failed");
}

}  // namespace bib
