#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bib/analysis.hpp"

namespace bib {

// 17 significant digits; +inf is written as "inf".
std::string format_double(double value);
double parse_double(const std::string& text);

inline constexpr const char* kTraceHeader = "t,d,eta,theta,phi,sigma,alpha,reset,active";

void write_trace_csv(std::ostream& out, const Trace& trace);
Trace read_trace_csv(std::istream& in);

// One positive integer per line; a non-numeric first line is taken as a header.
std::vector<std::int64_t> read_durations_csv(std::istream& in);
void write_durations_csv(std::ostream& out, const std::vector<std::int64_t>& values);

// File helpers that throw Error(kIo).
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace bib
