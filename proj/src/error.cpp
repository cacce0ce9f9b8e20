#include "bib/error.hpp"

namespace bib {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "invalid_argument";
    case Errc::kInvalidConfig: return "invalid_config";
    case Errc::kInsufficientData: return "insufficient_data";
    case Errc::kDegenerate: return "degenerate";
    case Errc::kParse: return "parse_error";
    case Errc::kIo: return "io_error";
  }
  return "unknown";
}

}  // namespace bib
