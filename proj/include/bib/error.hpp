#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bib {

// Machine-readable failure category. The CLI prints the name next to the
// message so scripts can branch on it.
enum class Errc {
  kInvalidArgument,
  kInvalidConfig,
  kInsufficientData,
  kDegenerate,
  kParse,
  kIo,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace bib
