#pragma once

#include <stdexcept>
#include <string>

namespace nuweak {

// Post-selection overlap below the configured floor: the weak value diverges
// and doubles carry no significance past this point.
class near_orthogonal_error : public std::domain_error {
 public:
  explicit near_orthogonal_error(const std::string& what)
      : std::domain_error(what) {}
};

// Malformed or inconsistent scan configuration; the message carries the key
// path of the offending entry.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure during a scan; the message carries the (L, E) coordinates
// of the failing grid point.
class scan_numeric_error : public std::runtime_error {
 public:
  explicit scan_numeric_error(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace nuweak
