#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cscx {

inline constexpr const char* kVersion = "0.1.0";

// Stable status codes, shared with the C API.  Grouped by failure class so the
// CLI can map them to process exit codes without a per-code table:
//   0       success
//   10..29  precondition / invalid input        -> exit 2
//   30..59  numerical failure                   -> exit 3
//   60..79  I/O failure                         -> exit 4
enum class Status : int {
  Ok = 0,

  InvalidArgument = 10,
  DomainError = 11,
  OutOfRegion = 12,
  WrongDimension = 13,
  UnsupportedGroup = 14,
  NeckCollision = 15,
  InsufficientWindow = 16,
  NoSignChange = 17,
  NegativeVolume = 18,
  SingularMode = 19,

  DegenerateMetric = 30,
  NewtonDivergence = 31,
  FixedPointDivergence = 32,
  IntegrationFailure = 33,
  NonConvergence = 34,
  BranchViolation = 35,
  IllConditionedFit = 36,
  SingularMatrix = 37,
  VerifyMismatch = 38,

  IoError = 60,
};

inline int status_exit_class(Status s) {
  const int c = static_cast<int>(s);
  if (c == 0) return 0;
  if (c < 30) return 2;
  if (c < 60) return 3;
  return 4;
}

class Error : public std::runtime_error {
 public:
  Error(Status status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  Status status() const { return status_; }

 private:
  Status status_;
};

[[noreturn]] inline void fail(Status s, const std::string& msg) { throw Error(s, msg); }

inline void require(bool cond, Status s, const std::string& msg) {
  if (!cond) fail(s, msg);
}

// FNV-1a, used for input/output fingerprints in run manifests.
inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

}  // namespace cscx
