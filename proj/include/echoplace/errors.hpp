#pragma once

#include <stdexcept>
#include <string>

namespace echoplace {

// Exit codes used by the CLI; one class per failure family.
enum class Errc : int {
  ok = 0,
  usage = 2,
  config_not_found = 3,
  parse = 4,
  validation = 5,
  solver = 6,
  model_validity = 7,
  io = 8,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const { return code_; }
  int exit_code() const { return static_cast<int>(code_); }

 private:
  Errc code_;
};

struct ConfigNotFoundError : Error {
  explicit ConfigNotFoundError(const std::string& m) : Error(Errc::config_not_found, m) {}
};
struct ParseError : Error {
  explicit ParseError(const std::string& m) : Error(Errc::parse, m) {}
};
struct ValidationError : Error {
  explicit ValidationError(const std::string& m) : Error(Errc::validation, m) {}
};
struct SolverError : Error {
  explicit SolverError(const std::string& m) : Error(Errc::solver, m) {}
};
struct ModelValidityError : Error {
  explicit ModelValidityError(const std::string& m) : Error(Errc::model_validity, m) {}
};
struct IoError : Error {
  explicit IoError(const std::string& m) : Error(Errc::io, m) {}
};

}  // namespace echoplace
