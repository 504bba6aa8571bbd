#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cfkit {

// Root of every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- surface language -----------------------------------------------------

struct ParseError : Error {
  int line;
  int col;
  ParseError(int line, int col, const std::string& msg)
      : Error("parse error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
};

// Function signature does not match any accepted latent layout.
struct MalformedSignature : Error {
  using Error::Error;
};

// ---- evaluation -----------------------------------------------------------

struct EvalError : Error {
  using Error::Error;
};

// Statement budget ran out before the function returned.
struct FuelExhausted : EvalError {
  FuelExhausted() : EvalError("statement budget exhausted") {}
};

// Division/modulo by zero or a value outside the magnitude cap.
struct ArithmeticError : EvalError {
  using EvalError::EvalError;
};

// `a ** b` with b < 0 has no integer result.
struct NegativeExponent : EvalError {
  NegativeExponent() : EvalError("negative exponent in integer power") {}
};

// Control flow fell off the end without hitting the trailing return.
struct MissingReturn : EvalError {
  MissingReturn() : EvalError("function ended without returning") {}
};

struct UnboundVariable : EvalError {
  explicit UnboundVariable(const std::string& name)
      : EvalError("unbound variable: " + name) {}
};

// ---- templates and generation ----------------------------------------------

// A filled template failed to parse or violated a template contract.
struct InstantiationError : Error {
  using Error::Error;
};

// No template available for a requested family/split combination.
struct TemplateGap : Error {
  using Error::Error;
};

// Retry budget ran out before the requested batch was produced.
struct GenerationExhausted : Error {
  using Error::Error;
};

// ---- oracle ----------------------------------------------------------------

// The abduction grid is larger than the enumeration cap.
struct EnumerationCapExceeded : Error {
  using Error::Error;
};

// No latent assignment reproduces the observed output.
struct AbductionEmpty : Error {
  using Error::Error;
};

// Every counterfactual branch evaluation failed; the instance is unusable.
struct AllBranchesFailed : Error {
  using Error::Error;
};

// Retry budget ran out while assembling problem instances.
struct AssemblyExhausted : Error {
  using Error::Error;
};

// ---- word problems ----------------------------------------------------------

// A sampled scenario produced a non-positive quantity or price.
struct NegativeQuantity : Error {
  using Error::Error;
};

// ---- store / grading / CLI ---------------------------------------------------

struct SchemaVersionMismatch : Error {
  using Error::Error;
};

struct MalformedRecord : Error {
  int line_number;
  MalformedRecord(int line_number, const std::string& msg)
      : Error("line " + std::to_string(line_number) + ": " + msg), line_number(line_number) {}
};

// Grading input lacks responses for some problem ids.
struct MissingResponses : Error {
  std::vector<std::string> ids;
  explicit MissingResponses(std::vector<std::string> missing)
      : Error("missing responses for " + std::to_string(missing.size()) + " problem id(s)"),
        ids(std::move(missing)) {}
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace cfkit
