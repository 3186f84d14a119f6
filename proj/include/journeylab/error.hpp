#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace journeylab {

// Base of every error the library throws. The CLI maps subclasses onto exit
// codes through is_input_error().
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error { using Error::Error; };
class DegenerateEmbeddingError : public Error { using Error::Error; };
class IndexError : public Error { using Error::Error; };
class DatasetError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class BudgetExhaustedError : public Error { using Error::Error; };
class ContractError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

// Malformed .emb payload; offset is the byte position where parsing failed.
class FormatError : public Error {
public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

private:
  std::uint64_t offset_;
};

// Errors caused by bad configuration or input data rather than a runtime fault.
inline bool is_input_error(const std::exception& e) {
  return dynamic_cast<const ConfigError*>(&e) != nullptr ||
         dynamic_cast<const DatasetError*>(&e) != nullptr ||
         dynamic_cast<const FormatError*>(&e) != nullptr;
}

// Class name of a library error, for diagnostics.
inline const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const FormatError*>(&e)) return "FormatError";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const DatasetError*>(&e)) return "DatasetError";
  if (dynamic_cast<const DimensionError*>(&e)) return "DimensionError";
  if (dynamic_cast<const DegenerateEmbeddingError*>(&e)) return "DegenerateEmbeddingError";
  if (dynamic_cast<const IndexError*>(&e)) return "IndexError";
  if (dynamic_cast<const BudgetExhaustedError*>(&e)) return "BudgetExhaustedError";
  if (dynamic_cast<const ContractError*>(&e)) return "ContractError";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  return "Error";
}

}  // namespace journeylab
