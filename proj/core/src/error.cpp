#include "lupi/error.hpp"

namespace lupi {

DataError::DataError(const std::string& what) : Error(what) {}

DataError::DataError(const std::string& file, long line, const std::string& what)
    : Error(file + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
      file_(file),
      line_(line) {}

}  // namespace lupi
