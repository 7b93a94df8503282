#pragma once

#include <stdexcept>
#include <string>

namespace lexiboost {

// Exception taxonomy. The CLI maps each family onto an exit code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
public:
  using Error::Error;
};

class DataError : public Error {
public:
  using Error::Error;
};

class SolverError : public Error {
public:
  using Error::Error;
};

} // namespace lexiboost
