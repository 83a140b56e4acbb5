#pragma once

#include <stdexcept>
#include <string>

namespace pmlab {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
  public:
    using Error::Error;
};

class PreconditionError : public Error {
  public:
    using Error::Error;
};

class DimensionError : public Error {
  public:
    using Error::Error;
};

class AnchorError : public Error {
  public:
    using Error::Error;
};

class OrderingError : public Error {
  public:
    using Error::Error;
};

class BoundError : public Error {
  public:
    using Error::Error;
};

class ConfigurationError : public Error {
  public:
    using Error::Error;
};

class DivergenceError : public Error {
  public:
    DivergenceError(const std::string& what, long slice) : Error(what), slice_(slice) {}
    long slice() const { return slice_; }

  private:
    long slice_;
};

class BudgetError : public Error {
  public:
    BudgetError(const std::string& what, int reached) : Error(what), reached_(reached) {}
    // deepest level (or admissible depth) reached before the budget ran out
    int reached() const { return reached_; }

  private:
    int reached_;
};

class ConvergenceError : public Error {
  public:
    using Error::Error;
};

class StencilError : public Error {
  public:
    using Error::Error;
};

#define PMLAB_REQUIRE(cond, Exc, msg)                                                              \
    do {                                                                                           \
        if (!(cond)) throw Exc(msg);                                                               \
    } while (0)

}  // namespace pmlab
