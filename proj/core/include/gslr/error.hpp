#pragma once

#include <stdexcept>
#include <string>

namespace gslr {

/// Raised when a caller breaks an operation's preconditions (shape, channel
/// count, parameter range).
class ContractError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the reconstruction loop on divergence or non-finite iterates.
class SolverError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool cond, const std::string &what)
{
  if (!cond)
    throw ContractError(what);
}
} // namespace detail

} // namespace gslr
