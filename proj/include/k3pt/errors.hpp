#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace k3pt {

/// Base of every error raised by the library. `kind()` is the stable typed
/// name surfaced by the command-line tool.
class Error : public std::runtime_error {
public:
  Error(std::string_view kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] std::string_view kind() const noexcept { return kind_; }

private:
  std::string_view kind_;
};

#define K3PT_DEFINE_ERROR(Name)                                                \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string &what) : Error(#Name, what) {}             \
  };

K3PT_DEFINE_ERROR(WindowViolation)
K3PT_DEFINE_ERROR(EffectivityError)
K3PT_DEFINE_ERROR(MonoidError)
K3PT_DEFINE_ERROR(NotAUnit)
K3PT_DEFINE_ERROR(NonNilpotentTail)
K3PT_DEFINE_ERROR(NonTerminatingProduct)
K3PT_DEFINE_ERROR(IllFormedPushforward)
K3PT_DEFINE_ERROR(IncompletePushforward)
K3PT_DEFINE_ERROR(DomainError)
K3PT_DEFINE_ERROR(ParseError)
K3PT_DEFINE_ERROR(DuplicateKey)
K3PT_DEFINE_ERROR(InsufficientFiberTable)
K3PT_DEFINE_ERROR(InsufficientWindow)
K3PT_DEFINE_ERROR(NotIrreducible)

#undef K3PT_DEFINE_ERROR

} // namespace k3pt
