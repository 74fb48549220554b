#ifndef ISOPOWER_ERRORS_HPP
#define ISOPOWER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace isopower {

// Domain error kinds. The CLI maps these to machine-readable JSON
// ({kind, message, context}) and to exit status 1, except BoundExceeded
// which exits with status 2.
enum class ErrorKind {
    NotPrime,
    DegreeOutOfRange,
    SingularCurve,
    FieldMismatch,
    BoundExceeded,
    BadPrime,
    BadDiscriminant,
    OwnerMismatch,
    NonInvertible,
    DegenerateLattice,
    OwnerNotAbove,
    HasTorsion,
    BaseMismatch,
    DenominatorClash,
    CrossCheckMismatch,
    NotSubring,
    NotGaloisStable,
    SingularMatrix,
    UnsupportedCase,
    UsageError,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message, std::string context = {})
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
          kind_(kind), message_(message), context_(std::move(context)) {}

    ErrorKind kind() const { return kind_; }
    const std::string& message() const { return message_; }
    const std::string& context() const { return context_; }

  private:
    ErrorKind kind_;
    std::string message_;
    std::string context_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message,
                              std::string context = {}) {
    throw Error(kind, message, std::move(context));
}

} // namespace isopower

#endif
