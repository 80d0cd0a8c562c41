#ifndef SLRKIT_ERROR_HPP
#define SLRKIT_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace slrkit {

enum class ErrorKind {
    InvalidGraph,
    NotComposable,
    TypeMismatch,
    ArityMismatch,
    NotDisjoint,
    Incompatible,
    TooLarge,
    SyntaxError,
    ArityError,
    UndeclaredSymbol,
    ReservedLabel,
    NotRegular,
    NotEqualityFree,
    NotRigid,
    EmptyLanguage,
    UnknownRule,
    NonFunctionalScheme,
    AlphabetMismatch,
    Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace slrkit

#endif
