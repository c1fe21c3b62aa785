#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace flowrefine {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RangeError : public Error { public: using Error::Error; };
class DomainError : public Error { public: using Error::Error; };
class EmptyError : public Error { public: using Error::Error; };
class MergeError : public Error { public: using Error::Error; };
class BoundsError : public Error { public: using Error::Error; };
class InterfaceError : public Error { public: using Error::Error; };
class CompositionError : public Error { public: using Error::Error; };
class LookupError : public Error { public: using Error::Error; };

/// A located diagnostic produced while reading a document.
struct Diagnostic {
    std::size_t line = 0;
    std::size_t column = 0;
    std::string message;
};

class ParseError : public Error {
public:
    explicit ParseError(std::vector<Diagnostic> diagnostics);

    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

} // namespace flowrefine
