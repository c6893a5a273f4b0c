#ifndef CAT0_ERRORS_HPP
#define CAT0_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cat0 {

/// A documented precondition of an operation does not hold for the given input
/// (e.g. a flat-sector check requested for rays at angle pi).
class PreconditionError : public std::runtime_error {
public:
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// The operation is not defined for this model / descriptor combination.
class UnsupportedError : public std::runtime_error {
public:
    explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

/// A sequence that was required to converge (or diverge) did not.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::size_t index)
        : std::runtime_error(what), index_(index) {}

    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

}  // namespace cat0

#endif
