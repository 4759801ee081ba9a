#pragma once

#include <stdexcept>
#include <string>

namespace omega {

/// Root of every error raised by the kernel.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a numeric or structural limit stops a computation before it
/// can produce an exact answer. Callers map these to "inconclusive", never to
/// a verdict.
class limit_error : public error {
public:
    using error::error;
};

class domain_error : public error {
public:
    using error::error;
};

class zero_test_inconclusive : public limit_error {
public:
    using limit_error::limit_error;
};

class budget_exhausted : public limit_error {
public:
    using limit_error::limit_error;
};

class depth_exceeded : public limit_error {
public:
    using limit_error::limit_error;
};

class zero_series : public error {
public:
    using error::error;
};

class not_positive : public error {
public:
    using error::error;
};

class not_purely_infinite : public error {
public:
    using error::error;
};

class not_above_reals : public error {
public:
    using error::error;
};

class precondition_violated : public error {
public:
    precondition_violated(std::string which, const std::string &what)
        : error(what), which_(std::move(which)) {}

    const std::string &which() const noexcept { return which_; }

private:
    std::string which_;
};

} // namespace omega
