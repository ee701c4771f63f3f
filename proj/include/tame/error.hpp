#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

namespace tame {

/// Every failure raised by the toolkit carries a stable error code and,
/// where one exists, a machine-readable certificate of what went wrong.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, nlohmann::json certificate = nullptr)
        : std::runtime_error(message), code_(std::move(code)), certificate_(std::move(certificate)) {}

    const std::string& code() const noexcept { return code_; }
    const nlohmann::json& certificate() const noexcept { return certificate_; }

private:
    std::string code_;
    nlohmann::json certificate_;
};

#define TAME_DEFINE_ERROR(Name)                                                                 \
    class Name : public Error {                                                                 \
    public:                                                                                     \
        explicit Name(const std::string& message, nlohmann::json certificate = nullptr)         \
            : Error(#Name, message, std::move(certificate)) {}                                  \
    }

TAME_DEFINE_ERROR(NoSolution);
TAME_DEFINE_ERROR(CycleDetected);
TAME_DEFINE_ERROR(DimensionMismatch);
TAME_DEFINE_ERROR(NotMonotone);
TAME_DEFINE_ERROR(NotCommutative);
TAME_DEFINE_ERROR(NotInterval);
TAME_DEFINE_ERROR(NotClosedClass);
TAME_DEFINE_ERROR(UnknownElement);
TAME_DEFINE_ERROR(Mismatch);
TAME_DEFINE_ERROR(ParseError);
TAME_DEFINE_ERROR(UnresolvedReference);
TAME_DEFINE_ERROR(InvalidArgument);

#undef TAME_DEFINE_ERROR

}  // namespace tame
