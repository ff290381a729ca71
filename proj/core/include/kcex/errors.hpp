#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace kcex {

/// Base class for every error the library raises. `name()` is a stable
/// machine-readable tag used by the CLI for exit-code mapping and reports.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define KCEX_DEFINE_ERROR(Type)                                        \
    struct Type : Error {                                              \
        explicit Type(const std::string& w) : Error(#Type, w) {}       \
    }

KCEX_DEFINE_ERROR(InvalidGeometry);
KCEX_DEFINE_ERROR(MeshTooCoarse);
KCEX_DEFINE_ERROR(DimensionMismatch);
KCEX_DEFINE_ERROR(PointLocationFailure);
KCEX_DEFINE_ERROR(NoConvergence);
KCEX_DEFINE_ERROR(DomainOrderViolation);
KCEX_DEFINE_ERROR(NoAdmissibleTau);
KCEX_DEFINE_ERROR(EmptyInterval);
KCEX_DEFINE_ERROR(PositivityFailure);
KCEX_DEFINE_ERROR(BracketFailure);
KCEX_DEFINE_ERROR(PreconditionViolated);
KCEX_DEFINE_ERROR(OutOfRange);
KCEX_DEFINE_ERROR(ConfigError);

#undef KCEX_DEFINE_ERROR

} // namespace kcex
