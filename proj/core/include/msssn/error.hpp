#pragma once

#include <stdexcept>
#include <string>

namespace msssn {

/// Base for every error raised by the simulator. Callers that only want to
/// distinguish "our" failures from std ones catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define MSSSN_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                    \
    public:                                                        \
        explicit Name(const std::string& what) : Error(what) {}    \
    }

// sim-core
MSSSN_DEFINE_ERROR(SchedulingInPast);
MSSSN_DEFINE_ERROR(InvalidBound);

// world / radio
MSSSN_DEFINE_ERROR(NodeDead);
MSSSN_DEFINE_ERROR(OutOfRange);
MSSSN_DEFINE_ERROR(InvalidArgument);
MSSSN_DEFINE_ERROR(Busy);
MSSSN_DEFINE_ERROR(WrongChannel);

// sensor plane
MSSSN_DEFINE_ERROR(Detached);
MSSSN_DEFINE_ERROR(EmptyRegion);

// sink plane
MSSSN_DEFINE_ERROR(NoRoute);
MSSSN_DEFINE_ERROR(PathBroken);
MSSSN_DEFINE_ERROR(NoSinkAvailable);

// mobility
MSSSN_DEFINE_ERROR(UnknownModel);
MSSSN_DEFINE_ERROR(NonPositiveLength);

// localization
MSSSN_DEFINE_ERROR(InsufficientAnchors);
MSSSN_DEFINE_ERROR(CollinearAnchors);

// scenario
MSSSN_DEFINE_ERROR(ParseError);

#undef MSSSN_DEFINE_ERROR

}  // namespace msssn
