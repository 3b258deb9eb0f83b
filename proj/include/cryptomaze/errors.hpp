#pragma once

#include <stdexcept>
#include <string>

namespace cryptomaze {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define CRYPTOMAZE_ERROR(Name)              \
    class Name : public Error {             \
    public:                                 \
        using Error::Error;                 \
    }

// group-crypto
CRYPTOMAZE_ERROR(AuthFailure);
CRYPTOMAZE_ERROR(EncodingError);

// pcn-model
CRYPTOMAZE_ERROR(ParseError);
CRYPTOMAZE_ERROR(ValidationError);
CRYPTOMAZE_ERROR(InvalidParam);
CRYPTOMAZE_ERROR(InsufficientCapacity);
CRYPTOMAZE_ERROR(TopologyMismatch);

// routing
CRYPTOMAZE_ERROR(NoRoute);
CRYPTOMAZE_ERROR(InconsistentFlows);
CRYPTOMAZE_ERROR(CyclicFlow);

// sender
CRYPTOMAZE_ERROR(DegenerateEdgeSet);
CRYPTOMAZE_ERROR(MissingKey);

// scriptless lock
CRYPTOMAZE_ERROR(DuplicateSession);
CRYPTOMAZE_ERROR(AlreadyLocked);
CRYPTOMAZE_ERROR(NoKey);
CRYPTOMAZE_ERROR(NotLocked);

// adversary analysis
CRYPTOMAZE_ERROR(InvalidColluderPlacement);
CRYPTOMAZE_ERROR(InsufficientTrials);

// bench
CRYPTOMAZE_ERROR(ConfigError);

#undef CRYPTOMAZE_ERROR

}  // namespace cryptomaze
