#pragma once

#include <stdexcept>
#include <string>

namespace qnclab {

// Bad parameter combination, detected before any work is done.
class InvalidConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// QPF needs a directed route from every node to the gateway; thrown when one
// is missing, naming the offending node.
class RoutingInfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Decoder asked for more measurement rows than the system provides.
class InsufficientMeasurementsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised by the Monte Carlo driver when more than 10% of trials aborted.
class RunFailedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qnclab
