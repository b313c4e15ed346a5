#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace attackqa::gateway {

using Vector = std::vector<double>;

/// Worth retrying: connection failures, timeouts, 429 and 5xx responses.
struct TransientError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Not worth retrying: bad credentials, 4xx bodies, malformed responses.
struct FatalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Wire-level access to one endpoint. Implementations must be safe to call
/// from several threads at once.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string complete(const std::string& prompt) = 0;
    virtual std::vector<Vector> embed(const std::vector<std::string>& texts) = 0;
};

}  // namespace attackqa::gateway
