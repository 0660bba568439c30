#pragma once
#include <stdexcept>
#include <string>

namespace dcu {

// Error taxonomy. Everything derives from Error so callers can catch
// the whole family; the CLI maps Error subtypes to exit codes.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParamError : Error { using Error::Error; };          // bad numeric parameter
struct CatalogueError : Error { using Error::Error; };      // unknown catalogue tag
struct ClassError : Error { using Error::Error; };          // growth class mismatch / no certificate
struct DomainError : Error { using Error::Error; };         // point outside an effective domain
struct GridError : Error { using Error::Error; };           // unusable grid (too few finite points, not increasing)
struct RangeError : Error { using Error::Error; };          // query outside tabulated range
struct CapacityError : Error { using Error::Error; };       // ensemble size over the configured cap
struct BlowupError : Error { using Error::Error; };         // non-finite state in a forward/backward sweep
struct OracleError : Error { using Error::Error; };         // closed-form oracle not available for the request
struct AttainabilityError : Error { using Error::Error; };  // candidate optimal control leaves dom(f)
struct InputError : Error { using Error::Error; };          // malformed input (empty sample set, bad CSV, bad config)
struct RejectedControl : Error { using Error::Error; };     // control without a declared bound

} // namespace dcu
