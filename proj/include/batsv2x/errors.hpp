#pragma once
#include <stdexcept>
#include <string>

namespace batsv2x {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DistanceTooSmall : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct EmptyBatchBuffer : Error { using Error::Error; };
struct InconsistentState : Error { using Error::Error; };
struct InfeasibleLP : Error { using Error::Error; };
struct Infeasible : Error { using Error::Error; };
struct NoProgress : Error { using Error::Error; };
struct AllVehiclesLeft : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

} // namespace batsv2x
