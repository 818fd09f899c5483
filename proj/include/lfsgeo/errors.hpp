#pragma once

#include <stdexcept>
#include <string>

namespace lfsgeo {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define LFSGEO_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                     \
    public:                                                         \
        explicit Name(const std::string& what) : Error(what) {}     \
    }

LFSGEO_DEFINE_ERROR(DimensionMismatch);
LFSGEO_DEFINE_ERROR(InvalidOrder);
LFSGEO_DEFINE_ERROR(ZeroSpan);
LFSGEO_DEFINE_ERROR(DomainError);
LFSGEO_DEFINE_ERROR(UnsupportedShape);
LFSGEO_DEFINE_ERROR(Unreachable);
LFSGEO_DEFINE_ERROR(OracleUnavailable);
LFSGEO_DEFINE_ERROR(DegenerateNeighborhood);
LFSGEO_DEFINE_ERROR(NoConvergence);
LFSGEO_DEFINE_ERROR(CodimensionUnsupported);
LFSGEO_DEFINE_ERROR(PreimageNotFound);
LFSGEO_DEFINE_ERROR(ConfigError);

#undef LFSGEO_DEFINE_ERROR

} // namespace lfsgeo
