#pragma once

#include <stdexcept>

namespace jigsaw {

// Base of every error thrown by this library. kind() returns the stable
// class name so reports and exit-code mapping never depend on what().
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
    virtual const char* kind() const { return "Error"; }
};

#define JIGSAW_DEFINE_ERROR(Name)                                             \
    struct Name : Error {                                                     \
        using Error::Error;                                                   \
        const char* kind() const override { return #Name; }                   \
    }

JIGSAW_DEFINE_ERROR(WidthError);          // block width mismatch or invalid width
JIGSAW_DEFINE_ERROR(NotInvertibleError);  // even value mod 2^ps
JIGSAW_DEFINE_ERROR(EmbedError);          // framed part does not fit / bad offset
JIGSAW_DEFINE_ERROR(FramingError);        // no sentinel pair in an unmasked block
JIGSAW_DEFINE_ERROR(PartSizeError);       // part exceeds ps-2 bits or too many parts
JIGSAW_DEFINE_ERROR(KeyFileError);        // bad magic/version/truncated key file
JIGSAW_DEFINE_ERROR(DesyncError);         // key schedules diverged; session poisoned
JIGSAW_DEFINE_ERROR(MalformedPacket);     // bad magic/version/flags/length on the wire
JIGSAW_DEFINE_ERROR(AuthFailure);         // MAC tag mismatch
JIGSAW_DEFINE_ERROR(SessionExhausted);    // u64 sequence space used up
JIGSAW_DEFINE_ERROR(TransportError);      // socket/IO failure
JIGSAW_DEFINE_ERROR(TruncationError);     // stream ended with gaps or mid-message

#undef JIGSAW_DEFINE_ERROR

} // namespace jigsaw
