// Library version and reproducibility identifiers.
//
// Every machine-readable report embeds kVersion and kGeneratorId so that
// archived results name the exact code and random-number contract that
// produced them.
#pragma once

namespace seqdetect {

inline constexpr const char* kVersion = "0.1.0";

// Identifies the random-draw contract: engine / normal-transform / revision.
// Bump the suffix if the draw sequence for a fixed (seed, stream) ever
// changes; archived seeds are only replayable against the same identity.
inline constexpr const char* kGeneratorId = "mt19937_64/boxmuller-v1";

}  // namespace seqdetect
