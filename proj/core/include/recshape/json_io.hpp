#pragma once

#include <string>

#include "recshape/closure.hpp"
#include "recshape/recurrence.hpp"
#include "recshape/spectral.hpp"
#include "recshape/synthesis.hpp"

namespace recshape {

/// Shortest lossless decimal form of a double (up to 17 significant digits).
std::string format_double(double x);

// Wire formats. Field names are part of the contract:
//   recurrence: {"order": h, "coefficients": [...], "initial": [...]}
//   targets:    [[mu, nu], ...]
//   report:     {"classification": ..., "intervals": [[lo, hi], ...],
//                "points": [...], "method": "EXACT"|"EMPIRICAL"}
// Parsers throw JsonParseError naming the offending field.

LinearRecurrence parse_recurrence(const std::string& text);
std::string dump_recurrence(const LinearRecurrence& rec);

TargetIntervals parse_targets(const std::string& text);
std::string dump_targets(const TargetIntervals& targets);

std::string dump_report(const ClosureReport& report);

/// Recurrence JSON extended with a "verification" block (and the plan),
/// still parseable by parse_recurrence.
std::string dump_synthesis(const SynthesisResult& result);

/// Root/dominance summary for the --dump-spectral flag.
std::string dump_spectral(const Decomposition& dec);

}  // namespace recshape
