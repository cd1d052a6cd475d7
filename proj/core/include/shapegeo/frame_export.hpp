#pragma once

#include "shapegeo/diagnostics.hpp"

#include <string>
#include <vector>

namespace shapegeo {

/// shortest decimal representation that parses back to the same double
std::string format_double(double value);

/// one OBJ per frame ("frame_000000.obj", ...): vertices grid-major, quad
/// cells split into two triangles, deterministic byte-for-byte output
void write_obj(const Immersion& f, const std::string& path);
std::vector<std::string> export_frames(const std::vector<GeodesicState>& trajectory,
                                       const std::string& dir);

/// diagnostics.csv: header + one row per record, round-trip precision
void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records,
                           const std::string& path);

}  // namespace shapegeo
