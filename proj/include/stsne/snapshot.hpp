#pragma once

#include <iosfwd>
#include <string>

#include "stsne/pipeline.hpp"

namespace stsne {

/// JSON-shaped structured text, one snapshot per file. Stable field order
/// and shortest round-trip floats keep identical runs byte-identical.
void write_snapshot(std::ostream& out, const ProjectionSnapshot& snap);
ProjectionSnapshot read_snapshot(std::istream& in);

/// Convenience file wrappers; write creates/truncates `path`.
void write_snapshot_file(const std::string& path, const ProjectionSnapshot& snap);
ProjectionSnapshot read_snapshot_file(const std::string& path);

bool snapshot_equal(const ProjectionSnapshot& a, const ProjectionSnapshot& b);

}  // namespace stsne
