#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qds/channel.hpp"
#include "qds/linalg.hpp"

namespace qds::io {

using nlohmann::json;

inline constexpr const char* kChannelSchema = "qchan/1";
inline constexpr const char* kReportSchema = "qds-report/1";

struct ChannelMetadata {
  std::string name;
  std::string description;
  std::vector<double> gammas;
};

struct ChannelFile {
  Index dim = 0;
  std::vector<CMatrix> kraus;
  std::optional<ChannelMetadata> metadata;
};

// JSON text -> ChannelFile. Throws ParseError (with line/column for syntax
// errors) and DimensionError for shape mismatches.
ChannelFile parse_channel(const std::string& text);
ChannelFile read_channel(const std::filesystem::path& path);
std::string write_channel(const ChannelFile& file);

// Comma-separated 1-based indices, or "@path" to a JSON list of vectors
// (optionally wrapped as {"vectors": [...]}) that is orthonormalized on load.
SubspaceBasis parse_subspace(const std::string& spec, Index dim);
// Parts separated by ';'.
std::vector<SubspaceBasis> parse_subspace_parts(const std::string& spec, Index dim);

// Dense matrix as a bare array of rows or {"matrix": [...]}.
CMatrix parse_matrix(const json& j);
DensityOperator read_state(const std::filesystem::path& path, Index dim);

json complex_to_json(Complex z);
Complex complex_from_json(const json& j);
json matrix_to_json(const CMatrix& m);
// Basis, projector and, when axis-aligned, the 1-based index set.
json subspace_to_json(const SubspaceBasis& s);

// "{1,3,5}" for axis-aligned subspaces, "span(dim k)" otherwise.
std::string format_subspace(const SubspaceBasis& s);

}  // namespace qds::io
