#include "qds/io.hpp"

#include <fstream>
#include <sstream>

#include "qds/errors.hpp"

namespace qds::io {

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw ParseError(what + ": syntax error at line " + std::to_string(line) + ", column " +
                     std::to_string(col) + ": " + e.what());
  }
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError(what + ": expected a number");
  return j.get<double>();
}

CVector vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": expected an array");
  CVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = complex_from_json(j[i]);
  return v;
}

Index parse_index(const std::string& token, Index dim) {
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(token, &used);
  } catch (const std::exception&) {
    throw ParseError("invalid subspace index '" + token + "'");
  }
  if (used != token.size()) throw ParseError("invalid subspace index '" + token + "'");
  if (value < 1 || value > dim) {
    throw ParseError("subspace index " + token + " out of range 1.." + std::to_string(dim));
  }
  return static_cast<Index>(value - 1);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {number(j[0], "real part"), number(j[1], "imaginary part")};
  throw ParseError("complex entry must be a number or a pair [re, im], got " + j.dump());
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix parse_matrix(const json& j) {
  const json& rows = (j.is_object() && j.contains("matrix")) ? j.at("matrix") : j;
  if (!rows.is_array() || rows.empty()) throw ParseError("matrix must be a non-empty array of rows");
  const std::size_t n = rows.size();
  CMatrix m(static_cast<Index>(n), static_cast<Index>(rows[0].is_array() ? rows[0].size() : 0));
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i].is_array() || rows[i].size() != static_cast<std::size_t>(m.cols())) {
      throw DimensionError("matrix row " + std::to_string(i + 1) + " has the wrong length");
    }
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      m(static_cast<Index>(i), static_cast<Index>(k)) = complex_from_json(rows[i][k]);
    }
  }
  return m;
}

ChannelFile parse_channel(const std::string& text) {
  const json j = parse_json(text, "channel file");
  if (!j.is_object()) throw ParseError("channel file: top level must be an object");
  if (j.contains("schema") && j.at("schema") != kChannelSchema) {
    throw ParseError("channel file: unsupported schema " + j.at("schema").dump());
  }
  if (!j.contains("dim") || !j.at("dim").is_number_integer() || j.at("dim").get<long>() < 1) {
    throw ParseError("channel file: 'dim' must be a positive integer");
  }
  if (!j.contains("kraus") || !j.at("kraus").is_array() || j.at("kraus").empty()) {
    throw ParseError("channel file: 'kraus' must be a non-empty list of matrices");
  }
  ChannelFile file;
  file.dim = j.at("dim").get<Index>();
  for (std::size_t k = 0; k < j.at("kraus").size(); ++k) {
    CMatrix m = parse_matrix(j.at("kraus")[k]);
    if (m.rows() != file.dim || m.cols() != file.dim) {
      throw DimensionError("channel file: Kraus operator " + std::to_string(k + 1) + " is " +
                           std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", expected " +
                           std::to_string(file.dim) + "x" + std::to_string(file.dim));
    }
    file.kraus.push_back(std::move(m));
  }
  if (j.contains("metadata") && j.at("metadata").is_object()) {
    const json& md = j.at("metadata");
    ChannelMetadata meta;
    meta.name = md.value("name", "");
    meta.description = md.value("description", "");
    if (md.contains("gammas")) {
      for (const auto& g : md.at("gammas")) meta.gammas.push_back(number(g, "metadata gamma"));
    }
    file.metadata = std::move(meta);
  }
  return file;
}

ChannelFile read_channel(const std::filesystem::path& path) { return parse_channel(read_text(path)); }

std::string write_channel(const ChannelFile& file) {
  json j;
  j["schema"] = kChannelSchema;
  j["dim"] = file.dim;
  j["kraus"] = json::array();
  for (const auto& m : file.kraus) j["kraus"].push_back(matrix_to_json(m));
  if (file.metadata) {
    j["metadata"] = {{"name", file.metadata->name},
                     {"description", file.metadata->description},
                     {"gammas", file.metadata->gammas}};
  }
  return j.dump() + "\n";
}

SubspaceBasis parse_subspace(const std::string& raw, Index dim) {
  const std::string spec = trim(raw);
  if (spec.empty()) throw ParseError("empty subspace specification");
  if (spec.front() == '@') {
    const std::filesystem::path path = spec.substr(1);
    const json j = parse_json(read_text(path), "subspace file '" + path.string() + "'");
    const json& list = (j.is_object() && j.contains("vectors")) ? j.at("vectors") : j;
    if (!list.is_array() || list.empty()) throw ParseError("subspace file: expected a list of vectors");
    CMatrix vectors(dim, static_cast<Index>(list.size()));
    for (std::size_t c = 0; c < list.size(); ++c) {
      CVector v = vector_from_json(list[c], "subspace vector");
      if (v.size() != dim) {
        throw DimensionError("subspace vector " + std::to_string(c + 1) + " has length " +
                             std::to_string(v.size()) + ", expected " + std::to_string(dim));
      }
      vectors.col(static_cast<Index>(c)) = v;
    }
    SubspaceBasis s = SubspaceBasis::span_of(vectors);
    if (s.dim() != vectors.cols()) throw ParseError("subspace file: vectors are linearly dependent");
    return s;
  }
  std::vector<Index> indices;
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) indices.push_back(parse_index(trim(token), dim));
  try {
    return SubspaceBasis::axes(dim, indices);
  } catch (const Error& e) {
    throw ParseError(std::string("subspace '") + spec + "': " + e.what());
  }
}

std::vector<SubspaceBasis> parse_subspace_parts(const std::string& spec, Index dim) {
  std::vector<SubspaceBasis> parts;
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ';')) {
    if (trim(token).empty()) continue;
    parts.push_back(parse_subspace(token, dim));
  }
  if (parts.empty()) throw ParseError("no subspace parts in '" + spec + "'");
  return parts;
}

DensityOperator read_state(const std::filesystem::path& path, Index dim) {
  const CMatrix m = parse_matrix(parse_json(read_text(path), "state file '" + path.string() + "'"));
  if (m.rows() != dim || m.cols() != dim) {
    throw DimensionError("state is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         ", channel dimension is " + std::to_string(dim));
  }
  try {
    return DensityOperator(m);
  } catch (const PreconditionError& e) {
    throw ParseError(std::string("state file: ") + e.what());
  }
}

json subspace_to_json(const SubspaceBasis& s) {
  json j;
  j["dim"] = s.dim();
  j["basis"] = matrix_to_json(s.basis());
  j["projector"] = matrix_to_json(s.projector());
  if (const auto idx = s.axis_indices()) {
    json list = json::array();
    for (Index i : *idx) list.push_back(i + 1);
    j["indices"] = std::move(list);
  }
  return j;
}

std::string format_subspace(const SubspaceBasis& s) {
  if (const auto idx = s.axis_indices()) {
    std::string out = "{";
    for (std::size_t i = 0; i < idx->size(); ++i) {
      if (i > 0) out += ",";
      out += std::to_string((*idx)[i] + 1);
    }
    return out + "}";
  }
  return "span(dim " + std::to_string(s.dim()) + ")";
}

}  // namespace qds::io
