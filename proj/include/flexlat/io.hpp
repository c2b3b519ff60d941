#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "flexlat/complex.hpp"
#include "flexlat/flex.hpp"
#include "flexlat/gramset.hpp"
#include "flexlat/realization.hpp"
#include "flexlat/reduction.hpp"

namespace flexlat {

class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Contents of a surface file: the complex, optionally a realization, and
/// optionally target squared lengths (otherwise taken from the realization).
struct SurfaceDocument {
  PeriodicComplex complex;
  std::optional<Realization> realization;
  std::optional<EdgeLengths> lengths;
};

nlohmann::json to_json(const PeriodicComplex& c);
PeriodicComplex complex_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Realization& r);
Realization realization_from_json(const nlohmann::json& j, int n_orbits);

nlohmann::json to_json(const SurfaceDocument& doc);
SurfaceDocument document_from_json(const nlohmann::json& j);

std::string write_document(const SurfaceDocument& doc);
/// Throws FormatError on malformed text or structure.
SurfaceDocument read_document(const std::string& text);

/// "%.17g"
std::string format_double(double x);

/// Columns t, g11, g12, g22, residual_norm, then the chart coordinates
/// q0, q1, ... when `with_coords`.
std::string path_to_csv(const FlexPath& path, bool with_coords);

struct TraceRow {
  double t = 0.0;
  GramMatrix g;
  double residual_norm = 0.0;
};
/// Throws FormatError.
std::vector<TraceRow> rows_from_csv(const std::string& text);

nlohmann::json to_json(const PolyRelation& rel);
nlohmann::json to_json(const ReductionTrace& trace);
nlohmann::json to_json(const BaseCaseStructure& s);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t x);

std::string read_file(const std::string& path);
/// Writes to a temporary file in the same directory, then renames.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace flexlat
