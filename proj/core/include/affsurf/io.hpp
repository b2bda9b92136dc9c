#pragma once

#include <map>
#include <string>

#include "affsurf/blaschke.hpp"
#include "affsurf/grid_fields.hpp"
#include "affsurf/immersion.hpp"

namespace affsurf {

inline constexpr int kFormatVersion = 1;

// Writes to a sibling temp file and renames it over `path`.
void atomic_write(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// "%.17g"
std::string format_double(double v);

// Header `# x1min x1max x2min x2max n1 n2 eps eta`, then one value per line, x1 fastest.
std::string field_to_csv(const ScalarField2D& f);
ScalarField2D field_from_csv(const std::string& text);
void write_field_csv(const std::string& path, const ScalarField2D& f);
ScalarField2D read_field_csv(const std::string& path);

std::string structure_to_json(const BlaschkeStructure& s);
BlaschkeStructure structure_from_json(const std::string& text);
void write_structure(const std::string& path, const BlaschkeStructure& s);
BlaschkeStructure read_structure(const std::string& path);

std::string sheet_to_json(const ImmersionSheet& sheet);
ImmersionSheet sheet_from_json(const std::string& text);
void write_sheet(const std::string& path, const ImmersionSheet& sheet);
ImmersionSheet read_sheet(const std::string& path);

// Vertices of f row by row, quad faces over cells, 1-based.
std::string sheet_to_obj(const ImmersionSheet& sheet);
// Companion report next to an OBJ file: residuals plus provenance.
std::string mesh_report_json(const ImmersionSheet& sheet, const std::map<std::string, double>& residuals,
                             const std::map<std::string, std::string>& provenance);
void write_obj(const std::string& path, const ImmersionSheet& sheet, const std::map<std::string, double>& residuals = {},
               const std::map<std::string, std::string>& provenance = {});

}  // namespace affsurf
