#include "affsurf/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "affsurf/error.hpp"
#include "json.hpp"

namespace affsurf {

using nlohmann::json;

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) throw ValidationError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw ValidationError("cannot move output into place at '" + path + "'");
    }
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

json grid_json(const Grid2& g) {
    return {{"x1_min", g.x1_min}, {"x1_max", g.x1_max}, {"x2_min", g.x2_min}, {"x2_max", g.x2_max},
            {"n1", g.n1},         {"n2", g.n2},         {"eps", g.eps},       {"eta", g.eta}};
}

Grid2 grid_from_json(const json& j) {
    try {
        return make_grid({j.at("x1_min").get<double>(), j.at("x1_max").get<double>(), j.at("x2_min").get<double>(),
                          j.at("x2_max").get<double>()},
                         j.at("n1").get<int>(), j.at("n2").get<int>(), j.at("eps").get<int>(), j.at("eta").get<int>());
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad grid header: ") + e.what());
    }
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
}

void check_version(const json& j, const char* kind) {
    if (!j.contains("format_version") || j.at("format_version") != kFormatVersion)
        throw ValidationError(std::string(kind) + ": unsupported or missing format_version");
}

ScalarField2D scalar_from(const json& j, const char* key, const Grid2& g) {
    if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
    std::vector<double> v;
    try {
        v = j.at(key).get<std::vector<double>>();
    } catch (const json::exception&) {
        throw ValidationError(std::string("field '") + key + "' must be an array of numbers");
    }
    if (v.size() != g.size()) throw ValidationError(std::string("field '") + key + "' has the wrong length");
    return ScalarField2D(g, std::move(v));
}

json vec_to(const Vec3Field2D& f) {
    json a = json::array();
    for (const auto& v : f.values) a.push_back({v[0], v[1], v[2]});
    return a;
}

Vec3Field2D vec_from(const json& j, const char* key, const Grid2& g) {
    if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
    Vec3Field2D f(g);
    const json& a = j.at(key);
    if (!a.is_array() || a.size() != g.size()) throw ValidationError(std::string("field '") + key + "' has the wrong length");
    try {
        for (std::size_t k = 0; k < g.size(); ++k) f[k] = a[k].get<Vec3>();
    } catch (const json::exception&) {
        throw ValidationError(std::string("field '") + key + "' must hold 3-vectors");
    }
    return f;
}

const char* kConnNames[6] = {"1_11", "1_12", "1_22", "2_11", "2_12", "2_22"};
const char* kShapeNames[4] = {"S11", "S12", "S21", "S22"};

}  // namespace

std::string field_to_csv(const ScalarField2D& f) {
    const Grid2& g = f.grid;
    std::string out = "# " + format_double(g.x1_min) + " " + format_double(g.x1_max) + " " + format_double(g.x2_min) +
                      " " + format_double(g.x2_max) + " " + std::to_string(g.n1) + " " + std::to_string(g.n2) + " " +
                      std::to_string(g.eps) + " " + std::to_string(g.eta) + "\n";
    for (double v : f.values) {
        out += format_double(v);
        out += '\n';
    }
    return out;
}

ScalarField2D field_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("#", 0) != 0) throw ValidationError("CSV: missing '#' header line");
    std::istringstream hs(line.substr(1));
    std::array<double, 4> b{};
    int n1 = 0, n2 = 0, eps = 0, eta = 0;
    if (!(hs >> b[0] >> b[1] >> b[2] >> b[3] >> n1 >> n2 >> eps >> eta)) throw ValidationError("CSV: malformed header");
    const Grid2 g = make_grid(b, n1, n2, eps, eta);
    std::vector<double> v;
    v.reserve(g.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            std::size_t pos = 0;
            v.push_back(std::stod(line, &pos));
        } catch (const std::exception&) {
            throw ValidationError("CSV: bad value '" + line + "'");
        }
    }
    if (v.size() != g.size())
        throw ValidationError("CSV: expected " + std::to_string(g.size()) + " values, got " + std::to_string(v.size()));
    ScalarField2D f(g, std::move(v));
    check_finite(f, "CSV field");
    return f;
}

void write_field_csv(const std::string& path, const ScalarField2D& f) { atomic_write(path, field_to_csv(f)); }
ScalarField2D read_field_csv(const std::string& path) { return field_from_csv(read_text(path)); }

std::string structure_to_json(const BlaschkeStructure& s) {
    json j;
    j["format_version"] = kFormatVersion;
    j["kind"] = "blaschke-structure";
    j["case"] = to_string(s.case_tag);
    j["params"] = s.params;
    j["grid"] = grid_json(s.grid());
    j["h11"] = s.metric.h11.values;
    j["h12"] = s.metric.h12.values;
    j["h22"] = s.metric.h22.values;
    for (int c = 0; c < 6; ++c) {
        j[std::string("nabla_") + kConnNames[c]] = s.nabla.c[c].values;
        j[std::string("nabla_hat_") + kConnNames[c]] = s.nabla_hat.c[c].values;
        j[std::string("K_") + kConnNames[c]] = s.K.c[c].values;
    }
    for (int c = 0; c < 4; ++c) j[kShapeNames[c]] = s.shape.S[c].values;
    j["H"] = s.shape.H.values;
    j["tau"] = s.shape.tau.values;
    return j.dump(1) + "\n";
}

BlaschkeStructure structure_from_json(const std::string& text) {
    const json j = parse(text);
    check_version(j, "structure");
    if (!j.contains("grid")) throw ValidationError("structure: missing grid");
    const Grid2 g = grid_from_json(j.at("grid"));
    BlaschkeStructure s;
    try {
        s.case_tag = structure_case_from_string(j.value("case", std::string("custom")));
        if (j.contains("params")) s.params = j.at("params").get<std::map<std::string, double>>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("structure: bad metadata: ") + e.what());
    }
    s.metric = {scalar_from(j, "h11", g), scalar_from(j, "h12", g), scalar_from(j, "h22", g)};
    for (int c = 0; c < 6; ++c) {
        s.nabla.c[c] = scalar_from(j, (std::string("nabla_") + kConnNames[c]).c_str(), g);
        s.nabla_hat.c[c] = scalar_from(j, (std::string("nabla_hat_") + kConnNames[c]).c_str(), g);
        s.K.c[c] = scalar_from(j, (std::string("K_") + kConnNames[c]).c_str(), g);
    }
    for (int c = 0; c < 4; ++c) s.shape.S[c] = scalar_from(j, kShapeNames[c], g);
    s.shape.H = scalar_from(j, "H", g);
    s.shape.tau = scalar_from(j, "tau", g);
    s.validate();
    return s;
}

void write_structure(const std::string& path, const BlaschkeStructure& s) { atomic_write(path, structure_to_json(s)); }
BlaschkeStructure read_structure(const std::string& path) { return structure_from_json(read_text(path)); }

std::string sheet_to_json(const ImmersionSheet& sheet) {
    json j;
    j["format_version"] = kFormatVersion;
    j["kind"] = "immersion-sheet";
    j["grid"] = grid_json(sheet.grid);
    j["f"] = vec_to(sheet.f);
    j["F1"] = vec_to(sheet.F1);
    j["F2"] = vec_to(sheet.F2);
    j["xi"] = vec_to(sheet.xi);
    return j.dump(1) + "\n";
}

ImmersionSheet sheet_from_json(const std::string& text) {
    const json j = parse(text);
    check_version(j, "sheet");
    if (!j.contains("grid")) throw ValidationError("sheet: missing grid");
    ImmersionSheet s(grid_from_json(j.at("grid")));
    s.f = vec_from(j, "f", s.grid);
    s.F1 = vec_from(j, "F1", s.grid);
    s.F2 = vec_from(j, "F2", s.grid);
    s.xi = vec_from(j, "xi", s.grid);
    return s;
}

void write_sheet(const std::string& path, const ImmersionSheet& sheet) { atomic_write(path, sheet_to_json(sheet)); }
ImmersionSheet read_sheet(const std::string& path) { return sheet_from_json(read_text(path)); }

std::string sheet_to_obj(const ImmersionSheet& sheet) {
    const Grid2& g = sheet.grid;
    std::string out = "# format_version " + std::to_string(kFormatVersion) + "\n";
    for (const auto& v : sheet.f.values)
        out += "v " + format_double(v[0]) + " " + format_double(v[1]) + " " + format_double(v[2]) + "\n";
    for (int j = 0; j + 1 < g.n2; ++j)
        for (int i = 0; i + 1 < g.n1; ++i) {
            const std::size_t a = g.index(i, j) + 1, b = g.index(i + 1, j) + 1, c = g.index(i + 1, j + 1) + 1,
                              d = g.index(i, j + 1) + 1;
            out += "f " + std::to_string(a) + " " + std::to_string(b) + " " + std::to_string(c) + " " +
                   std::to_string(d) + "\n";
        }
    return out;
}

std::string mesh_report_json(const ImmersionSheet& sheet, const std::map<std::string, double>& residuals,
                             const std::map<std::string, std::string>& provenance) {
    json j;
    j["format_version"] = kFormatVersion;
    j["kind"] = "mesh-report";
    j["grid"] = grid_json(sheet.grid);
    j["vertices"] = sheet.grid.size();
    j["faces"] = static_cast<std::size_t>(sheet.grid.n1 - 1) * (sheet.grid.n2 - 1);
    j["residuals"] = residuals;
    j["provenance"] = provenance;
    return j.dump(1) + "\n";
}

void write_obj(const std::string& path, const ImmersionSheet& sheet, const std::map<std::string, double>& residuals,
               const std::map<std::string, std::string>& provenance) {
    atomic_write(path, sheet_to_obj(sheet));
    atomic_write(path + ".report.json", mesh_report_json(sheet, residuals, provenance));
}

}  // namespace affsurf
