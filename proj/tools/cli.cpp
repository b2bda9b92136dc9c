#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "CLI11.hpp"
#include "affsurf/blaschke.hpp"
#include "affsurf/error.hpp"
#include "affsurf/immersion.hpp"
#include "affsurf/io.hpp"
#include "affsurf/soliton_eqs.hpp"
#include "affsurf/variable_maps.hpp"
#include "json.hpp"

namespace affsurf::cli {

using Json = nlohmann::ordered_json;

namespace {

// A measured residual missed its bound; the summary still goes to standard output.
class ThresholdExceeded : public NumericalError {
public:
    ThresholdExceeded(const std::string& what, Json summary) : NumericalError(what), summary(std::move(summary)) {}
    Json summary;
};

struct GridOpts {
    std::vector<double> bounds{-0.5, 0.5, -0.5, 0.5};
    int n1 = 33, n2 = 33, eps = 1, eta = 1;

    Grid2 make() const {
        if (bounds.size() != 4) throw ValidationError("--bounds needs four values x1min,x1max,x2min,x2max");
        return make_grid({bounds[0], bounds[1], bounds[2], bounds[3]}, n1, n2, eps, eta);
    }
};

void add_grid(CLI::App* sc, GridOpts& g) {
    sc->add_option("--bounds", g.bounds, "x1min,x1max,x2min,x2max")->delimiter(',')->expected(4)->allow_extra_args(false);
    sc->add_option_function<int>("--n", [&g](const int& n) { g.n1 = g.n2 = n; }, "nodes per axis");
    sc->add_option("--n1", g.n1, "nodes along x1");
    sc->add_option("--n2", g.n2, "nodes along x2");
    sc->add_option("--eps", g.eps, "signature sign of dx1^2");
    sc->add_option("--eta", g.eta, "signature sign of dx2^2");
}

// A scalar input: a CSV file, or a constant sampled on the grid options.
struct FieldInput {
    std::string path;
    std::optional<double> constant;

    ScalarField2D load(const GridOpts& g, const char* what) const {
        if (!path.empty()) return read_field_csv(path);
        if (constant) return ScalarField2D(g.make(), *constant);
        throw ValidationError(std::string("missing input for ") + what);
    }
    bool given() const { return !path.empty() || constant.has_value(); }
};

void vec3_opt(CLI::App* sc, const char* name, std::vector<double>& v, const char* help) {
    sc->add_option(name, v, help)->delimiter(',')->expected(3)->allow_extra_args(false);
}

Vec3 to_vec3(const std::vector<double>& v, const char* what) {
    if (v.size() != 3) throw ValidationError(std::string(what) + " needs three components");
    return {v[0], v[1], v[2]};
}

void distinct(const std::string& in, const std::string& out) {
    if (!in.empty() && in == out) throw ValidationError("input and output paths must differ: " + in);
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// out.csv -> out.<tag>.csv
std::string sibling(const std::string& out, const std::string& tag) {
    if (ends_with(out, ".csv")) return out.substr(0, out.size() - 4) + "." + tag + ".csv";
    return out + "." + tag + ".csv";
}

Json grid_json(const Grid2& g) {
    return Json{{"x1_min", g.x1_min}, {"x1_max", g.x1_max}, {"x2_min", g.x2_min}, {"x2_max", g.x2_max},
                {"n1", g.n1},         {"n2", g.n2},         {"eps", g.eps},       {"eta", g.eta}};
}

std::string grid_header(const Grid2& g) {
    return format_double(g.x1_min) + " " + format_double(g.x1_max) + " " + format_double(g.x2_min) + " " +
           format_double(g.x2_max) + " " + std::to_string(g.n1) + " " + std::to_string(g.n2) + " " +
           std::to_string(g.eps) + " " + std::to_string(g.eta);
}

// Sheets go to OBJ (plus report) when the path ends in .obj, to sheet JSON otherwise.
void write_sheet_output(const std::string& path, const ImmersionSheet& sheet, const std::map<std::string, double>& res,
                        std::map<std::string, std::string> prov) {
    if (ends_with(path, ".obj")) {
        prov["grid"] = grid_header(sheet.grid);
        write_obj(path, sheet, res, prov);
    } else {
        write_sheet(path, sheet);
    }
}

SignatureKind signature_from(const std::string& s) {
    if (s == "definite") return SignatureKind::Definite;
    if (s == "indefinite") return SignatureKind::Indefinite;
    throw ValidationError("signature must be definite or indefinite");
}

Direction direction_from(const std::string& s) {
    if (s == "fwd") return Direction::Forward;
    if (s == "inv") return Direction::Inverse;
    throw ValidationError("direction must be fwd or inv");
}

struct SeedOpts {
    std::vector<double> f0, F1, F2, xi;
    std::string sheet;
    int orientation = 0;
    double tol = 1e-8;
};

void add_seed(CLI::App* sc, SeedOpts& s) {
    vec3_opt(sc, "--f0", s.f0, "seed position");
    vec3_opt(sc, "--F1", s.F1, "seed tangent d1 f");
    vec3_opt(sc, "--F2", s.F2, "seed tangent d2 f");
    vec3_opt(sc, "--xi", s.xi, "seed affine normal");
    sc->add_option("--seed-sheet", s.sheet, "take the seed frame from the origin node of a sheet JSON");
    sc->add_option("--orientation", s.orientation, "required sign of det(F1, F2, xi), 0 for either");
    sc->add_option("--seed-tol", s.tol, "tolerance of the seed volume check");
}

// Default frame: coordinate tangents and a vertical normal scaled so that det(F1, F2, xi) = sqrt|det h|.
SeedFrame make_seed(const SeedOpts& o, const BlaschkeStructure& s) {
    SeedFrame seed;
    if (!o.sheet.empty()) {
        seed = seed_from_sheet(read_sheet(o.sheet));
    } else {
        const double d = s.metric.h11[0] * s.metric.h22[0] - s.metric.h12[0] * s.metric.h12[0];
        seed.xi0 = {0, 0, std::sqrt(std::abs(d))};
    }
    if (!o.f0.empty()) seed.f0 = to_vec3(o.f0, "--f0");
    if (!o.F1.empty()) seed.F1_0 = to_vec3(o.F1, "--F1");
    if (!o.F2.empty()) seed.F2_0 = to_vec3(o.F2, "--F2");
    if (!o.xi.empty()) seed.xi0 = to_vec3(o.xi, "--xi");
    seed.orientation = o.orientation;
    return seed;
}

Json residual_json(const std::map<std::string, double>& m) {
    Json j = Json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

std::map<std::string, std::string> params_provenance(const BlaschkeStructure& s, const std::string& command) {
    std::map<std::string, std::string> p{{"command", command}, {"case", to_string(s.case_tag)}};
    for (const auto& [k, v] : s.params) p["param." + k] = format_double(v);
    return p;
}

// ---- solve ---------------------------------------------------------------

struct SolveOpts {
    std::string eq, boundary = "zero", init, velocity, out;
    double H = 0, tau = 0, tol = 1e-10, damping = 1;
    int alpha = 1, eps_t = 0, max_iter = 50;
    bool fixed_sides = false;
    GridOpts grid;
};

void add_solve(CLI::App& app, SolveOpts& o) {
    auto* sc = app.add_subcommand("solve", "Solve a soliton equation on a grid");
    sc->add_option("--eq", o.eq, "equation tag")->required();
    sc->add_option("--H", o.H, "affine mean curvature");
    sc->add_option("--tau", o.tau, "affine Gauss curvature");
    sc->add_option("--alpha", o.alpha, "sign parameter");
    sc->add_option("--eps-t", o.eps_t, "Tzitzeica sign");
    sc->add_option("--boundary", o.boundary, "'zero' or a CSV field whose edges give the data");
    sc->add_option("--init", o.init, "CSV initial guess (elliptic)");
    sc->add_option("--velocity", o.velocity, "CSV whose first row is d2 psi on the initial line (Cauchy)");
    sc->add_flag("--fixed-sides", o.fixed_sides, "hold the side columns at the boundary field (Cauchy)");
    sc->add_option("--tol", o.tol, "Newton residual tolerance");
    sc->add_option("--max-iter", o.max_iter, "Newton iteration cap");
    sc->add_option("--damping", o.damping, "initial Newton step length");
    sc->add_option("--out", o.out, "output CSV")->required();
    add_grid(sc, o.grid);
}

Json do_solve(const SolveOpts& o) {
    distinct(o.boundary, o.out);
    distinct(o.init, o.out);
    SolitonEquation eq;
    eq.tag = eq_tag_from_string(o.eq);
    eq.H = o.H;
    eq.tau = o.tau;
    eq.alpha = o.alpha;
    eq.eps_t = o.eps_t;
    eq.validate();
    if (eq.arity() != 1) throw ValidationError("solve: " + o.eq + " couples two fields; no scalar solver applies");

    const ScalarField2D bnd = o.boundary == "zero" ? ScalarField2D(o.grid.make(), 0.0) : read_field_csv(o.boundary);
    const Grid2& g = bnd.grid;
    ScalarField2D psi;
    std::string method;
    Json extra = Json::object();

    if (eq.is_mixed()) {
        method = "goursat";
        std::vector<double> row(g.n1), col(g.n2);
        for (int i = 0; i < g.n1; ++i) row[i] = bnd(i, 0);
        for (int j = 0; j < g.n2; ++j) col[j] = bnd(0, j);
        psi = solve_goursat(eq, g, row, col);
    } else if (g.eps * g.eta == -1) {
        method = "cauchy";
        std::vector<double> p0(g.n1), v0(g.n1, 0.0);
        for (int i = 0; i < g.n1; ++i) p0[i] = bnd(i, 0);
        if (!o.velocity.empty()) {
            const ScalarField2D v = read_field_csv(o.velocity);
            require_same_grid(g, v.grid, "solve velocity");
            for (int i = 0; i < g.n1; ++i) v0[i] = v(i, 0);
        }
        CauchyOptions copts;
        if (o.fixed_sides)
            copts.sides = [&bnd, &g](double x1, double x2) {
                const int j = static_cast<int>(std::lround((x2 - g.x2_min) / g.h2()));
                return bnd(x1 <= g.x1_min ? 0 : g.n1 - 1, std::clamp(j, 0, g.n2 - 1));
            };
        psi = solve_cauchy(eq, g, p0, v0, copts);
    } else {
        method = "elliptic";
        ScalarField2D init = o.init.empty() ? bnd : read_field_csv(o.init);
        require_same_grid(g, init.grid, "solve init");
        init = with_edges(init, bnd);
        NewtonOptions nopts{o.tol, o.max_iter, o.damping};
        SolveResult r = solve_elliptic(eq, bnd, init, nopts);
        psi = std::move(r.psi);
        extra["iterations"] = r.report.iterations;
        extra["newton_residual"] = r.report.residual_norm;
    }
    check_finite(psi, "solution");
    const double res = max_abs_interior(residual(eq, psi));
    write_field_csv(o.out, psi);
    Json j{{"command", "solve"}, {"status", "ok"}, {"eq", o.eq}, {"method", method}, {"grid", grid_json(g)}};
    for (auto& [k, v] : extra.items()) j[k] = v;
    j["residual"] = res;
    j["out"] = o.out;
    return j;
}

// ---- map -----------------------------------------------------------------

struct MapOpts {
    std::string map, kase = "pos", direction = "fwd", in, in2, out, signature = "definite";
    double tau = 1, H = 0;
    int alpha = 1;
};

void add_map(CLI::App& app, MapOpts& o) {
    auto* sc = app.add_subcommand("map", "Apply a change of variables to field(s)");
    sc->add_option("--map", o.map, "lambda-psi | tzitzeica | complex-angle | frame")->required();
    sc->add_option("--case", o.kase, "pos | zero | neg (sign of tau)");
    sc->add_option("--tau", o.tau, "|tau| for lambda-psi, tau for complex-angle");
    sc->add_option("--direction", o.direction, "fwd | inv");
    sc->add_option("--H", o.H, "mean curvature for tzitzeica");
    sc->add_option("--alpha", o.alpha, "indefinite sign for tzitzeica");
    sc->add_option("--signature", o.signature, "definite | indefinite");
    sc->add_option("--in", o.in, "input CSV")->required();
    sc->add_option("--in2", o.in2, "second input CSV (b for complex-angle and frame)");
    sc->add_option("--out", o.out, "output CSV; extra outputs go to sibling files")->required();
}

Json do_map(const MapOpts& o) {
    distinct(o.in, o.out);
    distinct(o.in2, o.out);
    const ScalarField2D in = read_field_csv(o.in);
    Json j{{"command", "map"}, {"status", "ok"}, {"map", o.map}};
    Json outs = Json::array({o.out});
    auto second = [&]() {
        if (o.in2.empty()) throw ValidationError("map " + o.map + " needs --in2");
        return read_field_csv(o.in2);
    };

    if (o.map == "lambda-psi") {
        double tau;
        if (o.kase == "pos") tau = std::abs(o.tau);
        else if (o.kase == "zero") tau = 0;
        else if (o.kase == "neg") tau = -std::abs(o.tau);
        else throw ValidationError("--case must be pos, zero or neg");
        if (o.kase != "zero" && tau == 0) throw ValidationError("--tau must be nonzero for case " + o.kase);
        const EigenCase c = EigenCase::from_tau(tau);
        write_field_csv(o.out, lambda_psi(c, direction_from(o.direction), in));
        j["tau"] = tau;
    } else if (o.map == "tzitzeica") {
        const RescaleResult r = tzitzeica_rescale(in, o.H, direction_from(o.direction), signature_from(o.signature), o.alpha);
        write_field_csv(o.out, r.field);
        j["eps_t"] = r.eps_t;
        j["a"] = r.a;
        j["b"] = r.b;
        j["residual_factor"] = r.residual_factor;
        j["grid"] = grid_json(r.field.grid);
    } else if (o.map == "complex-angle") {
        if (direction_from(o.direction) == Direction::Forward) {
            const AnglePair p = complex_angle_maps(in, second(), o.tau);
            write_field_csv(o.out, p.phi);
            write_field_csv(sibling(o.out, "psi"), p.psi);
            outs.push_back(sibling(o.out, "psi"));
        } else {
            if (!(o.tau > 0)) throw ValidationError("--tau must be positive for complex-angle");
            const ScalarField2D phi = phi_from_psi(in);
            const double r = std::sqrt(o.tau);
            write_field_csv(o.out, phi);
            write_field_csv(sibling(o.out, "a"), map(phi, [r](double p) { return r * std::cos(p); }));
            write_field_csv(sibling(o.out, "b"), map(phi, [r](double p) { return r * std::sin(p); }));
            outs.push_back(sibling(o.out, "a"));
            outs.push_back(sibling(o.out, "b"));
        }
    } else if (o.map == "frame") {
        const CanonicalFrame f = canonical_frame(signature_from(o.signature), in, second());
        write_field_csv(o.out, f.angles.lambda);
        for (const auto& [tag, fld] : {std::pair{"psi", &f.angles.psi}, {"phi", &f.angles.phi}, {"sign", &f.angles.sign}}) {
            write_field_csv(sibling(o.out, tag), *fld);
            outs.push_back(sibling(o.out, tag));
        }
        j["eps"] = f.eps;
    } else {
        throw ValidationError("unknown map '" + o.map + "'");
    }
    j["out"] = outs;
    return j;
}

// ---- build-structure -------------------------------------------------------

struct BuildOpts {
    std::string kase, out, signature = "definite";
    FieldInput f1, f2;
    std::optional<double> tau;
    double H = 0, angle = 0;
    int alpha = 1, family_eps = 1, sigma = 1;
    GridOpts grid;
};

void add_structure_inputs(CLI::App* sc, FieldInput& f, GridOpts& g, const char* in_help) {
    sc->add_option("--in", f.path, in_help);
    sc->add_option("--const", f.constant, "constant value of the input field on the grid options");
    add_grid(sc, g);
}

void add_build(CLI::App& app, BuildOpts& o) {
    auto* sc = app.add_subcommand("build-structure", "Assemble a Blaschke structure from soliton data");
    sc->add_option("--case", o.kase, "eigen | complex | sphere-definite | sphere-indefinite | liouville | family")
        ->required();
    add_structure_inputs(sc, o.f1, o.grid, "CSV of lambda, a or u");
    sc->add_option("--in2", o.f2.path, "CSV of mu or b");
    sc->add_option("--const2", o.f2.constant, "constant mu or b");
    sc->add_option("--tau", o.tau, "eigen case: mu = tau / lambda when --in2 is absent");
    sc->add_option("--H", o.H, "affine mean curvature");
    sc->add_option("--alpha", o.alpha, "indefinite sign");
    sc->add_option("--angle", o.angle, "family rotation angle");
    sc->add_option("--family-eps", o.family_eps, "family orientation sign");
    sc->add_option("--signature", o.signature, "family signature: definite | indefinite");
    sc->add_option("--sigma", o.sigma, "sign of the indefinite family metric");
    sc->add_option("--out", o.out, "output structure JSON")->required();
}

BlaschkeStructure build_from(const BuildOpts& o) {
    const ScalarField2D a = o.f1.load(o.grid, "--in");
    if (o.kase == "eigen") {
        ScalarField2D mu;
        if (o.f2.given()) {
            mu = o.f2.path.empty() ? ScalarField2D(a.grid, *o.f2.constant) : read_field_csv(o.f2.path);
        } else if (o.tau) {
            mu = companion_mu(EigenCase::from_tau(*o.tau), a);
        } else {
            throw ValidationError("eigen structure needs --in2/--const2 or --tau");
        }
        return build_eigen(a, mu);
    }
    if (o.kase == "complex") {
        if (!o.f2.given()) throw ValidationError("complex structure needs --in2 or --const2");
        const ScalarField2D b = o.f2.path.empty() ? ScalarField2D(a.grid, *o.f2.constant) : read_field_csv(o.f2.path);
        return build_complex(a, b);
    }
    if (o.kase == "sphere-definite") return build_sphere_definite(a, o.H);
    if (o.kase == "sphere-indefinite") return build_sphere_indefinite(a, o.H, o.alpha);
    if (o.kase == "liouville") return build_liouville(a, o.H);
    if (o.kase == "family") return build_family(a, o.angle, o.family_eps, signature_from(o.signature), o.H, o.sigma);
    throw ValidationError("unknown structure case '" + o.kase + "'");
}

Json do_build(const BuildOpts& o) {
    distinct(o.f1.path, o.out);
    distinct(o.f2.path, o.out);
    const BlaschkeStructure s = build_from(o);
    write_structure(o.out, s);
    Json params = Json::object();
    for (const auto& [k, v] : s.params) params[k] = v;
    return Json{{"command", "build-structure"}, {"status", "ok"}, {"case", to_string(s.case_tag)},
                {"params", params}, {"grid", grid_json(s.grid())}, {"out", o.out}};
}

// ---- verify ----------------------------------------------------------------

struct VerifyOpts {
    std::string in, out;
    double threshold = 1e-4;
};

void add_verify(CLI::App& app, VerifyOpts& o) {
    auto* sc = app.add_subcommand("verify", "Evaluate the structure-equation residuals of a structure file");
    sc->add_option("--in", o.in, "structure JSON")->required();
    sc->add_option("--threshold", o.threshold, "pass/fail bound on every residual");
    sc->add_option("--out", o.out, "optional JSON report");
}

Json do_verify(const VerifyOpts& o) {
    distinct(o.in, o.out);
    if (!(o.threshold > 0)) throw ValidationError("--threshold must be positive");
    const BlaschkeStructure s = read_structure(o.in);
    const ResidualReport r = verify(s);
    const bool pass = r.max() <= o.threshold;
    Json j{{"command", "verify"},  {"status", pass ? "ok" : "fail"}, {"case", to_string(s.case_tag)},
           {"threshold", o.threshold}, {"residuals", residual_json(r.entries())}, {"max", r.max()},
           {"commutator", commutator_identity(s)}};
    if (!o.out.empty()) atomic_write(o.out, j.dump(1) + "\n");
    if (!pass)
        throw ThresholdExceeded(
            "verify: max residual " + format_double(r.max()) + " exceeds threshold " + format_double(o.threshold), j);
    return j;
}

// ---- immerse ---------------------------------------------------------------

struct ImmerseOpts {
    std::string in, out;
    double max_path_residual = 1e-6;
    SeedOpts seed;
};

void add_immerse(CLI::App& app, ImmerseOpts& o) {
    auto* sc = app.add_subcommand("immerse", "Integrate the Gauss-Weingarten system of a structure file");
    sc->add_option("--in", o.in, "structure JSON")->required();
    sc->add_option("--out", o.out, "sheet JSON, or OBJ when the name ends in .obj")->required();
    sc->add_option("--max-path-residual", o.max_path_residual, "bound on the row-first/column-first gap");
    add_seed(sc, o.seed);
}

IntegrateResult integrate_checked(const BlaschkeStructure& s, const SeedOpts& so, double bound, const char* command) {
    IntegrateResult r = integrate(s, make_seed(so, s), so.tol);
    if (!(r.path_residual <= bound))
        throw ThresholdExceeded(
            std::string(command) + ": path residual " + format_double(r.path_residual) + " exceeds " +
                format_double(bound),
            Json{{"command", command}, {"status", "fail"}, {"path_residual", r.path_residual}, {"threshold", bound}});
    return r;
}

Json do_immerse(const ImmerseOpts& o) {
    distinct(o.in, o.out);
    distinct(o.seed.sheet, o.out);
    const BlaschkeStructure s = read_structure(o.in);
    const IntegrateResult r = integrate_checked(s, o.seed, o.max_path_residual, "immerse");
    const GWResidual gw = gw_residual(r.sheet, s);
    const std::map<std::string, double> res{{"path_residual", r.path_residual},
                                            {"gw_frame", gw.frame},
                                            {"gw_normal", gw.normal},
                                            {"gw_position", gw.position}};
    write_sheet_output(o.out, r.sheet, res, params_provenance(s, "immerse"));
    return Json{{"command", "immerse"}, {"status", "ok"}, {"case", to_string(s.case_tag)},
                {"residuals", residual_json(res)}, {"out", o.out}};
}

// ---- liouville -------------------------------------------------------------

struct LiouvilleOpts {
    double a = 0, b = 1, H = -1, max_step = 1e-3;
    std::string out;
    GridOpts grid;
};

void add_liouville(CLI::App& app, LiouvilleOpts& o) {
    auto* sc = app.add_subcommand("liouville", "Ruled surface from the third-order curve equation");
    sc->add_option("--a", o.a, "constant coefficient a in xi''' = a xi' + b xi");
    sc->add_option("--b", o.b, "constant coefficient b");
    sc->add_option("--H", o.H, "affine mean curvature (nonzero)");
    sc->add_option("--max-step", o.max_step, "largest internal ODE step");
    sc->add_option("--out", o.out, "sheet JSON, or OBJ when the name ends in .obj")->required();
    add_grid(sc, o.grid);
}

Json do_liouville(const LiouvilleOpts& o) {
    const Grid2 g = o.grid.make();
    const double a = o.a, b = o.b;
    const ScalarFn af = [a](double) { return a; }, bf = [b](double) { return b; };
    const std::array<Vec3, 3> basis{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    LiouvilleOptions lo;
    lo.max_step = o.max_step;
    const ImmersionSheet sheet = liouville_build(af, bf, o.H, g, basis, lo);
    const CurveSolution c = solve_curve(af, bf, o.H, g.x2_min, g.h2(), g.n2, basis, o.max_step);
    const std::map<std::string, double> res{{"wronskian_drift", c.wronskian_drift},
                                            {"quadric_defect", quadric_defect(sheet)},
                                            {"constraint_defect", std::abs(-2 * b - 2 * o.H)}};
    write_sheet_output(o.out, sheet, res,
                       {{"command", "liouville"}, {"param.a", format_double(a)}, {"param.b", format_double(b)},
                        {"param.H", format_double(o.H)}});
    return Json{{"command", "liouville"}, {"status", "ok"}, {"grid", grid_json(g)}, {"residuals", residual_json(res)},
                {"out", o.out}};
}

// ---- catalogue -------------------------------------------------------------

struct CatalogueOpts {
    std::string kind, out;
    double lambda = 1;
    int sign = 1;
    std::vector<double> phi{0, 0, 0, 1};
    GridOpts grid;
};

void add_catalogue(CLI::App& app, CatalogueOpts& o) {
    auto* sc = app.add_subcommand("catalogue", "Closed-form surfaces and homogeneous orbits");
    sc->add_option("--kind", o.kind,
                   "definite | indefinite | improper-graph | orbit-hyperbolic | orbit-elliptic "
                   "(definite-const-fp and indefinite-const-fp are accepted)")
        ->required();
    sc->add_option("--lambda", o.lambda, "scale, h(C,C) = 16 lambda^2");
    sc->add_option("--sign", o.sign, "sign of the level constant");
    sc->add_option("--phi", o.phi, "improper graph: polynomial coefficients of phi(y), lowest first")->delimiter(',');
    sc->add_option("--out", o.out, "sheet JSON, or OBJ when the name ends in .obj")->required();
    add_grid(sc, o.grid);
}

Json do_catalogue(const CatalogueOpts& o) {
    std::string kind = o.kind;
    if (ends_with(kind, "-const-fp")) kind = kind.substr(0, kind.size() - 9);
    const CatalogueKind k = catalogue_kind_from_string(kind);
    CatalogueParams p;
    p.lambda = o.lambda;
    p.sign = o.sign;
    const std::vector<double> c = o.phi;
    // Horner for phi, phi', phi''
    p.phi = [c](double y) {
        double v = 0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * y + *it;
        return v;
    };
    p.phi1 = [c](double y) {
        double v = 0;
        for (std::size_t n = c.size(); n-- > 1;) v = v * y + n * c[n];
        return v;
    };
    p.phi2 = [c](double y) {
        double v = 0;
        for (std::size_t n = c.size(); n-- > 2;) v = v * y + n * (n - 1) * c[n];
        return v;
    };
    const Grid2 g = o.grid.make();
    const ImmersionSheet sheet = catalogue(k, p, g);
    std::map<std::string, std::string> prov{{"command", "catalogue"}, {"kind", to_string(k)}};
    Json j{{"command", "catalogue"}, {"status", "ok"}, {"kind", to_string(k)}, {"grid", grid_json(g)}};
    if (k != CatalogueKind::ImproperGraph) {
        prov["param.lambda"] = format_double(o.lambda);
        prov["param.sign"] = std::to_string(o.sign);
        j["c"] = catalogue_c(o.lambda);
    }
    write_sheet_output(o.out, sheet, {}, prov);
    j["vertices"] = g.size();
    j["out"] = o.out;
    return j;
}

// ---- family ----------------------------------------------------------------

struct FamilyOpts {
    FieldInput u;
    GridOpts grid;
    double angle = 0, H = 0, max_path_residual = 1e-6;
    int family_eps = 1, sigma = 1;
    std::string signature = "definite", out, structure_out;
    SeedOpts seed;
};

void add_family(CLI::App& app, FamilyOpts& o) {
    auto* sc = app.add_subcommand("family", "Build and integrate one member of a rotated family");
    add_structure_inputs(sc, o.u, o.grid, "CSV of u");
    sc->add_option("--angle", o.angle, "rotation angle");
    sc->add_option("--family-eps", o.family_eps, "orientation sign");
    sc->add_option("--signature", o.signature, "definite | indefinite");
    sc->add_option("--sigma", o.sigma, "sign of the indefinite metric");
    sc->add_option("--H", o.H, "affine mean curvature");
    sc->add_option("--max-path-residual", o.max_path_residual, "bound on the row-first/column-first gap");
    sc->add_option("--structure-out", o.structure_out, "optional structure JSON");
    sc->add_option("--out", o.out, "sheet JSON, or OBJ when the name ends in .obj")->required();
    add_seed(sc, o.seed);
}

Json do_family(const FamilyOpts& o) {
    distinct(o.u.path, o.out);
    distinct(o.u.path, o.structure_out);
    distinct(o.structure_out, o.out);
    const ScalarField2D u = o.u.load(o.grid, "--in");
    const BlaschkeStructure s = build_family(u, o.angle, o.family_eps, signature_from(o.signature), o.H, o.sigma);
    const IntegrateResult r = integrate_checked(s, o.seed, o.max_path_residual, "family");
    const CubicInvariants ci = cubic_invariants_algebraic(s);
    const auto [lo, hi] = std::minmax_element(ci.hCC.values.begin(), ci.hCC.values.end());
    const std::map<std::string, double> res{{"path_residual", r.path_residual}, {"verify_max", verify(s).max()}};
    if (!o.structure_out.empty()) write_structure(o.structure_out, s);
    write_sheet_output(o.out, r.sheet, res, params_provenance(s, "family"));
    return Json{{"command", "family"}, {"status", "ok"},          {"params", Json(s.params)},
                {"hCC_min", *lo},      {"hCC_max", *hi},          {"residuals", residual_json(res)},
                {"out", o.out}};
}

// ---- export-obj ------------------------------------------------------------

struct ExportOpts {
    std::string in, structure, out;
};

void add_export(CLI::App& app, ExportOpts& o) {
    auto* sc = app.add_subcommand("export-obj", "Write a sheet as an OBJ mesh with a residual report");
    sc->add_option("--in", o.in, "sheet JSON")->required();
    sc->add_option("--structure", o.structure, "structure JSON for Gauss-Weingarten residuals in the report");
    sc->add_option("--out", o.out, "OBJ path")->required();
}

Json do_export(const ExportOpts& o) {
    distinct(o.in, o.out);
    distinct(o.structure, o.out);
    const ImmersionSheet sheet = read_sheet(o.in);
    std::map<std::string, double> res;
    std::map<std::string, std::string> prov{{"command", "export-obj"}, {"source", o.in}};
    if (!o.structure.empty()) {
        const BlaschkeStructure s = read_structure(o.structure);
        const GWResidual gw = gw_residual(sheet, s);
        res = {{"gw_frame", gw.frame}, {"gw_normal", gw.normal}, {"gw_position", gw.position}};
        prov = params_provenance(s, "export-obj");
        prov["source"] = o.in;
    }
    prov["grid"] = grid_header(sheet.grid);
    write_obj(o.out, sheet, res, prov);
    return Json{{"command", "export-obj"},
                {"status", "ok"},
                {"vertices", sheet.grid.size()},
                {"faces", static_cast<std::size_t>(sheet.grid.n1 - 1) * (sheet.grid.n2 - 1)},
                {"residuals", residual_json(res)},
                {"out", o.out}};
}

std::string config_value(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_double(v.get<double>());
    if (v.is_array()) {
        std::string s;
        for (const auto& e : v) s += (s.empty() ? "" : ",") + config_value(e);
        return s;
    }
    throw ValidationError("config: unsupported value " + v.dump());
}

}  // namespace

std::vector<std::string> merge_config(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::string path;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config") {
            if (k + 1 >= args.size()) throw ValidationError("--config needs a path");
            path = args[++k];
        } else if (args[k].rfind("--config=", 0) == 0) {
            path = args[k].substr(9);
        } else {
            rest.push_back(args[k]);
        }
    }
    if (path.empty()) return rest;

    Json cfg;
    try {
        cfg = Json::parse(read_text(path));
    } catch (const Json::exception& e) {
        throw ValidationError("config: malformed JSON in '" + path + "': " + e.what());
    }
    if (!cfg.is_object()) throw ValidationError("config: top level must be an object");

    auto given = [&rest](const std::string& flag) {
        return std::any_of(rest.begin(), rest.end(),
                           [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    };
    if ((rest.empty() || rest[0].rfind("-", 0) == 0) && cfg.contains("command"))
        rest.insert(rest.begin(), cfg.at("command").get<std::string>());
    for (const auto& [key, val] : cfg.items()) {
        if (key == "command") continue;
        const std::string flag = key.rfind("--", 0) == 0 ? key : "--" + key;
        if (given(flag)) continue;
        if (val.is_boolean()) {
            if (val.get<bool>()) rest.push_back(flag);
            continue;
        }
        rest.push_back(flag + "=" + config_value(val));
    }
    return rest;
}

int run(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
    CLI::App app{"Affine surfaces from soliton equations", "affsurf"};
    app.require_subcommand(1);
    SolveOpts solve;
    MapOpts mapo;
    BuildOpts build;
    VerifyOpts ver;
    ImmerseOpts imm;
    LiouvilleOpts liou;
    CatalogueOpts cat;
    FamilyOpts fam;
    ExportOpts exp;
    add_solve(app, solve);
    add_map(app, mapo);
    add_build(app, build);
    add_verify(app, ver);
    add_immerse(app, imm);
    add_liouville(app, liou);
    add_catalogue(app, cat);
    add_family(app, fam);
    add_export(app, exp);
    app.add_option("--config", "JSON file of flag values; explicit flags win");

    try {
        std::vector<std::string> args = merge_config(raw);
        std::reverse(args.begin(), args.end());
        app.parse(args);

        Json summary;
        if (app.got_subcommand("solve")) summary = do_solve(solve);
        else if (app.got_subcommand("map")) summary = do_map(mapo);
        else if (app.got_subcommand("build-structure")) summary = do_build(build);
        else if (app.got_subcommand("verify")) summary = do_verify(ver);
        else if (app.got_subcommand("immerse")) summary = do_immerse(imm);
        else if (app.got_subcommand("liouville")) summary = do_liouville(liou);
        else if (app.got_subcommand("catalogue")) summary = do_catalogue(cat);
        else if (app.got_subcommand("family")) summary = do_family(fam);
        else summary = do_export(exp);
        out << summary.dump() << "\n";
        return kExitOk;
    } catch (const ThresholdExceeded& e) {
        out << e.summary.dump() << "\n";
        err << e.what() << "\n";
        return kExitNumerical;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace affsurf::cli
