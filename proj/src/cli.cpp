#include "glduality/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace glduality::cli {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string &v) {
    double x = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(x))
        throw std::invalid_argument("expected a number, got '" + v + "'");
    return x;
}

long long to_integer(const std::string &v) {
    long long x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw std::invalid_argument("expected an integer, got '" + v + "'");
    return x;
}

int to_int(const std::string &v) { return static_cast<int>(to_integer(v)); }

template <typename E>
E pick(const std::string &v, std::initializer_list<std::pair<const char *, E>> options) {
    std::string names;
    for (const auto &[name, value] : options) {
        if (v == name) return value;
        names += names.empty() ? name : std::string(" | ") + name;
    }
    throw std::invalid_argument("expected one of " + names + ", got '" + v + "'");
}

Model parse_model(const std::string &v) {
    return pick<Model>(v, {{"gl3d", Model::GL3D}, {"scalar1d", Model::Scalar1D}, {"scalar2d", Model::Scalar2D}});
}

std::vector<double> to_list(const std::string &v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
    return out;
}

using Setter = std::function<void(RunConfig &, const std::string &)>;
using Getter = std::function<std::string(const RunConfig &)>;
struct Key {
    const char *section;
    const char *name;
    Setter set;
    Getter get;
};

#define GL_DOUBLE(sec, key, member)                                                                             \
    Key{sec, key, [](RunConfig &c, const std::string &v) { c.member = to_double(v); },                        \
        [](const RunConfig &c) { return fmt(c.member); }}
#define GL_INT(sec, key, member)                                                                                \
    Key{sec, key, [](RunConfig &c, const std::string &v) { c.member = to_int(v); },                           \
        [](const RunConfig &c) { return std::to_string(c.member); }}

const std::vector<Key> &keys() {
    static const std::vector<Key> table = {
        Key{"run", "model", [](RunConfig &c, const std::string &v) { c.model = parse_model(v); },
            [](const RunConfig &c) { return to_string(c.model); }},
        Key{"run", "command",
            [](RunConfig &c, const std::string &v) {
                const auto cmd = parse_command(v);
                if (!cmd) throw std::invalid_argument("expected solve | certify | sweep | export, got '" + v + "'");
                c.command = *cmd;
            },
            [](const RunConfig &c) { return to_string(c.command); }},
        Key{"run", "out", [](RunConfig &c, const std::string &v) { c.out = v; },
            [](const RunConfig &c) { return c.out; }},
        Key{"run", "seed",
            [](RunConfig &c, const std::string &v) {
                const long long s = to_integer(v);
                if (s < 0) throw std::invalid_argument("seed must be non-negative");
                c.seed = static_cast<std::uint64_t>(s);
            },
            [](const RunConfig &c) { return std::to_string(c.seed); }},
        GL_INT("grid", "inner_cells", inner_cells),
        GL_INT("grid", "outer_cells", outer_cells),
        GL_INT("grid", "cells", cells),
        GL_DOUBLE("model", "gamma", params.gamma),
        GL_DOUBLE("model", "alpha", params.alpha),
        GL_DOUBLE("model", "beta", params.beta),
        GL_DOUBLE("model", "rho", params.rho),
        GL_DOUBLE("model", "K0", params.K0),
        Key{"model", "magnetic",
            [](RunConfig &c, const std::string &v) {
                c.params.magnetic = pick<MagneticNormalization>(
                    v, {{"coupling", MagneticNormalization::Coupling}, {"gaussian", MagneticNormalization::Gaussian}});
            },
            [](const RunConfig &c) {
                return std::string(c.params.magnetic == MagneticNormalization::Gaussian ? "gaussian" : "coupling");
            }},
        GL_DOUBLE("scalar", "load", load),
        GL_INT("scalar", "multistart", multistart),
        GL_DOUBLE("field", "B0", B0),
        Key{"field", "envelope", [](RunConfig &c, const std::string &v) { c.envelope = parse_envelope(v); },
            [](const RunConfig &c) { return to_string(c.envelope); }},
        Key{"field", "sweep", [](RunConfig &c, const std::string &v) { c.sweep = to_list(v); },
            [](const RunConfig &c) {
                std::string s;
                for (double b : c.sweep) s += (s.empty() ? "" : ",") + fmt(b);
                return s;
            }},
        Key{"start", "kind",
            [](RunConfig &c, const std::string &v) {
                c.start = pick<StartKind>(v, {{"default", StartKind::Default}, {"random", StartKind::Random}});
            },
            [](const RunConfig &c) { return to_string(c.start); }},
        GL_DOUBLE("start", "amplitude", start_amplitude),
        GL_DOUBLE("solver", "line_shift", params.line_shift),
        GL_INT("solver", "line_axis", params.line_axis),
        GL_DOUBLE("solver", "linear_tol", params.linear_tol),
        GL_INT("solver", "max_krylov", params.max_krylov),
        GL_DOUBLE("solver", "outer_tol", params.outer_tol),
        GL_INT("solver", "max_outer", params.max_outer),
        GL_DOUBLE("solver", "damping", params.damping),
        Key{"certify", "K",
            [](RunConfig &c, const std::string &v) {
                if (v == "auto") {
                    c.auto_K = true;
                } else {
                    c.auto_K = false;
                    c.params.K = to_double(v);
                }
            },
            [](const RunConfig &c) { return c.auto_K ? std::string("auto") : fmt(c.params.K); }},
        GL_DOUBLE("certify", "K2", params.K2),
        GL_DOUBLE("certify", "residual_tol", residual_tol),
    };
    return table;
}

#undef GL_DOUBLE
#undef GL_INT

std::vector<std::string> validate(const RunConfig &c) {
    std::vector<std::string> p;
    try {
        c.params.validate();
    } catch (const std::exception &e) {
        p.emplace_back(e.what());
    }
    if (c.model == Model::GL3D) {
        if (c.inner_cells < 2) p.emplace_back("grid.inner_cells must be at least 2");
        if (c.outer_cells <= c.inner_cells || (c.outer_cells - c.inner_cells) % 2 != 0)
            p.emplace_back("grid.outer_cells must exceed grid.inner_cells by a positive even number");
    } else if (c.cells < 4) {
        p.emplace_back("grid.cells must be at least 4");
    }
    if (c.command == Command::Sweep) {
        if (c.model != Model::GL3D) p.emplace_back("sweep runs the gl3d model only");
        if (c.sweep.empty()) p.emplace_back("sweep needs field.sweep = <B0>,<B0>,...");
    }
    if (c.start_amplitude < 0.0) p.emplace_back("start.amplitude must be non-negative");
    if (c.multistart < 0) p.emplace_back("scalar.multistart must be non-negative");
    if (c.residual_tol < 0.0) p.emplace_back("certify.residual_tol must be non-negative");
    if (c.out.empty()) p.emplace_back("run.out must not be empty");
    return p;
}

std::string join(const std::vector<std::string> &v) {
    std::string s;
    for (const auto &x : v) s += (s.empty() ? "" : "\n") + x;
    return s;
}

} // namespace

std::string to_string(Model m) {
    switch (m) {
    case Model::GL3D: return "gl3d";
    case Model::Scalar1D: return "scalar1d";
    case Model::Scalar2D: return "scalar2d";
    }
    return "?";
}

std::string to_string(Command c) {
    switch (c) {
    case Command::Solve: return "solve";
    case Command::Certify: return "certify";
    case Command::Sweep: return "sweep";
    case Command::Export: return "export";
    }
    return "?";
}

std::string to_string(Envelope e) {
    switch (e) {
    case Envelope::Bump: return "paper-envelope";
    case Envelope::Uniform: return "uniform";
    case Envelope::Zero: return "zero";
    }
    return "?";
}

std::string to_string(StartKind s) { return s == StartKind::Random ? "random" : "default"; }

std::optional<Command> parse_command(const std::string &name) {
    if (name == "solve") return Command::Solve;
    if (name == "certify") return Command::Certify;
    if (name == "sweep") return Command::Sweep;
    if (name == "export") return Command::Export;
    return std::nullopt;
}

Envelope parse_envelope(const std::string &name) {
    return pick<Envelope>(name, {{"paper-envelope", Envelope::Bump}, {"uniform", Envelope::Uniform},
                                 {"zero", Envelope::Zero}});
}

ConfigError::ConfigError(std::vector<std::string> p) : std::runtime_error(join(p)), problems(std::move(p)) {}

RunConfig parse_config(const std::string &text) {
    RunConfig c;
    std::vector<std::string> problems;
    std::map<std::string, const Key *> lookup;
    for (const auto &k : keys()) lookup[std::string(k.section) + "." + k.name] = &k;

    std::istringstream in(text);
    std::string raw, section;
    bool have_model = false;
    std::map<std::string, int> seen;
    for (int line = 1; std::getline(in, raw); ++line) {
        const auto hash = raw.find_first_of("#;");
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        const std::string where = "line " + std::to_string(line) + ": ";
        if (s.front() == '[') {
            if (s.back() != ']') {
                problems.push_back(where + "malformed section header '" + s + "'");
                continue;
            }
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            problems.push_back(where + "expected key = value");
            continue;
        }
        const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
        const std::string full = section + "." + key;
        const auto it = lookup.find(full);
        if (it == lookup.end()) {
            problems.push_back(where + "unknown key '" + (section.empty() ? key : full) + "'");
            continue;
        }
        if (const auto prev = seen.find(full); prev != seen.end()) {
            problems.push_back(where + "'" + full + "' already set on line " + std::to_string(prev->second));
            continue;
        }
        seen[full] = line;
        try {
            it->second->set(c, value);
            if (full == "run.model") have_model = true;
        } catch (const std::exception &e) {
            problems.push_back(where + full + ": " + e.what());
        }
    }
    if (!have_model) problems.emplace_back("missing required key run.model");
    for (auto &p : validate(c)) problems.push_back(std::move(p));
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return c;
}

RunConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot read " + path.string()});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig &config) {
    std::string out, section;
    for (const auto &k : keys()) {
        if (section != k.section) {
            section = k.section;
            out += (out.empty() ? "[" : "\n[") + section + "]\n";
        }
        const std::string v = k.get(config);
        if (std::string(k.name) == "sweep" && v.empty()) continue;
        out += std::string(k.name) + " = " + v + "\n";
    }
    return out;
}

double bump_envelope(double x, double y, double z) {
    auto f = [](double t) { return (t - 1.5) * (t - 1.5) * (t + 1.5); };
    return f(x) * f(y) * f(z) / 729.0;
}

RealVectorField builtin_envelope(Envelope e, const BoxGrid &grid, double amplitude) {
    RealVectorField B = RealVectorField::zeros(grid);
    if (e == Envelope::Zero) return B;
    for (int q = 0; q < grid.size(); ++q) {
        const auto x = grid.position(q);
        const double f = e == Envelope::Uniform ? 1.0 : bump_envelope(x[0], x[1], x[2]);
        B.values[0][q] = amplitude * f;
        B.values[1][q] = amplitude * f;
    }
    return B;
}

void export_slice_csv(const RealScalarField &field, int axis, double coordinate, const std::filesystem::path &path) {
    if (axis < 0 || axis > 2) throw std::invalid_argument("export_slice_csv: axis must be 0, 1 or 2");
    const BoxGrid &g = field.grid;
    const int n = g.nodes()[axis];
    const int plane = std::clamp(static_cast<int>(std::lround((coordinate - g.lower()[axis]) / g.spacing())), 0, n - 1);
    const int a = axis == 0 ? 1 : 0, b = axis == 2 ? 1 : 2;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "x,y,value\n";
    NodeIndex idx;
    idx[axis] = plane;
    for (int j = 0; j < g.nodes()[b]; ++j) {
        idx[b] = j;
        for (int i = 0; i < g.nodes()[a]; ++i) {
            idx[a] = i;
            out << fmt(g.coordinate(a, i)) << ',' << fmt(g.coordinate(b, j)) << ',' << fmt(field.values[g.index(idx)])
                << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<SliceRow> read_slice_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    if (trim(line) != "x,y,value") throw std::runtime_error(path.string() + ": unexpected header");
    std::vector<SliceRow> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string x, y, v;
        std::getline(ss, x, ',');
        std::getline(ss, y, ',');
        std::getline(ss, v);
        rows.push_back({to_double(trim(x)), to_double(trim(y)), to_double(trim(v))});
    }
    return rows;
}

namespace {

std::ofstream vtk_header(const BoxGrid &g, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# vtk DataFile Version 3.0\nglduality\nASCII\nDATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << g.nodes()[0] << ' ' << g.nodes()[1] << ' ' << g.nodes()[2] << '\n';
    out << "ORIGIN " << fmt(g.lower()[0]) << ' ' << fmt(g.lower()[1]) << ' ' << fmt(g.lower()[2]) << '\n';
    out << "SPACING " << fmt(g.spacing()) << ' ' << fmt(g.spacing()) << ' ' << fmt(g.spacing()) << '\n';
    out << "POINT_DATA " << g.size() << '\n';
    return out;
}

} // namespace

void export_vtk(const RealScalarField &field, const std::string &name, const std::filesystem::path &path) {
    auto out = vtk_header(field.grid, path);
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : field.values) out << fmt(v) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void export_vtk(const RealVectorField &field, const std::string &name, const std::filesystem::path &path) {
    auto out = vtk_header(field.grid, path);
    out << "VECTORS " << name << " double\n";
    for (int q = 0; q < field.grid.size(); ++q)
        out << fmt(field.values[0][q]) << ' ' << fmt(field.values[1][q]) << ' ' << fmt(field.values[2][q]) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

// Flat key = value report file.
class Report {
public:
    void add(const std::string &key, const std::string &value) { lines_ += key + " = " + value + "\n"; }
    void add(const std::string &key, double value) { add(key, fmt(value)); }
    void add(const std::string &key, int value) { add(key, std::to_string(value)); }
    void add(const std::string &key, bool value) { add(key, std::string(value ? "true" : "false")); }
    void write(const std::filesystem::path &path) const {
        std::ofstream out(path);
        out << lines_;
        if (!out) throw std::runtime_error("write failed for " + path.string());
    }

private:
    std::string lines_;
};

void add_certificate(Report &r, const DualCertificate &c) {
    r.add("certificate.K", c.K);
    r.add("certificate.primal", c.primal);
    r.add("certificate.dual", c.dual);
    r.add("certificate.gap", c.gap);
    r.add("certificate.primal_residual", c.primal_residual);
    r.add("certificate.stationarity_v1", c.stationarity_v1);
    r.add("certificate.stationarity_v0", c.stationarity_v0);
    r.add("certificate.multiplier_agreement", c.multiplier_agreement);
    r.add("certificate.e_box", c.e_box);
    r.add("certificate.a_plus", c.a_plus);
    r.add("certificate.b_plus", c.b_plus);
    r.add("certificate.dual_bound", c.dual_bound);
    r.add("certificate.amplitude_ok", c.amplitude_ok);
    r.add("certificate.min_second_variation", c.min_second_variation);
    if (c.min_dual_hessian) r.add("certificate.min_dual_hessian", *c.min_dual_hessian);
    if (c.min_dual_hessian_full) r.add("certificate.min_dual_hessian_full", *c.min_dual_hessian_full);
}

struct GLRun {
    GLDomain domain;
    OuterResult result;
    double B0 = 0.0;
    RealVectorField field;
};

GLRun solve_gl(const RunConfig &c, double B0) {
    GLDomain domain(NestedGrid::centered(c.inner_cells, c.outer_cells));
    RealVectorField field = builtin_envelope(c.envelope, domain.outer(), B0);
    const FieldPair start = c.start == StartKind::Random ? random_start(domain, c.params, c.seed, c.start_amplitude)
                                                         : default_start(domain, c.params);
    OuterResult r = run_outer(domain, start, field, c.params);
    return {std::move(domain), std::move(r), B0, std::move(field)};
}

RealScalarField modulus_squared(const ComplexScalarField &phi) { return {phi.grid, phi.modulus_squared()}; }

void add_gl_report(Report &r, const RunConfig &c, const GLRun &run) {
    const auto &rep = run.result.report;
    const VectorXd m2 = run.result.fields.phi.modulus_squared();
    r.add("model", to_string(c.model));
    r.add("B0", run.B0);
    r.add("envelope", to_string(c.envelope));
    r.add("termination", to_string(rep.reason));
    if (!rep.message.empty()) r.add("message", rep.message);
    r.add("iterations", rep.iterations());
    r.add("initial_energy", rep.initial_energy);
    if (!rep.records.empty()) r.add("energy", rep.records.back().energy);
    r.add("mean_phi2", m2.mean());
    r.add("min_phi2", m2.minCoeff());
    r.add("max_phi2", m2.maxCoeff());
    for (const auto &rec : rep.records) {
        const std::string p = "iteration." + std::to_string(rec.iteration) + ".";
        r.add(p + "energy", rec.energy);
        r.add(p + "phi_change", rec.phi_change);
        r.add(p + "A_change", rec.A_change);
        r.add(p + "residual_phi", rec.residual_phi);
        r.add(p + "residual_A", rec.residual_A);
        r.add(p + "div_A", rec.div_A);
        r.add(p + "line_residual", rec.line_residual);
        r.add(p + "sweeps", rec.sweeps);
        r.add(p + "seconds", rec.seconds);
    }
}

std::string gl_summary(const GLRun &run) {
    const auto &rep = run.result.report;
    const VectorXd m2 = run.result.fields.phi.modulus_squared();
    std::ostringstream s;
    s << "B0=" << short_fmt(run.B0) << " termination=" << to_string(rep.reason) << " iterations=" << rep.iterations()
      << " energy=" << fmt(rep.records.empty() ? rep.initial_energy : rep.records.back().energy)
      << " mean_phi2=" << fmt(m2.mean()) << " min_phi2=" << fmt(m2.minCoeff());
    return s.str();
}

void auto_K(GLParams &p, double sup_phi) {
    p.K2 = amplitude_bound(sup_phi, p.beta);
    p.K = select_K(p.alpha, p.K2);
}

int run_gl(const RunConfig &c, const std::filesystem::path &dir, std::ostream &summary) {
    const GLRun run = solve_gl(c, c.B0);
    const bool converged = run.result.report.reason == Termination::ToleranceMet;
    Report report;
    report.add("command", to_string(c.command));
    add_gl_report(report, c, run);
    const auto &phi = run.result.fields.phi;
    export_slice_csv(modulus_squared(phi), 2, 0.0, dir / "phi2_z0.csv");
    if (c.command == Command::Export) {
        export_vtk(modulus_squared(phi), "phi2", dir / "phi2.vtk");
        export_vtk(run.result.fields.A, "A", dir / "A.vtk");
        export_vtk(run.field, "B0", dir / "B0.vtk");
    }
    summary << to_string(c.command) << " gl3d " << gl_summary(run) << '\n';
    if (c.command != Command::Certify) {
        report.write(dir / "report.txt");
        return converged ? Success : NotConverged;
    }

    GLParams p = c.params;
    if (c.auto_K) auto_K(p, std::sqrt(phi.modulus_squared().maxCoeff()));
    GLCertifyOptions opt;
    if (c.residual_tol > 0.0) opt.residual_tol = c.residual_tol;
    opt.seed = c.seed;
    try {
        const DualCertificate cert = certify_gl(run.domain, phi, run.result.fields.A, run.field, p, opt);
        add_certificate(report, cert);
        report.write(dir / "report.txt");
        summary << "certificate K=" << fmt(cert.K) << " primal=" << fmt(cert.primal) << " dual=" << fmt(cert.dual)
                << " gap=" << fmt(cert.gap) << " b_plus=" << (cert.b_plus ? "true" : "false") << '\n';
    } catch (const CertificateError &e) {
        report.add("certificate.error", std::string(e.what()));
        report.write(dir / "report.txt");
        summary << "certificate precondition failed: " << e.what() << '\n';
        return CertificatePrecondition;
    }
    return converged ? Success : NotConverged;
}

int run_sweep(const RunConfig &c, const std::filesystem::path &dir, std::ostream &summary) {
    std::vector<std::future<GLRun>> jobs;
    for (double b : c.sweep) jobs.push_back(std::async(std::launch::async, solve_gl, std::cref(c), b));
    std::ofstream table(dir / "sweep.csv");
    table << "B0,termination,iterations,energy,mean_phi2,min_phi2\n";
    summary << "sweep gl3d\n";
    int status = Success;
    for (auto &job : jobs) {
        const GLRun run = job.get();
        const auto sub = dir / ("B0_" + short_fmt(run.B0));
        std::filesystem::create_directories(sub);
        Report report;
        report.add("command", std::string("sweep"));
        add_gl_report(report, c, run);
        report.write(sub / "report.txt");
        export_slice_csv(modulus_squared(run.result.fields.phi), 2, 0.0, sub / "phi2_z0.csv");
        const auto &rep = run.result.report;
        const VectorXd m2 = run.result.fields.phi.modulus_squared();
        table << fmt(run.B0) << ',' << to_string(rep.reason) << ',' << rep.iterations() << ','
              << fmt(rep.records.empty() ? rep.initial_energy : rep.records.back().energy) << ',' << fmt(m2.mean())
              << ',' << fmt(m2.minCoeff()) << '\n';
        summary << "  " << gl_summary(run) << '\n';
        if (rep.reason != Termination::ToleranceMet) status = NotConverged;
    }
    if (!table) throw std::runtime_error("write failed for sweep.csv");
    return status;
}

int run_scalar(const RunConfig &c, const std::filesystem::path &dir, std::ostream &summary) {
    const int dim = c.model == Model::Scalar1D ? 1 : 2;
    const BoxGrid g = BoxGrid::dirichlet_interior(dim, 0.0, 1.0, c.cells);
    RealScalarField f = RealScalarField::zeros(g);
    for (int q = 0; q < g.size(); ++q) {
        const auto x = g.position(q);
        double v = c.load;
        for (int a = 0; a < dim; ++a) v *= std::sin(std::numbers::pi * x[a]);
        f.values[q] = v;
    }
    const auto runs = multistart_scalar(f, c.params, c.multistart, c.seed);
    Report report;
    report.add("command", to_string(c.command));
    report.add("model", to_string(c.model));
    report.add("load", c.load);
    report.add("converged_starts", static_cast<int>(runs.size()));
    if (runs.empty()) {
        report.write(dir / "report.txt");
        summary << to_string(c.command) << ' ' << to_string(c.model) << " no start converged\n";
        return NotConverged;
    }
    const auto &best = runs.front();
    report.add("energy", best.energy);
    report.add("residual", best.residual);
    report.add("newton_iterations", best.iterations);
    export_slice_csv(best.u, 2, 0.0, dir / "u.csv");
    if (c.command == Command::Export) export_vtk(best.u, "u", dir / "u.vtk");
    summary << to_string(c.command) << ' ' << to_string(c.model) << " energy=" << fmt(best.energy)
            << " residual=" << fmt(best.residual) << '\n';
    if (c.command != Command::Certify) {
        report.write(dir / "report.txt");
        return Success;
    }
    GLParams p = c.params;
    if (c.auto_K) auto_K(p, best.u.values.cwiseAbs().maxCoeff());
    try {
        const DualCertificate cert = certify_scalar(best.u, f, p, c.residual_tol > 0.0 ? c.residual_tol : 1e-9);
        add_certificate(report, cert);
        report.write(dir / "report.txt");
        summary << "certificate K=" << fmt(cert.K) << " primal=" << fmt(cert.primal) << " dual=" << fmt(cert.dual)
                << " gap=" << fmt(cert.gap) << " b_plus=" << (cert.b_plus ? "true" : "false") << '\n';
    } catch (const CertificateError &e) {
        report.add("certificate.error", std::string(e.what()));
        report.write(dir / "report.txt");
        summary << "certificate precondition failed: " << e.what() << '\n';
        return CertificatePrecondition;
    }
    return Success;
}

} // namespace

int run_command(const RunConfig &config, std::ostream &summary) {
    if (const auto problems = validate(config); !problems.empty()) throw ConfigError(problems);
    const std::filesystem::path dir = config.out;
    std::filesystem::create_directories(dir);
    {
        std::ofstream cfg(dir / "config.ini");
        cfg << serialize_config(config);
    }
    if (config.command == Command::Sweep) return run_sweep(config, dir, summary);
    if (config.model == Model::GL3D) return run_gl(config, dir, summary);
    return run_scalar(config, dir, summary);
}

} // namespace glduality::cli
