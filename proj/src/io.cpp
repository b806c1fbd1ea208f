#include "mfg/io.hpp"

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace mfg {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open for reading: " + path);
    return in;
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InputError(where + ": malformed number '" + s + "'");
    }
}

int parse_int(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InputError(where + ": malformed integer '" + s + "'");
    }
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    return out;
}

} // namespace

Scenario load_scenario_file(const std::string& path) {
    auto in = open_in(path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError(path + ":" + std::to_string(lineno) + ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    const auto base_it = kv.find("base");
    if (base_it == kv.end()) throw InputError(path + ": missing 'base = <preset>' line");
    const std::string base = base_it->second;
    kv.erase(base_it);

    ScenarioOverrides o;
    for (const auto& [key, value] : kv) {
        if (key == "I")
            o.intervals = parse_int(value, path);
        else if (key == "dt")
            o.dt = parse_double(value, path);
        else if (key == "T")
            o.horizon = parse_double(value, path);
        else if (key == "sigma")
            o.sigma = parse_double(value, path);
        else if (key == "theta")
            o.theta = parse_double(value, path);
        else if (key == "eta")
            o.eta = parse_double(value, path);
        else if (key == "zeta")
            o.zeta = parse_double(value, path);
        else if (key == "R")
            o.cap = parse_double(value, path);
        else if (key == "c")
            o.coefficient = parse_double(value, path);
        else if (key == "kappa")
            o.exponent = parse_double(value, path);
        else if (key == "m0") {
            if (value == "cosine")
                o.m0 = InitialDensityKind::CosineBump;
            else if (value == "uniform")
                o.m0 = InitialDensityKind::Uniform;
            else if (value == "bumps2d")
                o.m0 = InitialDensityKind::GaussianBumps2d;
            else
                throw InputError(path + ": unknown m0 profile '" + value + "'");
        } else {
            throw InputError(path + ": unknown key '" + key + "'");
        }
    }
    return make_preset(base, o);
}

void write_policy_csv(const std::string& path, const TwoSidedPolicyField& q) {
    auto out = open_out(path);
    const GridSpec& g = q.grid();
    out << (g.dim() == 1 ? "tau,i,axis,q_L,q_R\n" : "tau,i0,i1,axis,q_L,q_R\n");
    const int n1 = g.dim() == 2 ? g.nodes_along(1) : 1;
    for (int tau = 0; tau < q.levels(); ++tau) {
        for (int i0 = 0; i0 < g.nodes_along(0); ++i0) {
            for (int i1 = 0; i1 < n1; ++i1) {
                const int c = g.dim() == 1 ? i0 : i0 * n1 + i1;
                for (int a = 0; a < g.dim(); ++a) {
                    out << tau << ',' << i0;
                    if (g.dim() == 2) out << ',' << i1;
                    out << ',' << a << ',' << fmt17(q.ql(tau, c, a)) << ','
                        << fmt17(q.qr(tau, c, a)) << '\n';
                }
            }
        }
    }
    if (!out) throw InputError("write failed: " + path);
}

TwoSidedPolicyField read_policy_csv(const std::string& path, const GridSpec& grid) {
    auto in = open_in(path);
    TwoSidedPolicyField q(grid);
    std::string line;
    if (!std::getline(in, line)) throw InputError(path + ": empty policy file");
    const std::size_t expect = grid.dim() == 1 ? 5 : 6;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto cells = split_csv_row(line);
        if (cells.size() != expect) throw InputError(path + ": malformed policy row");
        const int tau = parse_int(cells[0], path);
        const int i0 = parse_int(cells[1], path);
        const int i1 = grid.dim() == 2 ? parse_int(cells[2], path) : 0;
        const int axis = parse_int(cells[grid.dim() == 1 ? 2 : 3], path);
        if (tau < 0 || tau >= q.levels() || axis < 0 || axis >= grid.dim() || i0 < 0 ||
            i0 >= grid.nodes_along(0) || i1 < 0 || (grid.dim() == 2 && i1 >= grid.nodes_along(1)))
            throw InputError(path + ": policy row out of range");
        const int c = grid.node(i0, i1);
        q.ql(tau, c, axis) = parse_double(cells[expect - 2], path);
        q.qr(tau, c, axis) = parse_double(cells[expect - 1], path);
    }
    return q;
}

void write_scalar_field_csv(const std::string& path, const ScalarField& field) {
    auto out = open_out(path);
    const GridSpec& g = field.grid();
    out << (g.dim() == 1 ? "tau,i,value\n" : "tau,i0,i1,value\n");
    const int n1 = g.dim() == 2 ? g.nodes_along(1) : 1;
    for (int tau = 0; tau < field.levels(); ++tau) {
        const auto level = field.level(tau);
        for (int i0 = 0; i0 < g.nodes_along(0); ++i0) {
            for (int i1 = 0; i1 < n1; ++i1) {
                out << tau << ',' << i0;
                if (g.dim() == 2) out << ',' << i1;
                out << ',' << fmt17(level[g.dim() == 1 ? i0 : i0 * n1 + i1]) << '\n';
            }
        }
    }
    if (!out) throw InputError("write failed: " + path);
}

ScalarField read_scalar_field_csv(const std::string& path, const GridSpec& grid, FieldRole role) {
    auto in = open_in(path);
    ScalarField field(grid, role);
    std::string line;
    if (!std::getline(in, line)) throw InputError(path + ": empty field file");
    const std::size_t expect = grid.dim() == 1 ? 3 : 4;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto cells = split_csv_row(line);
        if (cells.size() != expect) throw InputError(path + ": malformed field row");
        const int tau = parse_int(cells[0], path);
        const int i0 = parse_int(cells[1], path);
        const int i1 = grid.dim() == 2 ? parse_int(cells[2], path) : 0;
        if (tau < 0 || tau > grid.time_steps() || i0 < 0 || i0 >= grid.nodes_along(0) || i1 < 0 ||
            (grid.dim() == 2 && i1 >= grid.nodes_along(1)))
            throw InputError(path + ": field row out of range");
        field.level(tau)[grid.node(i0, i1)] = parse_double(cells[expect - 1], path);
    }
    return field;
}

void write_run_outputs(const SolveResult& result, const Scenario& scenario,
                       const SolverConfig& config, const std::string& out_dir,
                       std::optional<double> probe_min) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw InputError("cannot create output directory: " + out_dir);
    const auto join = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

    {
        auto out = open_out(join("residuals.csv"));
        out << "n,linf_policy_diff,a_n,J0,mass_drift,min_density\n";
        for (const auto& rec : result.report.history) {
            out << rec.n << ',' << fmt17(rec.policy_residual) << ',' << fmt17(rec.gap_energy)
                << ',' << fmt17(rec.energy) << ',' << fmt17(rec.mass_drift) << ','
                << fmt17(rec.min_density) << '\n';
        }
        if (!out) throw InputError("write failed: " + join("residuals.csv"));
    }

    write_scalar_field_csv(join("fields_M.csv"), result.m);
    write_scalar_field_csv(join("fields_U.csv"), result.u);

    {
        auto out = open_out(join("certification.json"));
        const auto& cert = result.report.certification;
        const GridSpec& g = scenario.grid;
        out << "{\n";
        out << "  \"policy_consistency\": " << fmt17(cert.policy_consistency) << ",\n";
        out << "  \"fpk_residual\": " << fmt17(cert.fpk_residual) << ",\n";
        out << "  \"hjb_residual\": " << fmt17(cert.hjb_residual) << ",\n";
        out << "  \"termination\": \"" << to_string(result.report.termination) << "\",\n";
        out << "  \"iterations\": " << result.report.iterations << ",\n";
        out << "  \"cap_activations\": " << result.report.cap_activations << ",\n";
        if (probe_min)
            out << "  \"monotonicity_probe_min\": " << fmt17(*probe_min) << ",\n";
        out << "  \"config\": {\n";
        out << "    \"scenario\": \"" << scenario.name << "\",\n";
        out << "    \"algorithm\": \"" << to_string(config.algorithm) << "\",\n";
        out << "    \"rate\": \"" << (config.rate == RateSchedule::TwoOverNPlus2 ? "2n" : "1n")
            << "\",\n";
        out << "    \"tolerance\": " << fmt17(config.tolerance) << ",\n";
        out << "    \"max_iterations\": " << config.max_iterations << ",\n";
        out << "    \"compat_discrete_step4\": "
            << (config.compat_discrete_smoothing ? "true" : "false") << ",\n";
        out << "    \"sigma\": " << fmt17(scenario.sigma) << ",\n";
        out << "    \"cap\": " << fmt17(scenario.hamiltonian.cap) << ",\n";
        out << "    \"dim\": " << g.dim() << ",\n";
        out << "    \"bc\": \"" << (g.bc() == Bc::Periodic ? "periodic" : "neumann") << "\",\n";
        out << "    \"I\": " << g.intervals(0) << ",\n";
        out << "    \"dt\": " << fmt17(g.dt()) << ",\n";
        out << "    \"time_steps\": " << g.time_steps() << ",\n";
        out << "    \"horizon\": " << fmt17(scenario.horizon) << "\n";
        out << "  }\n";
        out << "}\n";
        if (!out) throw InputError("write failed: " + join("certification.json"));
    }
}

} // namespace mfg
