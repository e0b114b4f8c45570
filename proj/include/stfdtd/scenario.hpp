#pragma once

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "conventional.hpp"
#include "diagnostics.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "stability.hpp"

namespace stfdtd {

enum class Scheme { conventional_only, local_hybrid };

/// Probe placed by physical coordinates; resolved to indices per grid.
struct ProbeDef {
    std::string name;
    ProbeKind kind = ProbeKind::point_time_series;
    double z = 0.0;
    double y = 0.0;
    long every = 1;
    std::vector<long> at;
};

struct Scenario {
    std::string name;
    std::string description;
    double lambda0 = 1.0;
    GridSpec grid;
    MaterialMap materials;
    std::vector<SourceSpec> sources;
    std::vector<ProbeDef> probes;
    Scheme scheme = Scheme::local_hybrid;
    StepOptions step;
    BandShape band;
    bool unsafe_courant = false;
    std::string out_dir = "out";
    long snapshot_every = 0;
    int refinement = 1;

    double omega0() const { return 2.0 * M_PI / lambda0; }

    /// Courant bound used at load time: the generalized limit at the smallest
    /// index and the largest |beta| over the run, over sqrt(2) in 2D.
    double courant_bound() const
    {
        double b = materials.max_abs_beta(grid.n_steps * grid.dt);
        double s = courant_limit(materials.min_index(), b);
        if (grid.ny > 1) s /= std::sqrt(2.0);
        return s;
    }

    double courant_factor() const
    {
        double h = grid.ny > 1 ? std::min(grid.dz, grid.dy) : grid.dz;
        return grid.dt / h;
    }

    ProbeSpec resolve(const ProbeDef& p) const
    {
        ProbeSpec s;
        s.name = p.name;
        s.kind = p.kind;
        s.k = std::clamp(static_cast<int>(std::lround(p.z / grid.dz)), 0, grid.nz - 1);
        s.i = std::clamp(static_cast<int>(std::lround((p.y - grid.y_origin) / grid.dy)), 0, grid.ny - 1);
        s.every = p.every;
        s.at = p.at;
        return s;
    }

    /// Same physics on a mesh refined by `f` in z (and y in 2D) and time.
    Scenario refined(int f) const
    {
        Scenario s = *this;
        if (f <= 1) return s;
        s.refinement = refinement * f;
        s.grid.nz = (grid.nz - 1) * f + 1;
        s.grid.dz = grid.dz / f;
        if (grid.ny > 1) {
            s.grid.ny = (grid.ny - 1) * f + 1;
            s.grid.dy = grid.dy / f;
        }
        s.grid.dt = grid.dt / f;
        s.grid.n_steps = grid.n_steps * f;
        s.band.trail = band.trail * f;
        for (auto& src : s.sources)
            src.k_src = static_cast<int>(std::lround(src.z0 / s.grid.dz));
        for (auto& p : s.probes) {
            if (p.every > 0) p.every *= f;
            for (auto& a : p.at) a *= f;
        }
        s.snapshot_every = snapshot_every * f;
        return s;
    }

    /// The incident-only run: first medium everywhere, no interfaces.
    Scenario baseline() const
    {
        Scenario s = *this;
        s.materials.media = {materials.media.front()};
        s.materials.interfaces.clear();
        return s;
    }

    void validate() const
    {
        grid.validate();
        materials.validate();
        const double S = courant_factor();
        const double smax = courant_bound();
        if (!unsafe_courant && S > smax * (1 + 1e-12)) {
            std::ostringstream os;
            os << "grid.dt exceeds the stability bound: S = " << S << " > S_max = " << smax
               << " (n = " << materials.min_index() << ", |beta| = " << materials.max_abs_beta(grid.n_steps * grid.dt)
               << (grid.ny > 1 ? ", 2D factor 1/sqrt(2)" : "") << "); set scheme.unsafe_courant = true to override";
            throw ValidationError(os.str());
        }
        if (grid.nz < 8) throw ValidationError("grid.nz must be at least 8");
        for (auto& s : sources) {
            if (!(s.tau > 0)) throw ValidationError("source.tau must be positive");
            if (s.kind == SourceKind::line_time_pulse && (s.k_src < 1 || s.k_src > grid.nz - 2))
                throw ValidationError("source.z lies outside the grid interior");
            if (s.sigma_y < 0 || s.sigma_z < 0) throw ValidationError("source widths must be non-negative");
        }
        for (auto& p : probes) {
            if (p.z < 0 || p.z > (grid.nz - 1) * grid.dz) throw ValidationError("probe " + p.name + " lies outside the grid");
            if (p.name.empty()) throw ValidationError("probe.name required");
        }
        if (scheme == Scheme::local_hybrid) check_clearance();
    }

    /// Every transition band stays clear of the two outermost nodes during
    /// the run (sampled at 65 instants).
    void check_clearance() const
    {
        if (materials.interfaces.empty()) return;
        const long N = grid.n_steps;
        for (int j = 0; j <= 64; ++j) {
            const long n = N * j / 64;
            for (int i = 0; i < grid.ny; ++i)
                for (std::size_t q = 0; q < materials.interfaces.size(); ++q) {
                    const auto& tr = materials.interfaces[q];
                    const double z = tr.position(grid.y_at(i), n * grid.dt);
                    const int kI = interface_cell(z, grid.dz);
                    if (kI - band.width_cells() < 2 || kI + band.width_cells() > grid.nz - 3) {
                        std::ostringstream os;
                        os << "interface " << q << " transition region reaches the domain edge at step " << n
                           << " (z = " << z << "); enlarge the grid or shorten the run";
                        throw ValidationError(os.str());
                    }
                }
        }
    }
};

namespace parse {

struct Entry {
    std::string value;
    int line = 0;
    int column = 0;
};

struct Section {
    std::string name;
    int line = 0;
    std::map<std::string, Entry> keys;
};

inline std::string trim(const std::string& s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::vector<Section> sections(std::istream& in)
{
    std::vector<Section> out;
    std::string raw;
    int ln = 0;
    while (std::getline(in, raw)) {
        ++ln;
        std::string line = raw;
        if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
        std::string t = trim(line);
        if (t.empty()) continue;
        const int col0 = static_cast<int>(line.find_first_not_of(" \t")) + 1;
        if (t.front() == '[') {
            if (t.back() != ']') throw ParseError("unterminated section header", ln, col0 + static_cast<int>(t.size()));
            std::string name = trim(t.substr(1, t.size() - 2));
            if (name.empty()) throw ParseError("empty section name", ln, col0 + 1);
            for (char c : name)
                if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
                    throw ParseError("invalid character in section name", ln, col0 + 1);
            out.push_back({name, ln, {}});
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", ln, col0);
        if (out.empty()) throw ParseError("key outside of any section", ln, col0);
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError("missing key before '='", ln, static_cast<int>(eq) + 1);
        std::string val = trim(line.substr(eq + 1));
        if (val.empty()) throw ParseError("missing value after '='", ln, static_cast<int>(eq) + 2);
        const int vcol = static_cast<int>(line.find_first_not_of(" \t", eq + 1)) + 1;
        if (out.back().keys.count(key)) throw ParseError("duplicate key '" + key + "'", ln, col0);
        out.back().keys[key] = {val, ln, vcol};
    }
    return out;
}

/// Values: a number with an optional unit suffix (c, deg, rad), or
/// [number *] name [/ number] with name one of the known quantities.
class Resolver {
public:
    std::map<std::string, double> names;

    double number(const Entry& e) const { return eval(e.value, e); }

    double eval(const std::string& text, const Entry& e, int offset = 0) const
    {
        std::string s = text;
        double factor = 1.0, divisor = 1.0;
        std::string atom = s;
        int atom_col = offset;
        if (auto st = s.find('*'); st != std::string::npos) {
            factor = plain(trim(s.substr(0, st)), e, offset);
            atom = s.substr(st + 1);
            atom_col = offset + static_cast<int>(st) + 1;
        }
        if (auto sl = atom.find('/'); sl != std::string::npos) {
            divisor = plain(trim(atom.substr(sl + 1)), e, atom_col + static_cast<int>(sl) + 1);
            if (divisor == 0) throw ParseError("division by zero", e.line, e.column + atom_col + static_cast<int>(sl) + 1);
            atom = atom.substr(0, sl);
        }
        atom = trim(atom);
        double base;
        if (!atom.empty() && (std::isalpha(static_cast<unsigned char>(atom[0])) || atom[0] == '_')) {
            auto it = names.find(atom);
            if (it == names.end()) throw ParseError("unknown quantity '" + atom + "'", e.line, e.column + atom_col);
            base = it->second;
        } else {
            base = plain(atom, e, atom_col);
        }
        return factor * base / divisor;
    }

    std::vector<double> list(const Entry& e) const
    {
        std::vector<double> v;
        std::size_t start = 0;
        while (start <= e.value.size()) {
            auto c = e.value.find(',', start);
            std::string item = e.value.substr(start, c == std::string::npos ? std::string::npos : c - start);
            v.push_back(eval(trim(item), e, static_cast<int>(start)));
            if (c == std::string::npos) break;
            start = c + 1;
        }
        return v;
    }

private:
    static double plain(const std::string& t, const Entry& e, int col)
    {
        std::size_t used = 0;
        double x;
        try {
            x = std::stod(t, &used);
        } catch (const std::exception&) {
            throw ParseError("malformed number '" + t + "'", e.line, e.column + col);
        }
        std::string suf = trim(t.substr(used));
        if (suf.empty() || suf == "c" || suf == "rad") return x;
        if (suf == "deg") return x * M_PI / 180.0;
        throw ParseError("unknown unit suffix '" + suf + "'", e.line, e.column + col + static_cast<int>(used));
    }
};

inline bool boolean(const Entry& e)
{
    if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
    if (e.value == "false" || e.value == "no" || e.value == "0") return false;
    throw ParseError("expected true or false", e.line, e.column);
}

} // namespace parse

/// Reads the sectioned key-value format, see scenarios/*.scenario.
inline Scenario parse_scenario(std::istream& in)
{
    using namespace parse;
    auto secs = sections(in);
    Scenario sc;
    Resolver R;
    R.names["pi"] = M_PI;
    auto need = [](const Section& s, const char* key) -> const Entry& {
        auto it = s.keys.find(key);
        if (it == s.keys.end()) throw ValidationError(s.name + "." + key + " required");
        return it->second;
    };
    auto has = [](const Section& s, const char* key) { return s.keys.count(key) > 0; };
    auto check_keys = [](const Section& s, std::initializer_list<const char*> allowed) {
        for (auto& [k, e] : s.keys) {
            bool ok = false;
            for (auto a : allowed) ok = ok || k == a;
            if (!ok) throw ValidationError("unknown key " + s.name + "." + k);
        }
    };

    const Section* grid = nullptr;
    for (auto& s : secs)
        if (s.name == "grid") {
            if (grid) throw ValidationError("duplicate [grid] section");
            grid = &s;
        }
    if (!grid) throw ValidationError("[grid] section required");
    check_keys(*grid, {"lambda0", "nz", "ny", "dz", "dy", "dt", "steps", "z_extent", "y_extent", "y_origin"});
    sc.lambda0 = has(*grid, "lambda0") ? R.number(grid->keys.at("lambda0")) : 1.0;
    if (!(sc.lambda0 > 0)) throw ValidationError("grid.lambda0 must be positive");
    R.names["lambda0"] = sc.lambda0;
    R.names["period"] = sc.lambda0;
    R.names["omega0"] = sc.omega0();
    sc.grid.dz = R.number(need(*grid, "dz"));
    R.names["dz"] = sc.grid.dz;
    sc.grid.dy = has(*grid, "dy") ? R.number(grid->keys.at("dy")) : sc.grid.dz;
    R.names["dy"] = sc.grid.dy;
    sc.grid.dt = R.number(need(*grid, "dt"));
    R.names["dt"] = sc.grid.dt;
    if (has(*grid, "nz")) sc.grid.nz = static_cast<int>(R.number(grid->keys.at("nz")));
    else if (has(*grid, "z_extent")) sc.grid.nz = static_cast<int>(std::lround(R.number(grid->keys.at("z_extent")) / sc.grid.dz)) + 1;
    else throw ValidationError("grid.nz required");
    if (has(*grid, "ny")) sc.grid.ny = static_cast<int>(R.number(grid->keys.at("ny")));
    else if (has(*grid, "y_extent")) sc.grid.ny = static_cast<int>(std::lround(R.number(grid->keys.at("y_extent")) / sc.grid.dy)) + 1;
    else sc.grid.ny = 1;
    sc.grid.n_steps = static_cast<long>(std::lround(R.number(need(*grid, "steps"))));
    sc.grid.y_origin = has(*grid, "y_origin") ? R.number(grid->keys.at("y_origin")) : 0.0;

    sc.materials.media.clear();
    for (auto& s : secs) {
        if (s.name == "grid") continue;
        if (s.name == "scenario") {
            check_keys(s, {"name", "description"});
            if (has(s, "name")) sc.name = s.keys.at("name").value;
            if (has(s, "description")) sc.description = s.keys.at("description").value;
        } else if (s.name == "scheme") {
            check_keys(s, {"kind", "constitutive", "boundary", "trail_cells", "lead_cells", "unsafe_courant", "check_finite", "subcell_eps"});
            if (has(s, "kind")) {
                auto& e = s.keys.at("kind");
                if (e.value == "local_hybrid") sc.scheme = Scheme::local_hybrid;
                else if (e.value == "conventional_only") sc.scheme = Scheme::conventional_only;
                else throw ValidationError("scheme.kind must be local_hybrid or conventional_only");
            }
            if (has(s, "constitutive")) {
                auto& e = s.keys.at("constitutive");
                if (e.value == "displacement") sc.step.constitutive = ConstitutiveUpdate::displacement;
                else if (e.value == "electric") sc.step.constitutive = ConstitutiveUpdate::electric;
                else throw ValidationError("scheme.constitutive must be displacement or electric");
            }
            if (has(s, "boundary")) {
                auto& e = s.keys.at("boundary");
                if (e.value == "mur") sc.step.boundary = Boundary::mur;
                else if (e.value == "pec") sc.step.boundary = Boundary::pec;
                else if (e.value == "periodic") sc.step.boundary = Boundary::periodic;
                else throw ValidationError("scheme.boundary must be mur, pec or periodic");
            }
            if (has(s, "trail_cells")) sc.band.trail = static_cast<int>(R.number(s.keys.at("trail_cells")));
            if (has(s, "lead_cells")) sc.band.lead = static_cast<int>(R.number(s.keys.at("lead_cells")));
            if (sc.band.trail < 0 || sc.band.lead < 0) throw ValidationError("scheme band widths must be non-negative");
            if (has(s, "unsafe_courant")) sc.unsafe_courant = boolean(s.keys.at("unsafe_courant"));
            if (has(s, "subcell_eps")) sc.materials.subcell = boolean(s.keys.at("subcell_eps"));
            if (has(s, "check_finite")) sc.step.check_finite = boolean(s.keys.at("check_finite"));
        } else if (s.name == "medium") {
            check_keys(s, {"eps", "mu"});
            Medium m;
            m.epsilon = R.number(need(s, "eps"));
            m.mu = has(s, "mu") ? R.number(s.keys.at("mu")) : 1.0;
            sc.materials.media.push_back(m);
        } else if (s.name == "interface") {
            check_keys(s, {"kind", "z0", "beta", "a_prime", "beta0", "t_ref", "coeffs", "y_vertex", "segments"});
            const std::string kind = has(s, "kind") ? s.keys.at("kind").value : "uniform";
            const double z0 = R.number(need(s, "z0"));
            if (kind == "uniform") {
                sc.materials.interfaces.push_back(InterfaceTrajectory::uniform(z0, R.number(need(s, "beta"))));
            } else if (kind == "accelerated") {
                sc.materials.interfaces.push_back(InterfaceTrajectory::accelerated(
                    z0, R.number(need(s, "a_prime")), has(s, "beta0") ? R.number(s.keys.at("beta0")) : 0.0,
                    has(s, "t_ref") ? R.number(s.keys.at("t_ref")) : 0.0));
            } else if (kind == "curved") {
                sc.materials.interfaces.push_back(InterfaceTrajectory::curved(
                    z0, R.list(need(s, "coeffs")), has(s, "beta") ? R.number(s.keys.at("beta")) : 0.0,
                    has(s, "y_vertex") ? R.number(s.keys.at("y_vertex")) : 0.0));
            } else if (kind == "piecewise") {
                auto& e = need(s, "segments");
                std::vector<std::pair<double, double>> segs;
                std::stringstream ss(e.value);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    auto c = item.find(':');
                    if (c == std::string::npos) throw ParseError("segment must be t_start:beta", e.line, e.column);
                    segs.emplace_back(R.eval(trim(item.substr(0, c)), e), R.eval(trim(item.substr(c + 1)), e));
                }
                sc.materials.interfaces.push_back(InterfaceTrajectory::piecewise(z0, segs));
            } else {
                throw ValidationError("interface.kind must be uniform, accelerated, curved or piecewise");
            }
        } else if (s.name == "source") {
            check_keys(s, {"kind", "E0", "omega", "theta", "tau", "T0", "sigma_y", "sigma_z", "z", "y"});
            SourceSpec src;
            const std::string kind = has(s, "kind") ? s.keys.at("kind").value : "line";
            if (kind == "line") src.kind = SourceKind::line_time_pulse;
            else if (kind == "spatial") src.kind = SourceKind::spatial_initial_pulse;
            else throw ValidationError("source.kind must be line or spatial");
            if (has(s, "E0")) src.E0 = R.number(s.keys.at("E0"));
            if (has(s, "omega")) src.omega = R.number(s.keys.at("omega"));
            if (has(s, "theta")) src.theta = R.number(s.keys.at("theta"));
            src.tau = R.number(need(s, "tau"));
            if (has(s, "T0")) src.T0 = R.number(s.keys.at("T0"));
            if (has(s, "sigma_y")) src.sigma_y = R.number(s.keys.at("sigma_y"));
            if (has(s, "sigma_z")) src.sigma_z = R.number(s.keys.at("sigma_z"));
            src.z0 = R.number(need(s, "z"));
            if (has(s, "y")) src.y0 = R.number(s.keys.at("y"));
            src.k_src = static_cast<int>(std::lround(src.z0 / sc.grid.dz));
            sc.sources.push_back(src);
        } else if (s.name == "probe") {
            check_keys(s, {"name", "kind", "z", "y", "every", "at"});
            ProbeDef p;
            p.name = need(s, "name").value;
            const std::string kind = has(s, "kind") ? s.keys.at("kind").value : "point";
            if (kind == "point") p.kind = ProbeKind::point_time_series;
            else if (kind == "line") p.kind = ProbeKind::line_snapshot;
            else if (kind == "full") p.kind = ProbeKind::full_snapshot;
            else throw ValidationError("probe.kind must be point, line or full");
            p.z = has(s, "z") ? R.number(s.keys.at("z")) : 0.0;
            p.y = has(s, "y") ? R.number(s.keys.at("y")) : 0.0;
            if (has(s, "every")) p.every = static_cast<long>(R.number(s.keys.at("every")));
            if (has(s, "at"))
                for (double a : R.list(s.keys.at("at"))) p.at.push_back(static_cast<long>(std::lround(a)));
            sc.probes.push_back(p);
        } else if (s.name == "output") {
            check_keys(s, {"dir", "snapshot_every"});
            if (has(s, "dir")) sc.out_dir = s.keys.at("dir").value;
            if (has(s, "snapshot_every")) sc.snapshot_every = static_cast<long>(R.number(s.keys.at("snapshot_every")));
        } else {
            throw ValidationError("unknown section [" + s.name + "]");
        }
    }
    if (sc.materials.media.empty()) sc.materials.media.push_back(Medium{});
    sc.validate();
    return sc;
}

inline Scenario load_scenario(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open scenario file " + path);
    Scenario s = parse_scenario(f);
    if (s.name.empty()) {
        auto slash = path.find_last_of('/');
        std::string base = path.substr(slash == std::string::npos ? 0 : slash + 1);
        s.name = base.substr(0, base.find('.'));
    }
    return s;
}

inline Scenario parse_scenario_text(const std::string& text)
{
    std::istringstream in(text);
    return parse_scenario(in);
}

} // namespace stfdtd
