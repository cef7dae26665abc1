#ifndef ANNULUS_CONFIG_HPP
#define ANNULUS_CONFIG_HPP

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "annulus/expr.hpp"
#include "annulus/hypothesis.hpp"
#include "annulus/nonlinear_system.hpp"

namespace annulus {

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what)
        : std::runtime_error("config line " + std::to_string(line) + ": " + what),
          line_(line)
    {
    }
    explicit ConfigError(const std::string& what)
        : std::runtime_error("config: " + what), line_(0)
    {
    }
    int line() const { return line_; }

private:
    int line_;
};

/*
 * Problem description, loaded from a TOML-subset text:
 * tables [geometry] [shift] [nonlinearity] [ladder] [solver] [checker],
 * scalar keys only, expressions as quoted strings, '#' comments.
 * Unknown tables or keys are rejected with the offending line number.
 */
struct ProblemConfig {
    // [geometry]
    int n = 0;
    double r0 = 0.0, r1 = 0.0;
    // [shift]
    double omega1 = 0.0, omega2 = 0.0;
    // [nonlinearity]
    std::string f1_text, f2_text;
    // [ladder]
    bool has_ladder = false, has_four_level = false;
    double rho1 = 0, rho2 = 0, s1 = 0, s2 = 0;
    double theta1 = 0, theta2 = 0, sigma1 = 0, sigma2 = 0;
    // [solver]
    int grid_n = 257;
    int max_grid_n = 2049;
    double tol = 1e-8;
    int max_iter = 50;
    // [checker]
    int base_per_axis = 9;
    int refine_rounds = 3;
    double z_bound = 0.0; // 0: derive from the ladder (10 x largest level)
    int h_density = 17;

    bool operator==(const ProblemConfig&) const = default;

    static ProblemConfig parse(const std::string& text);

    static ProblemConfig load(const std::string& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError("cannot open '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    AnnulusGeometry geometry() const
    {
        try {
            return AnnulusGeometry(n, r0, r1);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("[geometry] ") + e.what());
        }
    }

    NonlinearSystem system() const
    {
        if (f1_text.empty() || f2_text.empty())
            throw ConfigError("[nonlinearity] f1 and f2 are required for this command");
        try {
            return NonlinearSystem(Expr::parse(f1_text), Expr::parse(f2_text), omega1,
                                   omega2, geometry());
        } catch (const ParseError& e) {
            throw ConfigError(std::string("[nonlinearity] ") + e.what());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("[shift] ") + e.what());
        }
    }

    RadiiLadder ladder() const
    {
        if (!has_ladder)
            throw ConfigError("[ladder] required for this command");
        try {
            return has_four_level
                       ? RadiiLadder::four_level(rho1, rho2, s1, s2, theta1, theta2,
                                                 sigma1, sigma2)
                       : RadiiLadder::two_level(rho1, rho2, s1, s2);
        } catch (const LadderError& e) {
            throw ConfigError(std::string("[ladder] ") + e.what());
        }
    }

    // sampling box bound for (H) and the non-existence sweep
    double effective_z_bound() const
    {
        if (z_bound > 0.0)
            return z_bound;
        if (has_ladder) {
            double m = std::max(std::max(rho1, rho2), std::max(s1, s2));
            if (has_four_level)
                m = std::max(m, std::max(std::max(theta1, theta2), std::max(sigma1, sigma2)));
            return 10.0 * m;
        }
        return 10.0;
    }

    std::string serialize() const
    {
        char buf[64];
        auto num = [&buf](double v) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return std::string(buf);
        };
        std::string out;
        out += "[geometry]\n";
        out += "n = " + std::to_string(n) + "\n";
        out += "r0 = " + num(r0) + "\n";
        out += "r1 = " + num(r1) + "\n";
        out += "\n[shift]\n";
        out += "omega1 = " + num(omega1) + "\n";
        out += "omega2 = " + num(omega2) + "\n";
        if (!f1_text.empty() || !f2_text.empty()) {
            out += "\n[nonlinearity]\n";
            out += "f1 = \"" + f1_text + "\"\n";
            out += "f2 = \"" + f2_text + "\"\n";
        }
        if (has_ladder) {
            out += "\n[ladder]\n";
            out += "rho1 = " + num(rho1) + "\nrho2 = " + num(rho2) + "\n";
            out += "s1 = " + num(s1) + "\ns2 = " + num(s2) + "\n";
            if (has_four_level) {
                out += "theta1 = " + num(theta1) + "\ntheta2 = " + num(theta2) + "\n";
                out += "sigma1 = " + num(sigma1) + "\nsigma2 = " + num(sigma2) + "\n";
            }
        }
        out += "\n[solver]\n";
        out += "grid_n = " + std::to_string(grid_n) + "\n";
        out += "max_grid_n = " + std::to_string(max_grid_n) + "\n";
        out += "tol = " + num(tol) + "\n";
        out += "max_iter = " + std::to_string(max_iter) + "\n";
        out += "\n[checker]\n";
        out += "base_per_axis = " + std::to_string(base_per_axis) + "\n";
        out += "refine_rounds = " + std::to_string(refine_rounds) + "\n";
        if (z_bound > 0.0)
            out += "z_bound = " + num(z_bound) + "\n";
        out += "h_density = " + std::to_string(h_density) + "\n";
        return out;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

} // namespace detail

inline ProblemConfig ProblemConfig::parse(const std::string& text)
{
    ProblemConfig cfg;
    std::string table;
    int lineno = 0;
    bool seen_theta = false, seen_sigma = false;

    std::istringstream stream(text);
    std::string raw;
    while (std::getline(stream, raw)) {
        ++lineno;
        std::string_view line = detail::trim(raw);
        // comments: '#' outside quoted strings
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"')
                quoted = !quoted;
            else if (line[i] == '#' && !quoted) {
                line = detail::trim(line.substr(0, i));
                break;
            }
        }
        if (line.empty())
            continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(lineno, "malformed table header");
            table = std::string(detail::trim(line.substr(1, line.size() - 2)));
            if (table != "geometry" && table != "shift" && table != "nonlinearity" &&
                table != "ladder" && table != "solver" && table != "checker")
                throw ConfigError(lineno, "unknown table [" + table + "]");
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(lineno, "expected key = value");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view val = detail::trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError(lineno, "expected key = value");
        if (table.empty())
            throw ConfigError(lineno, "key '" + key + "' outside any table");

        auto as_string = [&]() -> std::string {
            if (val.size() < 2 || val.front() != '"' || val.back() != '"')
                throw ConfigError(lineno, "key '" + key + "' expects a quoted string");
            return std::string(val.substr(1, val.size() - 2));
        };
        auto as_double = [&]() -> double {
            double v = 0.0;
            const char* b = val.data();
            const char* e = val.data() + val.size();
            auto res = std::from_chars(b, e, v);
            if (res.ec != std::errc() || res.ptr != e)
                throw ConfigError(lineno, "key '" + key + "' expects a number");
            return v;
        };
        auto as_int = [&]() -> int {
            int v = 0;
            const char* b = val.data();
            const char* e = val.data() + val.size();
            auto res = std::from_chars(b, e, v);
            if (res.ec != std::errc() || res.ptr != e)
                throw ConfigError(lineno, "key '" + key + "' expects an integer");
            return v;
        };

        if (table == "geometry") {
            if (key == "n") cfg.n = as_int();
            else if (key == "r0") cfg.r0 = as_double();
            else if (key == "r1") cfg.r1 = as_double();
            else throw ConfigError(lineno, "unknown key '" + key + "' in [geometry]");
        } else if (table == "shift") {
            if (key == "omega1") cfg.omega1 = as_double();
            else if (key == "omega2") cfg.omega2 = as_double();
            else throw ConfigError(lineno, "unknown key '" + key + "' in [shift]");
        } else if (table == "nonlinearity") {
            if (key == "f1") cfg.f1_text = as_string();
            else if (key == "f2") cfg.f2_text = as_string();
            else throw ConfigError(lineno, "unknown key '" + key + "' in [nonlinearity]");
        } else if (table == "ladder") {
            cfg.has_ladder = true;
            if (key == "rho1") cfg.rho1 = as_double();
            else if (key == "rho2") cfg.rho2 = as_double();
            else if (key == "s1") cfg.s1 = as_double();
            else if (key == "s2") cfg.s2 = as_double();
            else if (key == "theta1") { cfg.theta1 = as_double(); seen_theta = true; }
            else if (key == "theta2") { cfg.theta2 = as_double(); seen_theta = true; }
            else if (key == "sigma1") { cfg.sigma1 = as_double(); seen_sigma = true; }
            else if (key == "sigma2") { cfg.sigma2 = as_double(); seen_sigma = true; }
            else throw ConfigError(lineno, "unknown key '" + key + "' in [ladder]");
        } else if (table == "solver") {
            if (key == "grid_n") cfg.grid_n = as_int();
            else if (key == "max_grid_n") cfg.max_grid_n = as_int();
            else if (key == "tol") cfg.tol = as_double();
            else if (key == "max_iter") cfg.max_iter = as_int();
            else throw ConfigError(lineno, "unknown key '" + key + "' in [solver]");
        } else if (table == "checker") {
            if (key == "base_per_axis") cfg.base_per_axis = as_int();
            else if (key == "refine_rounds") cfg.refine_rounds = as_int();
            else if (key == "z_bound") cfg.z_bound = as_double();
            else if (key == "h_density") cfg.h_density = as_int();
            else throw ConfigError(lineno, "unknown key '" + key + "' in [checker]");
        }
    }

    if (seen_theta != seen_sigma)
        throw ConfigError("[ladder] theta and sigma levels must be given together");
    cfg.has_four_level = seen_theta && seen_sigma;

    // structural validation of whatever sections are present
    if (cfg.n != 0 || cfg.r0 != 0.0 || cfg.r1 != 0.0)
        (void)cfg.geometry();
    if (cfg.omega1 != 0.0 || cfg.omega2 != 0.0) {
        try {
            (void)ShiftedKernel(cfg.omega1);
            (void)ShiftedKernel(cfg.omega2);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("[shift] ") + e.what());
        }
    }
    if (!cfg.f1_text.empty()) {
        try {
            (void)Expr::parse(cfg.f1_text);
        } catch (const ParseError& e) {
            throw ConfigError(std::string("[nonlinearity] f1: ") + e.what());
        }
    }
    if (!cfg.f2_text.empty()) {
        try {
            (void)Expr::parse(cfg.f2_text);
        } catch (const ParseError& e) {
            throw ConfigError(std::string("[nonlinearity] f2: ") + e.what());
        }
    }
    if (cfg.has_ladder)
        (void)cfg.ladder();
    return cfg;
}

} // namespace annulus

#endif
