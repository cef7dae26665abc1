#ifndef ANNULUS_REPORT_HPP
#define ANNULUS_REPORT_HPP

#include <json.hpp>

#include "annulus/hypothesis.hpp"
#include "annulus/nonlinear_system.hpp"
#include "annulus/solver.hpp"

namespace annulus {

/*
 * JSON shapes for the machine-readable reports.  Everything here is a
 * pure function of already-computed results, so two runs of the same
 * config produce byte-identical files.
 */

inline nlohmann::json to_json(const ConditionReport& r)
{
    return nlohmann::json{
        {"id", r.id},
        {"verdict", r.pass ? "PASS" : "FAIL"},
        {"kind", r.kind == ExtremumMode::Sup ? "sup" : "inf"},
        {"extremum", r.extremum},
        {"threshold", r.threshold},
        {"margin", r.margin},
        {"witness", {r.witness[0], r.witness[1], r.witness[2], r.witness[3], r.witness[4]}},
        {"samples", r.samples},
        {"certified", r.certified},
    };
}

inline nlohmann::json to_json(const TheoremVerdict& v)
{
    nlohmann::json conds = nlohmann::json::array();
    for (const ConditionReport& c : v.conditions)
        conds.push_back(to_json(c));
    return nlohmann::json{
        {"theorem", v.theorem},
        {"verdict", v.pass ? "sampled-PASS" : "FAIL"},
        {"conditions", conds},
    };
}

inline nlohmann::json to_json(const HCheckReport& h)
{
    return nlohmann::json{
        {"id", "H"},
        {"verdict", h.pass ? "PASS" : "FAIL"},
        {"worst_margin", h.worst_margin},
        {"component", h.component},
        {"witness", {h.witness[0], h.witness[1], h.witness[2], h.witness[3], h.witness[4]}},
        {"z_bound", h.z_bound},
        {"samples", h.samples},
    };
}

// the constants of the theory for one geometry/shift pair
inline nlohmann::json constants_json(const AnnulusGeometry& geom, double omega1, double omega2)
{
    const auto ext = geom.d_extrema();
    nlohmann::json comps = nlohmann::json::array();
    const double omegas[2] = {omega1, omega2};
    for (int i = 0; i < 2; ++i) {
        const ShiftedKernel kern(omegas[i]);
        const KernelConstants kc = kern.constants();
        comps.push_back(nlohmann::json{
            {"omega", omegas[i]},
            {"m", kc.m},
            {"M", kc.big_m},
            {"m_star", kc.m_star},
            {"c_k", kc.c_k},
            {"c", kc.c},
            {"c_squared", kc.c * kc.c},
            {"growth_coefficient", (std::min(kc.m, kc.m_star) - omegas[i] * omegas[i]) / ext.second},
        });
    }
    return nlohmann::json{
        {"geometry", {{"n", geom.dimension()}, {"r0", geom.r0()}, {"r1", geom.r1()}}},
        {"alpha", geom.alpha()},
        {"inf_d", ext.first},
        {"sup_d", ext.second},
        {"components", comps},
    };
}

inline nlohmann::json solution_json(const SolutionPair& sp, const std::string& file)
{
    return nlohmann::json{
        {"file", file},
        {"norms", {{"u_c1", sp.u.c1_norm()}, {"v_c1", sp.v.c1_norm()}}},
        {"minima", {{"u", sp.u.min_value()}, {"v", sp.v.min_value()}}},
        {"oscillation", {{"u", sp.u.oscillation()}, {"v", sp.v.oscillation()}}},
        {"residual_sup", sp.residual_sup},
        {"cone_margins", {sp.cone_margin_1, sp.cone_margin_2}},
        {"region", region_name(sp.region)},
        {"nonconstant", {sp.nonconstant[0], sp.nonconstant[1]}},
    };
}

} // namespace annulus

#endif
