// JSON serialization.  The expansion schema is the interchange format of
// the command line tool:
//
//   paramodular: {"weight", "level", "nmax", "mmax",
//                 "coeffs": [{"n", "r", "m", "c"}, ...]}   sorted by (m, n, r)
//   jacobi:      {"weight", "index", "nmax",
//                 "coeffs": [{"n", "r", "c"}, ...]}        sorted by (n, r)
//
// Every scalar is an exact rational rendered "num/den"; there are no floats
// anywhere.  Writers emit exactly this ordering so that equal expansions
// produce byte-identical files.

#pragma once

#include "pmf/check_report.hpp"
#include "pmf/hecke.hpp"
#include "pmf/jacobi.hpp"
#include "pmf/paramod.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace pmf {

using Json = nlohmann::ordered_json;

inline Json to_json(const ParamodularExpansion& f) {
    Json j;
    j["weight"] = f.weight();
    j["level"] = f.level();
    j["nmax"] = f.box().n_max;
    j["mmax"] = f.box().m_max;
    Json coeffs = Json::array();
    for (const auto& [t, v] : f.coeffs()) { // map order is (m, n, r)
        Json rec;
        rec["n"] = t.n;
        rec["r"] = t.r;
        rec["m"] = t.m;
        rec["c"] = v.str();
        coeffs.push_back(std::move(rec));
    }
    j["coeffs"] = std::move(coeffs);
    return j;
}

inline Json to_json(const JacobiExpansion& phi) {
    Json j;
    j["weight"] = phi.weight();
    j["index"] = phi.index();
    j["nmax"] = phi.n_max();
    Json coeffs = Json::array();
    for (const auto& [key, v] : phi.coeffs()) { // map order is (n, r)
        Json rec;
        rec["n"] = key.n;
        rec["r"] = key.r;
        rec["c"] = v.str();
        coeffs.push_back(std::move(rec));
    }
    j["coeffs"] = std::move(coeffs);
    return j;
}

inline ParamodularExpansion paramodular_from_json(const Json& j) {
    ParamodularExpansion f(j.at("weight").get<int>(), j.at("level").get<std::int64_t>(),
                           {j.at("nmax").get<std::int64_t>(), j.at("mmax").get<std::int64_t>()});
    for (const auto& rec : j.at("coeffs")) {
        const FourierIndex t{rec.at("n").get<std::int64_t>(), rec.at("r").get<std::int64_t>(),
                             rec.at("m").get<std::int64_t>()};
        f.set_coeff(t, Rational::from_string(rec.at("c").get<std::string>()));
    }
    return f;
}

inline JacobiExpansion jacobi_from_json(const Json& j) {
    JacobiExpansion phi(j.at("weight").get<int>(), j.at("index").get<std::int64_t>(),
                        j.at("nmax").get<std::int64_t>());
    for (const auto& rec : j.at("coeffs"))
        phi.set_coeff(rec.at("n").get<std::int64_t>(), rec.at("r").get<std::int64_t>(),
                      Rational::from_string(rec.at("c").get<std::string>()));
    return phi;
}

inline Json to_json(const CheckReport& rep) {
    Json j;
    j["status"] = rep.pass ? "pass" : "fail";
    j["checked"] = rep.checked;
    j["skipped"] = rep.skipped;
    j["witnesses"] = rep.witnesses;
    return j;
}

inline Json to_json(const Mat2& m) {
    return Json::array({Json::array({m.a.str(), m.b.str()}), Json::array({m.c.str(), m.d.str()})});
}

inline Json to_json(const DoubleCosetOp& op, const SanityReport& sanity) {
    Json j;
    j["label"] = op_kind_name(op.kind);
    j["q"] = op.q;
    j["level"] = op.level;
    j["count"] = op.reps.size();
    Json s;
    s["status"] = sanity.pass ? "pass" : "fail";
    s["cardinality"] = sanity.cardinality;
    s["violations"] = sanity.violations;
    j["sanity"] = std::move(s);
    Json reps = Json::array();
    for (const UpperRep& r : op.reps) {
        Json rec;
        rec["s2"] = r.s2.str();
        rec["A"] = to_json(r.A);
        rec["B"] = to_json(r.B);
        rec["D"] = to_json(r.D);
        reps.push_back(std::move(rec));
    }
    j["reps"] = std::move(reps);
    return j;
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

} // namespace pmf
