// Command line front end, exposed as a library function so the test suite
// can drive it in-process.  Exit codes: 0 success / check passed, 1 a check
// failed (report on stdout), 2 invalid input (message on stderr).  All
// output is deterministic and byte-stable for fixed inputs.

#pragma once

#include "pmf/eisenstein.hpp"
#include "pmf/hecke.hpp"
#include "pmf/io.hpp"
#include "pmf/maass.hpp"
#include "pmf/paramod.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace pmf::cli {

namespace detail {

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

inline void emit(const Json& j, const std::string& json_path, std::ostream& out) {
    if (json_path.empty()) {
        out << dump_json(j);
        return;
    }
    std::ofstream f(json_path);
    if (!f) throw std::runtime_error("cannot write " + json_path);
    f << dump_json(j);
}

// comparison of two Jacobi expansions as a CheckReport
inline CheckReport compare_jacobi(const JacobiExpansion& got, const JacobiExpansion& want) {
    CheckReport rep;
    const std::int64_t n_max = std::min(got.n_max(), want.n_max());
    for (std::int64_t n = 0; n <= n_max; ++n)
        for (std::int64_t r = -isqrt64(4 * n * got.index()); r * r <= 4 * n * got.index(); ++r) {
            ++rep.checked;
            if (!(got.coeff(n, r) == want.coeff(n, r)))
                rep.fail("mismatch at (n,r)=(" + std::to_string(n) + "," + std::to_string(r) + ")");
        }
    return rep;
}

} // namespace detail

inline int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"exact Fourier expansions of paramodular forms of squarefree level"};
    app.require_subcommand(1);

    // eisenstein
    auto* cmd_eis = app.add_subcommand("eisenstein", "construct the Siegel Eisenstein series E_{k,N}");
    int eis_weight = 4;
    std::int64_t eis_level = 1, eis_nmax = 4, eis_mmax = 4;
    std::string eis_json;
    cmd_eis->add_option("--weight", eis_weight)->required();
    cmd_eis->add_option("--level", eis_level)->required();
    cmd_eis->add_option("--nmax", eis_nmax)->required();
    cmd_eis->add_option("--mmax", eis_mmax)->required();
    cmd_eis->add_option("--json", eis_json, "write to this file instead of stdout");

    // lift
    auto* cmd_lift = app.add_subcommand("lift", "Gritsenko lift of a Jacobi expansion");
    int lift_weight = 4;
    std::int64_t lift_level = 1, lift_nmax = 4, lift_mmax = 4;
    std::string lift_jacobi, lift_json;
    cmd_lift->add_option("--weight", lift_weight)->required();
    cmd_lift->add_option("--level", lift_level)->required();
    cmd_lift->add_option("--jacobi", lift_jacobi, "input Jacobi expansion (JSON)")->required();
    cmd_lift->add_option("--nmax", lift_nmax)->required();
    cmd_lift->add_option("--mmax", lift_mmax)->required();
    cmd_lift->add_option("--json", lift_json);

    // hecke
    auto* cmd_hecke = app.add_subcommand("hecke", "apply a Hecke operator");
    std::string hk_op, hk_in, hk_json;
    std::int64_t hk_q = 2;
    bool hk_eigen = false;
    cmd_hecke->add_option("--op", hk_op, "tnq|tstarq|fjraise|jdiag|jsingle|ushift|vraise")->required();
    cmd_hecke->add_option("--q", hk_q)->required();
    cmd_hecke->add_option("--in", hk_in)->required();
    cmd_hecke->add_flag("--eigen", hk_eigen, "report the eigenvalue (or a witness) instead");
    cmd_hecke->add_option("--json", hk_json);

    // check
    auto* cmd_check = app.add_subcommand("check", "run a coefficient-level identity suite");
    std::string ck_suite, ck_in;
    std::int64_t ck_p = 2, ck_d = 0;
    cmd_check->add_option("--suite", ck_suite,
                          "maass|lemma1|fricke|corollary2|corollary3|corollary5|corollary6|cusp")
        ->required();
    cmd_check->add_option("--in", ck_in)->required();
    cmd_check->add_option("--p", ck_p, "prime parameter where applicable");
    cmd_check->add_option("--d", ck_d, "divisor parameter for the fricke suite");

    // slice
    auto* cmd_slice = app.add_subcommand("slice", "extract a Fourier-Jacobi coefficient");
    std::int64_t sl_m = 1;
    std::string sl_in, sl_json;
    cmd_slice->add_option("--m", sl_m)->required();
    cmd_slice->add_option("--in", sl_in)->required();
    cmd_slice->add_option("--json", sl_json);

    // reps
    auto* cmd_reps = app.add_subcommand("reps", "dump a coset representative table with sanity report");
    std::string rp_op, rp_json;
    std::int64_t rp_q = 2, rp_level = 1;
    bool rp_closure = false;
    cmd_reps->add_option("--op", rp_op)->required();
    cmd_reps->add_option("--q", rp_q)->required();
    cmd_reps->add_option("--level", rp_level)->required();
    cmd_reps->add_flag("--closure", rp_closure, "also run the closure permutation test");
    cmd_reps->add_option("--json", rp_json);

    try {
        std::vector<std::string> args(argv.rbegin(), argv.rend()); // CLI11 wants reversed
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (*cmd_eis) {
            const auto f = siegel_eisenstein(eis_weight, eis_level, {eis_nmax, eis_mmax});
            detail::emit(to_json(f), eis_json, out);
            return 0;
        }

        if (*cmd_lift) {
            const auto phi = jacobi_from_json(detail::load_json_file(lift_jacobi));
            if (phi.weight() != lift_weight) throw std::runtime_error("weight differs from the input file");
            if (phi.index() != lift_level) throw std::runtime_error("Jacobi index must equal the level");
            const auto v = validate_jacobi(phi);
            if (!v.pass)
                throw std::runtime_error("input is not a valid Jacobi expansion: " + v.witnesses.front());
            const auto f = gritsenko_lift(phi, {lift_nmax, lift_mmax});
            detail::emit(to_json(f), lift_json, out);
            return 0;
        }

        if (*cmd_hecke) {
            const auto kind = op_kind_from_name(hk_op);
            if (!kind) throw std::runtime_error("unknown operator '" + hk_op + "'");
            const Json j = detail::load_json_file(hk_in);
            const ParamodularExpansion f = [&] {
                if (!j.contains("index")) return paramodular_from_json(j);
                const auto phi = jacobi_from_json(j);
                return embed_jacobi(phi, phi.index());
            }();
            const auto op = reps_for(*kind, hk_q, f.level());
            if (hk_eigen) {
                Json rep;
                try {
                    const auto res = eigenvalue_of(f, op);
                    if (res.lambda) {
                        rep["status"] = "eigen";
                        rep["eigenvalue"] = res.lambda->str();
                        detail::emit(rep, hk_json, out);
                        return 0;
                    }
                    rep["status"] = "not-eigen";
                    rep["witness"] = res.witness->str();
                } catch (const EngineError& e) {
                    rep["status"] = "engine-error";
                    rep["detail"] = e.what();
                }
                detail::emit(rep, hk_json, out);
                return 1;
            }
            try {
                const auto res = apply_op(f, op);
                detail::emit(to_json(res.out), hk_json, out);
                return 0;
            } catch (const EngineError& e) {
                Json rep;
                rep["status"] = "engine-error";
                rep["detail"] = e.what();
                detail::emit(rep, hk_json, out);
                return 1;
            }
        }

        if (*cmd_slice) {
            const auto f = paramodular_from_json(detail::load_json_file(sl_in));
            detail::emit(to_json(fj_slice(f, sl_m)), sl_json, out);
            return 0;
        }

        if (*cmd_reps) {
            const auto kind = op_kind_from_name(rp_op);
            if (!kind) throw std::runtime_error("unknown operator '" + rp_op + "'");
            const auto op = reps_for(*kind, rp_q, rp_level);
            const auto sanity = coset_sanity(op, rp_closure);
            detail::emit(to_json(op, sanity), rp_json, out);
            return sanity.pass ? 0 : 1;
        }

        if (*cmd_check) {
            CheckReport rep;
            Json extra;
            if (ck_suite == "maass") {
                rep = maass_check(paramodular_from_json(detail::load_json_file(ck_in)));
            } else if (ck_suite == "lemma1") {
                const auto f = paramodular_from_json(detail::load_json_file(ck_in));
                const auto ii = lemma1_check(f, ck_p, Lemma1Mode::ConditionII);
                const auto iii = lemma1_check(f, ck_p, Lemma1Mode::ConditionIII);
                rep.merge(ii);
                rep.merge(iii);
                extra["modes_agree"] = (ii.pass == iii.pass);
                if (ii.pass != iii.pass) rep.fail("condition (ii) and (iii) verdicts disagree");
            } else if (ck_suite == "fricke") {
                const auto f = paramodular_from_json(detail::load_json_file(ck_in));
                const std::vector<std::int64_t> ds =
                    ck_d > 0 ? std::vector<std::int64_t>{ck_d} : divisors(f.level());
                for (std::int64_t d : ds) {
                    const auto v = fricke_matrix(f.level(), d);
                    for_each_index(f, [&](const FourierIndex& t) {
                        if (!f.index_valid(t)) return;
                        ++rep.checked;
                        const auto img = fricke_index_map(t, v);
                        if (img.disc(f.level()) != t.disc(f.level()) ||
                            gcd3(img.n, img.r, img.m) != gcd3(t.n, t.r, t.m))
                            rep.fail("index map breaks invariants at " + t.str());
                    });
                    const auto twice = apply_fricke(apply_fricke(f, d), d);
                    FourierIndex bad;
                    if (!ParamodularExpansion::agree_on_common_box(f, twice, &bad))
                        rep.fail("involution fails at " + bad.str() + " for d=" + std::to_string(d));
                    if (maass_check(f).pass) {
                        const auto sign = theorem2_eigen_check(f, d);
                        extra["eigen_d" + std::to_string(d)] =
                            sign == EigenSign::Plus ? "+1" : (sign == EigenSign::Minus ? "-1" : "none");
                    }
                }
            } else if (ck_suite == "corollary2") {
                const auto res = corollary2_profile(paramodular_from_json(detail::load_json_file(ck_in)));
                rep.checked = (std::int64_t)res.profile.size();
                if (!res.consistent)
                    rep.fail("conflicting profile at " + res.conflict->first.str() + " vs " +
                             res.conflict->second.str());
            } else if (ck_suite == "corollary3") {
                const auto f = paramodular_from_json(detail::load_json_file(ck_in));
                if (f.level() % ck_p == 0) throw std::runtime_error("corollary3 needs p coprime to the level");
                const auto lhs = fj_slice(apply_op(f, reps_for(OpKind::TNQ, ck_p, f.level())).out, 1);
                const auto mid = fj_slice(apply_op(f, reps_for(OpKind::JDiag, ck_p, f.level())).out, 1);
                const auto rhs =
                    mid + fj_slice(f, 1).scaled(Rational(ck_p * ck_p + ck_p)).truncated(mid.n_max());
                rep = detail::compare_jacobi(lhs.truncated(std::min(lhs.n_max(), rhs.n_max())),
                                             rhs.truncated(std::min(lhs.n_max(), rhs.n_max())));
            } else if (ck_suite == "corollary5") {
                const auto e = jacobi_from_json(detail::load_json_file(ck_in));
                const auto res = eigenvalue_of(embed_jacobi(e, e.index()),
                                               reps_for(OpKind::JDiag, ck_p, e.index()));
                const int k = e.weight();
                const Rational want = Rational(ipow(ck_p, k)) + Rational(ipow(ck_p, k)).inv() *
                                                                    Rational(ipow(ck_p, 3));
                ++rep.checked;
                if (!res.lambda)
                    rep.fail("not an eigenform, witness " + res.witness->str());
                else if (!(*res.lambda == want))
                    rep.fail("eigenvalue " + res.lambda->str() + " differs from " + want.str());
                else
                    extra["eigenvalue"] = res.lambda->str();
            } else if (ck_suite == "corollary6") {
                const auto e = jacobi_from_json(detail::load_json_file(ck_in));
                const std::int64_t N = e.index();
                const int k = e.weight();
                const auto e1 = jacobi_eisenstein_index1(k, N * std::max<std::int64_t>(e.n_max(), 1));
                const auto raised = apply_op(embed_jacobi(e1, 1), reps_for(OpKind::VRaise, N, 1)).out;
                const auto engine_path = fj_slice(raised, N).scaled(Rational(1, N));
                const auto direct_path = index_raise(e1, N);
                const std::int64_t nm = std::min(engine_path.n_max(), direct_path.n_max());
                rep = detail::compare_jacobi(engine_path.truncated(nm), direct_path.truncated(nm));
                // the input must be the sigma-normalized object itself
                const auto want = direct_path.truncated(std::min(nm, e.n_max()))
                                      .scaled(Rational(divisor_sigma(k - 1, N)).inv());
                rep.merge(detail::compare_jacobi(e.truncated(want.n_max()), want));
            } else if (ck_suite == "cusp") {
                const auto f = paramodular_from_json(detail::load_json_file(ck_in));
                const auto v = is_cusp(f);
                ++rep.checked;
                if (!v.is_cusp) rep.fail("nonzero singular coefficient at " + v.witness->str());
            } else {
                throw std::runtime_error("unknown suite '" + ck_suite + "'");
            }
            Json j = to_json(rep);
            for (auto& [key, val] : extra.items()) j[key] = val;
            out << dump_json(j);
            return rep.pass ? 0 : 1;
        }
    } catch (const EngineError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "error: no subcommand\n";
    return 2;
}

} // namespace pmf::cli
