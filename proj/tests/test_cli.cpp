#include <catch2/catch_amalgamated.hpp>

#include "pmf/cli.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace pmf;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/pmf_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
    void write(const std::string& content) const {
        std::ofstream f(path);
        f << content;
    }
    std::string read() const {
        std::ifstream f(path);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }
};

} // namespace

TEST_CASE("cli: eisenstein emits the normalized constant term") {
    const auto res = run_cli({"eisenstein", "--weight", "4", "--level", "1",
                              "--nmax", "3", "--mmax", "3"});
    REQUIRE(res.code == 0);
    const Json j = Json::parse(res.out);
    REQUIRE(j["weight"] == 4);
    REQUIRE(j["coeffs"][0]["c"] == "1/1");
    REQUIRE(j["coeffs"][0]["n"] == 0);
}

TEST_CASE("cli: emitted expansions re-ingest byte-identically") {
    for (const auto& cmd :
         {std::vector<std::string>{"eisenstein", "--weight", "4", "--level", "2", "--nmax", "3",
                                   "--mmax", "3"},
          {"eisenstein", "--weight", "6", "--level", "6", "--nmax", "2", "--mmax", "2"}}) {
        const auto first = run_cli(cmd);
        REQUIRE(first.code == 0);
        const auto f = paramodular_from_json(Json::parse(first.out));
        REQUIRE(dump_json(to_json(f)) == first.out);
        // determinism: running twice gives the same bytes
        REQUIRE(run_cli(cmd).out == first.out);
    }
}

TEST_CASE("cli: check maass passes on the Eisenstein series") {
    TempFile file("eis.json");
    REQUIRE(run_cli({"eisenstein", "--weight", "4", "--level", "1", "--nmax", "4", "--mmax", "4",
                     "--json", file.path})
                .code == 0);
    const auto res = run_cli({"check", "--suite", "maass", "--in", file.path});
    REQUIRE(res.code == 0);
    const Json j = Json::parse(res.out);
    REQUIRE(j["status"] == "pass");
    REQUIRE(j["checked"].get<std::int64_t>() > 0);
}

TEST_CASE("cli: hecke eigen reports 45/2") {
    TempFile file("eis452.json");
    REQUIRE(run_cli({"eisenstein", "--weight", "4", "--level", "1", "--nmax", "6", "--mmax", "6",
                     "--json", file.path})
                .code == 0);
    const auto res = run_cli({"hecke", "--op", "tnq", "--q", "2", "--in", file.path, "--eigen"});
    REQUIRE(res.code == 0);
    const Json j = Json::parse(res.out);
    REQUIRE(j["status"] == "eigen");
    REQUIRE(j["eigenvalue"] == "45/2");
}

TEST_CASE("cli: lift validates its input") {
    TempFile bad("bad_jacobi.json");
    // c(1,1) != c(1,-1) breaks the evenness invariant
    bad.write(R"({"weight":4,"index":1,"nmax":2,"coeffs":[
        {"n":1,"r":1,"c":"2/1"},{"n":1,"r":-1,"c":"3/1"}]})");
    const auto res = run_cli({"lift", "--weight", "4", "--level", "1", "--jacobi", bad.path,
                              "--nmax", "1", "--mmax", "1"});
    REQUIRE(res.code == 2);
    REQUIRE(res.err.find("not a valid Jacobi expansion") != std::string::npos);
}

TEST_CASE("cli: lift then check roundtrip through files") {
    TempFile jac("jac.json"), lifted("lift.json");
    // a valid Jacobi expansion of index 2: one class value per (disc, r mod 4)
    JacobiExpansion phi(4, 2, 12);
    for (std::int64_t n = 0; n <= 12; ++n)
        for (std::int64_t r = -isqrt64(8 * n); r * r <= 8 * n; ++r) {
            const std::int64_t D = 8 * n - r * r;
            std::int64_t rho = std::min(((r % 4) + 4) % 4, (4 - ((r % 4) + 4) % 4) % 4);
            phi.set_coeff(n, r, Rational(1 + D + 7 * rho));
        }
    REQUIRE(validate_jacobi(phi).pass);
    jac.write(dump_json(to_json(phi)));
    const auto lift_res = run_cli({"lift", "--weight", "4", "--level", "2", "--jacobi", jac.path,
                                   "--nmax", "3", "--mmax", "4", "--json", lifted.path});
    REQUIRE(lift_res.code == 0);
    const auto check = run_cli({"check", "--suite", "maass", "--in", lifted.path});
    REQUIRE(check.code == 0);
    const auto slice = run_cli({"slice", "--m", "1", "--in", lifted.path});
    REQUIRE(slice.code == 0);
    const auto sliced = jacobi_from_json(Json::parse(slice.out));
    for (std::int64_t n = 0; n <= 3; ++n)
        for (std::int64_t r = -isqrt64(8 * n); r * r <= 8 * n; ++r)
            REQUIRE(sliced.coeff(n, r) == phi.coeff(n, r));
}

TEST_CASE("cli: known-fail fixtures exit 1") {
    TempFile file("perturbed.json");
    auto run = run_cli({"eisenstein", "--weight", "4", "--level", "2", "--nmax", "4", "--mmax", "4"});
    auto f = paramodular_from_json(Json::parse(run.out));
    f.set_coeff({1, 1, 2}, f.coeff({1, 1, 2}) + Rational(1));
    file.write(dump_json(to_json(f)));
    const auto maass = run_cli({"check", "--suite", "maass", "--in", file.path});
    REQUIRE(maass.code == 1);
    REQUIRE(Json::parse(maass.out)["status"] == "fail");
    const auto lemma = run_cli({"check", "--suite", "lemma1", "--in", file.path, "--p", "2"});
    REQUIRE(lemma.code == 1);
    REQUIRE(Json::parse(lemma.out)["modes_agree"] == true);
    const auto cusp = run_cli({"check", "--suite", "cusp", "--in", file.path});
    REQUIRE(cusp.code == 1); // Eisenstein series is not a cusp form
}

TEST_CASE("cli: fricke, corollary and reps suites") {
    TempFile eis("eis_fricke.json"), jeis("jeis.json");
    REQUIRE(run_cli({"eisenstein", "--weight", "4", "--level", "6", "--nmax", "5", "--mmax", "5",
                     "--json", eis.path})
                .code == 0);
    const auto fricke = run_cli({"check", "--suite", "fricke", "--in", eis.path});
    REQUIRE(fricke.code == 0);
    const Json fj = Json::parse(fricke.out);
    REQUIRE(fj["status"] == "pass");
    REQUIRE(fj["eigen_d2"] == "+1");
    REQUIRE(fj["eigen_d6"] == "+1");
    REQUIRE(run_cli({"check", "--suite", "corollary2", "--in", eis.path}).code == 0);

    jeis.write(dump_json(to_json(jacobi_eisenstein(4, 3, 12))));
    const auto c5 = run_cli({"check", "--suite", "corollary5", "--in", jeis.path, "--p", "2"});
    REQUIRE(c5.code == 0);
    REQUIRE(Json::parse(c5.out)["eigenvalue"] == "33/2");
    REQUIRE(run_cli({"check", "--suite", "corollary6", "--in", jeis.path}).code == 0);

    const auto reps = run_cli({"reps", "--op", "tnq", "--q", "2", "--level", "1"});
    REQUIRE(reps.code == 0);
    const Json rj = Json::parse(reps.out);
    REQUIRE(rj["count"] == 15);
    REQUIRE(rj["sanity"]["status"] == "pass");
}

TEST_CASE("cli: invalid input exits 2") {
    REQUIRE(run_cli({"eisenstein", "--weight", "4"}).code == 2);       // missing required options
    REQUIRE(run_cli({"check", "--suite", "nope", "--in", "x"}).code == 2);
    REQUIRE(run_cli({"hecke", "--op", "tnq", "--q", "2", "--in", "/nonexistent.json"}).code == 2);
    REQUIRE(run_cli({"frobnicate"}).code == 2);
}
