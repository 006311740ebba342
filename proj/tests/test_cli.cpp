#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spiky/certificate.hpp"
#include "spiky/cli.hpp"
#include "spiky/core.hpp"
#include "spiky/gen.hpp"
#include "spiky/matrix.hpp"

using namespace spiky;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int status;
    std::string out;
    std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int status = run_cli(args, out, err);
    return {status, out.str(), err.str()};
}

fs::path tmp_dir() {
    fs::path dir = fs::current_path() / "cli_scratch";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("gen writes the documented matrix format") {
    fs::path f = tmp_dir() / "h3.txt";
    auto res = cli({"gen", "hd1", "--n", "3", "--out", f.string()});
    CHECK(res.status == 0);
    Matrix m = load_matrix(f.string());
    CHECK(m.nrows() == 8);
    CHECK(m.ncols() == 8);
    CHECK(sparsity(m) == 24);
    CHECK(m == hd1(3));
}

TEST_CASE("randomized generators demand an explicit seed") {
    auto res = cli({"gen", "random-boolean", "--n", "8", "--density", "0.5"});
    CHECK(res.status == 2);

    fs::path f = tmp_dir() / "rb.txt";
    auto ok = cli({"gen", "random-boolean", "--n", "8", "--density", "0.5", "--seed", "7",
                   "--out", f.string()});
    CHECK(ok.status == 0);
    CHECK(load_matrix(f.string()) == random_boolean(8, 0.5, 7));
}

TEST_CASE("usage errors exit with status 2") {
    CHECK(cli({"frobnicate"}).status == 2);
    CHECK(cli({"decompose", "--algo", "sparse-spiky"}).status == 2); // missing --in
    CHECK(cli({"gen", "no-such-family", "--n", "3"}).status == 2);
}

TEST_CASE("decompose then verify round-trips with exit 0") {
    fs::path mat = tmp_dir() / "m.txt";
    fs::path cert = tmp_dir() / "m.cert.json";
    CHECK(cli({"gen", "random-boolean", "--n", "12", "--density", "0.4", "--seed", "5", "--out",
               mat.string()})
              .status == 0);
    CHECK(cli({"decompose", "--algo", "sparse-spiky", "--in", mat.string(), "--out",
               cert.string()})
              .status == 0);
    auto ver = cli({"verify", "--cert", cert.string(), "--in", mat.string()});
    CHECK(ver.status == 0);
    CHECK(ver.out.find("verify OK") != std::string::npos);
}

TEST_CASE("verify flags tampered certificates and target drift") {
    fs::path mat = tmp_dir() / "t.txt";
    fs::path cert = tmp_dir() / "t.cert.json";
    cli({"gen", "identity", "--n", "6", "--out", mat.string()});
    cli({"decompose", "--algo", "sparse-spiky", "--in", mat.string(), "--out", cert.string()});

    // tamper with a factor value inside the certificate
    Certificate tampered = load_certificate(cert.string());
    REQUIRE_FALSE(tampered.decomposition.spiky_terms.empty());
    tampered.decomposition.spiky_terms[0].u[0] += 1.0;
    save_certificate(tampered.decomposition, tampered.target_hash, cert.string());
    CHECK(cli({"verify", "--cert", cert.string(), "--in", mat.string()}).status == 1);

    // a different target of the same shape is caught by the content hash
    fs::path other = tmp_dir() / "t2.txt";
    cli({"gen", "random-boolean", "--n", "6", "--density", "0.5", "--seed", "3", "--out",
         other.string()});
    cli({"decompose", "--algo", "sparse-spiky", "--in", mat.string(), "--out", cert.string()});
    auto drift = cli({"verify", "--cert", cert.string(), "--in", other.string()});
    CHECK(drift.status == 1);
    CHECK(drift.out.find("hash mismatch") != std::string::npos);
}

TEST_CASE("oracle subcommand prints values and witnesses") {
    fs::path mat = tmp_dir() / "d3.txt";
    cli({"gen", "diagonal", "--values", "1,2,3", "--out", mat.string()});
    auto res = cli({"oracle", "--measure", "br", "--in", mat.string()});
    CHECK(res.status == 0);
    // additive structure: diag(1,2,3) = B{0,2} + 2*B{1,2}
    CHECK(res.out.find("br 2") != std::string::npos);

    fs::path idm = tmp_dir() / "i4.txt";
    cli({"gen", "identity", "--n", "4", "--field", "gf2", "--out", idm.string()});
    auto spr = cli({"oracle", "--measure", "spr-gf2", "--in", idm.string()});
    CHECK(spr.status == 0);
    CHECK(spr.out.find("spr-gf2 1") != std::string::npos);

    auto rig = cli({"oracle", "--measure", "rigidity", "--in", idm.string(), "--r", "2"});
    CHECK(rig.status == 0);
    CHECK(rig.out.find("rigidity 2") != std::string::npos);
}

TEST_CASE("hd1 certificates over GF2 round-trip through the CLI") {
    fs::path mat = tmp_dir() / "h3gf2.txt";
    fs::path cert = tmp_dir() / "h3gf2.cert.json";
    CHECK(cli({"gen", "hd1", "--n", "3", "--field", "gf2", "--out", mat.string()}).status == 0);
    CHECK(cli({"decompose", "--algo", "hd1-blocky", "--in", mat.string(), "--out",
               cert.string()})
              .status == 0);
    CHECK(cli({"verify", "--cert", cert.string(), "--in", mat.string()}).status == 0);

    // sign representations only make sense over the reals
    auto bad = cli({"decompose", "--algo", "sign-hd1", "--in", mat.string()});
    CHECK(bad.status == 2);
}

TEST_CASE("bounds subcommand emits structured reports") {
    auto rep = cli({"bounds", "--name", "rigidity", "--spr", "10", "--r", "2"});
    CHECK(rep.status == 0);
    CHECK(rep.out.find("value 16") != std::string::npos);

    auto war = cli({"bounds", "--name", "warren", "--N", "4", "--r", "1"});
    CHECK(war.status == 0);
    CHECK(war.out.find("value 48") != std::string::npos);

    fs::path mat = tmp_dir() / "p1.txt";
    cli({"gen", "hd1", "--n", "3", "--out", mat.string()});
    auto p1 = cli({"bounds", "--name", "p1", "--in", mat.string(), "--s", "3", "--k", "3.5"});
    CHECK(p1.status == 0);
    CHECK(p1.out.find("valid true") != std::string::npos);
}

TEST_CASE("sweep output is deterministic and matches the exhaustive histogram") {
    fs::path cfg = tmp_dir() / "sweep.json";
    std::ofstream(cfg) << "{\"family\": \"gf2-exhaustive-3x3\"}\n";

    auto once = cli({"sweep", "--config", cfg.string()});
    auto twice = cli({"sweep", "--config", cfg.string()});
    CHECK(once.status == 0);
    CHECK(once.out == twice.out);
    CHECK(once.out == "spr,count\n0,1\n1,127\n2,384\n");

    fs::path cfg2 = tmp_dir() / "sweep2.json";
    std::ofstream(cfg2) << "{\"family\": \"hd1\", \"sizes\": [1,2,3,4],"
                        << " \"measures\": [\"spar\", \"rank-gf2\", \"br-upper\"]}\n";
    auto table = cli({"sweep", "--config", cfg2.string()});
    CHECK(table.status == 0);
    CHECK(table.out.find("hd1,3,24,8,3") != std::string::npos);

    fs::path bad = tmp_dir() / "bad.json";
    std::ofstream(bad) << "{\"family\": \"unknown\"}\n";
    CHECK(cli({"sweep", "--config", bad.string()}).status == 2);
}
