#include "spiky/cli.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spiky/bounds.hpp"
#include "spiky/certificate.hpp"
#include "spiky/core.hpp"
#include "spiky/decomp.hpp"
#include "spiky/gen.hpp"
#include "spiky/oracle.hpp"

namespace spiky {

namespace {

std::string format_num(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << text;
}

Matrix load_input(const std::string& path, const std::string& field) {
    Matrix m = load_matrix(path);
    if (field == "gf2" && m.field() != Field::GF2) return to_gf2(m);
    if (field == "real" && m.field() != Field::Real) return to_real(m);
    return m;
}

int cmd_gen(const std::string& family, int n, int d, double density, const std::string& values,
            std::uint64_t seed, bool seed_set, const std::string& field,
            const std::string& out_path, std::ostream& out) {
    bool randomized = family.rfind("random", 0) == 0;
    if (randomized && !seed_set)
        throw CLI::ValidationError("--seed", "randomized generators require an explicit --seed");

    if (family == "random-regular") {
        Graph g = random_regular(n, d, seed);
        write_text(out_path, format_graph(g), out);
        return 0;
    }

    Matrix m;
    if (family == "identity") m = identity(n);
    else if (family == "diagonal") m = diagonal(parse_values(values));
    else if (family == "hd1") m = hd1(n);
    else if (family == "ip") m = ip(n);
    else if (family == "disj") m = disj(n);
    else if (family == "gt") m = gt(n);
    else if (family == "random-boolean") m = random_boolean(n, density, seed);
    else if (family == "random-real") m = random_real(n, seed);
    else throw CLI::ValidationError("family", "unknown family: " + family);

    if (field == "gf2") m = to_gf2(m);
    write_text(out_path, format_matrix(m), out);
    return 0;
}

int cmd_decompose(const std::string& algo, const std::string& in_path,
                  const std::string& out_path, std::ostream& out) {
    Matrix m = load_matrix(in_path);
    Decomposition d;
    if (algo == "sparse-spiky") {
        d = sparse_to_spiky(m);
    } else if (algo == "sparse-boolean-blocky") {
        d = sparse_boolean_to_blocky(m);
    } else if (algo == "hd1-blocky" || algo == "sign-hd1") {
        int n = 0;
        while ((1 << n) < m.nrows()) ++n;
        if ((1 << n) != m.nrows() || to_real(m) != hd1(n))
            throw std::runtime_error(algo + ": input is not an hd1 matrix");
        if (algo == "hd1-blocky") {
            d = hd1_blocky(n);
            d.field = m.field(); // disjoint supports, so the XOR view agrees
        } else {
            if (m.field() != Field::Real)
                throw std::runtime_error("sign-hd1: sign representations are real-valued");
            d = sign_hd1(n);
        }
    } else {
        throw CLI::ValidationError("--algo", "unknown algorithm: " + algo);
    }
    write_text(out_path, certificate_to_json(d, matrix_hash(m)), out);
    return 0;
}

int cmd_verify(const std::string& cert_path, const std::string& in_path, double tol,
               std::ostream& out) {
    Certificate cert = load_certificate(cert_path);
    Matrix m = load_matrix(in_path);

    if (!cert.target_hash.empty() && cert.target_hash != matrix_hash(m)) {
        out << "verify FAIL (target hash mismatch: certificate "
            << cert.target_hash << ", matrix " << matrix_hash(m) << ")\n";
        return 1;
    }
    VerificationReport rep = verify_decomposition(cert.decomposition, m, tol);
    out << "terms " << rep.term_count << "\n";
    out << "maxResidual " << format_num(rep.max_residual) << "\n";
    for (const auto& e : rep.structural_errors) out << "structural " << e << "\n";
    std::size_t show = std::min<std::size_t>(rep.failures.size(), 16);
    for (std::size_t i = 0; i < show; ++i) {
        const auto& f = rep.failures[i];
        out << "failure (" << f.row << "," << f.col << ") expected " << format_num(f.expected)
            << " got " << format_num(f.got) << "\n";
    }
    if (rep.failures.size() > show)
        out << "failure ... " << rep.failures.size() - show << " more\n";
    out << (rep.ok ? "verify OK\n" : "verify FAIL\n");
    return rep.ok ? 0 : 1;
}

int cmd_oracle(const std::string& measure, const std::string& in_path, int r, int r_max,
               std::ostream& out) {
    if (measure == "br") {
        Matrix m = load_input(in_path, "real");
        std::vector<BlockyTerm> witness;
        auto val = oracle::exact_blocky_rank_real(m, r_max, &witness);
        if (!val) {
            out << "br none (searched up to " << r_max << ")\n";
            return 0;
        }
        out << "br " << *val << "\n";
        for (const auto& t : witness) {
            out << "term coeff " << format_num(t.coeff);
            for (const auto& b : t.pattern.blocks) {
                out << " block rows";
                for (int i : b.rows) out << " " << i;
                out << " cols";
                for (int j : b.cols) out << " " << j;
            }
            out << "\n";
        }
        return 0;
    }
    if (measure == "spr-gf2") {
        Matrix m = load_input(in_path, "gf2");
        std::vector<BlockyPattern> witness;
        auto val = oracle::exact_spiky_rank_gf2(m, r_max, &witness);
        if (!val) {
            out << "spr-gf2 none (searched up to " << r_max << ")\n";
            return 0;
        }
        out << "spr-gf2 " << *val << "\n";
        for (const auto& p : witness) {
            out << "term";
            for (const auto& b : p.blocks) {
                out << " block rows";
                for (int i : b.rows) out << " " << i;
                out << " cols";
                for (int j : b.cols) out << " " << j;
            }
            out << "\n";
        }
        return 0;
    }
    if (measure == "rigidity") {
        Matrix m = load_input(in_path, "gf2");
        std::vector<std::pair<int, int>> flips;
        int val = oracle::exact_rigidity_gf2(m, r, &flips);
        out << "rigidity " << val << " (target rank " << r << ")\n";
        for (auto [i, j] : flips) out << "flip " << i << " " << j << "\n";
        return 0;
    }
    if (measure == "vc") {
        Matrix m = load_matrix(in_path);
        std::vector<int> rows;
        int val = oracle::exact_vc(m, &rows);
        out << "vc " << val << "\n";
        if (!rows.empty()) {
            out << "shattered rows";
            for (int i : rows) out << " " << i;
            out << "\n";
        }
        return 0;
    }
    throw CLI::ValidationError("--measure", "unknown measure: " + measure);
}

int cmd_bounds(const std::string& name, const std::string& in_path, double spr, double r,
               const bounds::FrameworkParams& params, long long spar_in, long long big_n,
               double lambda, int samples, std::uint64_t seed, bool seed_set, int s, double k,
               std::ostream& out) {
    using namespace bounds;
    BoundReport rep;
    if (name == "rigidity") {
        rep = rigidity_lower_report(spr, r);
    } else if (name == "framework") {
        rep = framework_bound(params, spar_in, big_n);
    } else if (name == "p1") {
        Matrix m = load_matrix(in_path);
        if (samples > 0) {
            if (!seed_set)
                throw CLI::ValidationError("--seed", "sampled p1 requires an explicit --seed");
            rep = check_p1_sampled(m, s, k, samples, seed);
        } else {
            rep = check_p1_exhaustive(m, s, k);
        }
    } else if (name == "mixing") {
        Graph g = load_graph(in_path);
        if (!seed_set)
            throw CLI::ValidationError("--seed", "sampled mixing requires an explicit --seed");
        rep = expander_mixing_check(g, lambda, samples > 0 ? samples : 1000, seed);
    } else if (name == "vc") {
        Matrix m = load_matrix(in_path);
        rep = vc_sign_spr_lower(m);
    } else if (name == "warren") {
        rep.name = "warren-count";
        rep.inputs["N"] = double(big_n);
        rep.inputs["r"] = r;
        rep.value = warren_count_log(big_n, (long long)r);
        rep.valid = true;
        rep.notes.push_back("log2 of the sign-pattern count bound, in bits");
        rep.notes.push_back("random threshold N/(12 log2 N) = " +
                            format_num(random_lb_threshold(big_n)));
    } else if (name == "gamma2") {
        Matrix m = load_matrix(in_path);
        rep.name = "gamma2-upper";
        rep.value = gamma2_trivial_upper(m);
        rep.valid = true;
        rep.notes.push_back("min over max row/column l2 norms; can be loose");
    } else {
        throw CLI::ValidationError("--name", "unknown bound: " + name);
    }
    out << format_report(rep);
    return 0;
}

// deterministic sweep tables; rows = instances, columns = measures
int cmd_sweep(const std::string& config_path, const std::string& out_path, std::ostream& out) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open: " + config_path);
    nlohmann::json cfg = nlohmann::json::parse(in);

    std::string family = cfg.at("family").get<std::string>();
    std::ostringstream table;

    if (family == "gf2-exhaustive-3x3") {
        std::map<int, int> hist;
        for (std::uint32_t mask = 0; mask < 512; ++mask) {
            Matrix m(3, 3, Field::GF2);
            for (int t = 0; t < 9; ++t)
                if (mask & (1u << t)) m.at(t / 3, t % 3) = 1.0;
            auto spr = oracle::exact_spiky_rank_gf2(m, 4);
            hist[spr ? *spr : -1] += 1;
        }
        table << "spr,count\n";
        for (const auto& [value, count] : hist) table << value << "," << count << "\n";
    } else if (family == "hd1") {
        auto sizes = cfg.at("sizes").get<std::vector<int>>();
        auto measures = cfg.at("measures").get<std::vector<std::string>>();
        table << "family,n";
        for (const auto& ms : measures) table << "," << ms;
        table << "\n";
        for (int n : sizes) {
            Matrix m = hd1(n);
            table << "hd1," << n;
            for (const auto& ms : measures) {
                if (ms == "spar") table << "," << sparsity(m);
                else if (ms == "rank-gf2") table << "," << rank(to_gf2(m));
                else if (ms == "br-upper") table << "," << n;
                else if (ms == "sign-terms") {
                    if ((n & (n - 1)) == 0)
                        table << "," << sign_hd1(n).term_count();
                    else
                        table << ",";
                }
                else if (ms == "gamma2") table << "," << format_num(bounds::gamma2_trivial_upper(m));
                else if (ms == "vc") table << "," << oracle::exact_vc(m);
                else if (ms == "framework-lb") {
                    auto rep = bounds::framework_bound(bounds::hd1_framework_params(n),
                                                       sparsity(m), m.nrows());
                    table << "," << format_num(rep.value) << (rep.valid ? "" : "*");
                } else throw std::runtime_error("unknown measure: " + ms);
            }
            table << "\n";
        }
    } else {
        throw std::runtime_error("unknown family: " + family);
    }

    write_text(out_path, table.str(), out);
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"blocky/spiky decomposition workbench"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a matrix or graph family");
    std::string family, values, field = "real", out_path = "-";
    int n = 1, dreg = 0;
    double density = 0.5;
    std::uint64_t seed = 0;
    gen->add_option("family", family, "family name")->required();
    gen->add_option("--n", n, "size parameter");
    gen->add_option("--d", dreg, "degree (random-regular)");
    gen->add_option("--density", density, "density (random-boolean)");
    gen->add_option("--values", values, "comma-separated diagonal values");
    auto* seed_opt = gen->add_option("--seed", seed, "random seed");
    gen->add_option("--field", field, "real or gf2")->check(CLI::IsMember({"real", "gf2"}));
    gen->add_option("--out", out_path, "output path (default stdout)");

    // decompose
    auto* dec = app.add_subcommand("decompose", "run a decomposition algorithm");
    std::string algo, in_path, cert_path = "-";
    dec->add_option("--algo", algo, "algorithm name")->required();
    dec->add_option("--in", in_path, "input matrix path")->required();
    dec->add_option("--out", cert_path, "certificate output path");

    // verify
    auto* ver = app.add_subcommand("verify", "verify a certificate against a matrix");
    std::string vcert, vin;
    double tol = 1e-9;
    ver->add_option("--cert", vcert, "certificate path")->required();
    ver->add_option("--in", vin, "target matrix path")->required();
    ver->add_option("--tol", tol, "verification tolerance");

    // oracle
    auto* orc = app.add_subcommand("oracle", "exact tiny-scale solvers");
    std::string measure, oin;
    int orank = 1, ormax = 4;
    orc->add_option("--measure", measure, "br | spr-gf2 | rigidity | vc")->required();
    orc->add_option("--in", oin, "input matrix path")->required();
    orc->add_option("--r", orank, "target rank (rigidity)");
    orc->add_option("--rmax", ormax, "search cap (br, spr-gf2)");

    // bounds
    auto* bnd = app.add_subcommand("bounds", "bound calculators and checkers");
    std::string bname, bin;
    double bspr = 0, br_ = 0, bk = 1, blambda = 0, bgamma = 0.5;
    long long bspar = 0, bN = 2;
    int bs = 1, bD = 1, bsamples = 0;
    std::uint64_t bseed = 0;
    bnd->add_option("--name", bname, "rigidity | framework | p1 | mixing | vc | warren | gamma2")
        ->required();
    bnd->add_option("--in", bin, "input matrix/graph path");
    bnd->add_option("--spr", bspr, "spiky rank lower bound (rigidity)");
    bnd->add_option("--r", br_, "target rank");
    bnd->add_option("--s", bs, "framework cutoff s / p1 subset size");
    bnd->add_option("--k", bk, "thinness factor k");
    bnd->add_option("--D", bD, "framework permutation size D");
    bnd->add_option("--gamma", bgamma, "framework gamma");
    bnd->add_option("--spar", bspar, "sparsity input");
    bnd->add_option("--N", bN, "matrix size N");
    bnd->add_option("--lambda", blambda, "expansion parameter lambda");
    bnd->add_option("--samples", bsamples, "sample count (p1/mixing)");
    auto* bseed_opt = bnd->add_option("--seed", bseed, "random seed");

    // sweep
    auto* swp = app.add_subcommand("sweep", "deterministic measure tables");
    std::string scfg, sout = "-";
    swp->add_option("--config", scfg, "sweep config (json)")->required();
    swp->add_option("--out", sout, "output path (default stdout)");

    std::vector<std::string> argv(args);
    std::reverse(argv.begin(), argv.end());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (gen->parsed())
            return cmd_gen(family, n, dreg, density, values, seed, seed_opt->count() > 0, field,
                           out_path, out);
        if (dec->parsed()) return cmd_decompose(algo, in_path, cert_path, out);
        if (ver->parsed()) return cmd_verify(vcert, vin, tol, out);
        if (orc->parsed()) return cmd_oracle(measure, oin, orank, ormax, out);
        if (bnd->parsed()) {
            bounds::FrameworkParams params{bs, bk, bD, bgamma};
            return cmd_bounds(bname, bin, bspr, br_, params, bspar, bN, blambda, bsamples, bseed,
                              bseed_opt->count() > 0, bs, bk, out);
        }
        if (swp->parsed()) return cmd_sweep(scfg, sout, out);
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "error: no subcommand\n";
    return 2;
}

} // namespace spiky
