// ubnob: equally separated bases, bi-orthogonal duals, and optimal state
// tomography in prime dimension.
//
// Subcommands:
//   bases   build the (p, lambda) family and emit it as JSON
//   verify  run the structural verification report (exit 0 iff it passes)
//   tomo    reconstruct a state from exact or shot-noise probabilities
//   sweep   Monte Carlo error-scaling study over a lambda grid
//   qubit   dimension-two pipeline (POVM pair, reconstruction,
//           printed-coefficient comparator, SIC case)
//
// Exit codes: 0 ok (verify: report passed), 1 verify report failed,
// 2 usage, 3 I/O failure, 4 domain error.
// Env: UBNOB_SEED supplies the seed when --seed is absent (default 0).

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ubnob/basis.hpp"
#include "ubnob/checks.hpp"
#include "ubnob/io.hpp"
#include "ubnob/linalg.hpp"
#include "ubnob/qubit.hpp"
#include "ubnob/tomography.hpp"

namespace {

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    int p = 0;
    double lambda = 0.0;
    std::string lambda_grid; // sweep: "a:b:n" or "geomspace:a:b:n" (a, b are 1-lambda)
    std::uint64_t shots = 0; // tomo: 0 means exact probabilities
    int trials = 0;
    std::uint64_t seed = 0;
    std::string state_path;
    double tol = -1.0; // verify: <0 means conditioning-based default
    std::string out_path;
    double r2 = 0.0;
};

std::uint64_t env_seed() {
    const char* env = std::getenv("UBNOB_SEED");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
        throw usage_error("UBNOB_SEED must be an unsigned integer");
    }
    return v;
}

// "a:b:n" -> n inclusive linearly spaced lambdas; "geomspace:a:b:n" -> n
// lambdas with 1-lambda geometrically spaced from a to b.
std::vector<double> parse_lambda_grid(const std::string& spec) {
    std::string body = spec;
    bool geometric = false;
    const std::string prefix = "geomspace:";
    if (body.rfind(prefix, 0) == 0) {
        geometric = true;
        body = body.substr(prefix.size());
    }
    const auto c1 = body.find(':');
    const auto c2 = body.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
        throw usage_error("lambda grid must be start:end:count");
    }
    double a = 0.0, b = 0.0;
    long count = 0;
    try {
        std::size_t used = 0;
        const std::string sa = body.substr(0, c1);
        const std::string sb = body.substr(c1 + 1, c2 - c1 - 1);
        const std::string sn = body.substr(c2 + 1);
        a = std::stod(sa, &used);
        if (used != sa.size()) throw std::invalid_argument(sa);
        b = std::stod(sb, &used);
        if (used != sb.size()) throw std::invalid_argument(sb);
        count = std::stol(sn, &used);
        if (used != sn.size()) throw std::invalid_argument(sn);
    } catch (const std::exception&) {
        throw usage_error("lambda grid must be numeric start:end:count");
    }
    if (count < 1) throw usage_error("lambda grid count must be >= 1");
    if (count == 1 && a != b) throw usage_error("single-point grid requires start == end");
    if (geometric && (a <= 0.0 || b <= 0.0)) {
        throw usage_error("geomspace endpoints are 1-lambda values and must be positive");
    }
    std::vector<double> grid(count);
    for (long i = 0; i < count; ++i) {
        const double frac = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        if (geometric) {
            grid[i] = 1.0 - a * std::pow(b / a, frac);
        } else {
            grid[i] = a + (b - a) * frac;
        }
    }
    return grid;
}

void emit(const RunConfig& cfg, const std::string& content) {
    if (cfg.out_path.empty()) {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << '\n';
    } else {
        ubnob::write_text_file(cfg.out_path, content);
    }
}

RunConfig parse_args(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Equally separated bases, bi-orthogonal duals, and optimal "
                 "state tomography in prime dimension."};
    app.require_subcommand(1);

    CLI::Option* seed_opts[3] = {nullptr, nullptr, nullptr};

    auto* bases = app.add_subcommand("bases", "Build a (p, lambda) basis family as JSON");
    bases->add_option("--p", cfg.p, "prime dimension")->required();
    bases->add_option("--lambda", cfg.lambda, "separation parameter")->required();
    bases->add_option("--out", cfg.out_path, "output path (default stdout)");

    auto* verify = app.add_subcommand("verify", "Run the structural verification report");
    verify->add_option("--p", cfg.p, "prime dimension")->required();
    verify->add_option("--lambda", cfg.lambda, "separation parameter")->required();
    verify->add_option("--tol", cfg.tol, "tolerance (default 1e-10, 1e-8 for lambda > 0.9)");
    verify->add_option("--out", cfg.out_path, "output path (default stdout)");

    auto* tomo = app.add_subcommand("tomo", "Reconstruct a state from measured probabilities");
    tomo->add_option("--p", cfg.p, "prime dimension")->required();
    tomo->add_option("--lambda", cfg.lambda, "separation parameter")->required();
    tomo->add_option("--state", cfg.state_path, "density-matrix JSON path")->required();
    tomo->add_option("--shots", cfg.shots, "sample the probabilities with this many shots");
    seed_opts[0] = tomo->add_option("--seed", cfg.seed, "sampling seed");
    tomo->add_option("--out", cfg.out_path, "output path (default stdout)");

    auto* sweep = app.add_subcommand("sweep", "Shot-noise error scaling over a lambda grid");
    sweep->add_option("--p", cfg.p, "prime dimension")->required();
    sweep->add_option("--lambda-grid", cfg.lambda_grid,
                      "start:end:count (inclusive linear) or geomspace:a:b:count in 1-lambda")
        ->required();
    sweep->add_option("--shots", cfg.shots, "shots per probability")->required();
    sweep->add_option("--trials", cfg.trials, "random states per lambda")->required();
    seed_opts[1] = sweep->add_option("--seed", cfg.seed, "master seed");
    sweep->add_option("--out", cfg.out_path, "output base path (writes .csv and .json)");

    auto* qubit = app.add_subcommand("qubit", "Dimension-two POVM-pair pipeline");
    qubit->add_option("--r2", cfg.r2, "overlap squared, in (0, 1/2)")->required();
    qubit->add_option("--state", cfg.state_path, "density-matrix JSON (default I/2)");
    seed_opts[2] = qubit->add_option("--seed", cfg.seed, "unused; accepted for uniformity");
    qubit->add_option("--out", cfg.out_path, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        cfg.command = "help";
        return cfg;
    } catch (const CLI::CallForAllHelp& e) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        cfg.command = "help";
        return cfg;
    } catch (const CLI::ParseError& e) {
        throw usage_error(e.what());
    }

    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    if (cfg.command != "qubit" && !ubnob::is_prime(cfg.p)) {
        throw usage_error("--p must be prime (got " + std::to_string(cfg.p) + ")");
    }
    bool seed_given = false;
    for (CLI::Option* opt : seed_opts) {
        seed_given = seed_given || (opt != nullptr && opt->count() > 0);
    }
    if (!seed_given) cfg.seed = env_seed();
    if (cfg.command == "verify" && cfg.tol < 0.0) {
        cfg.tol = cfg.lambda > 0.9 ? 1e-8 : 1e-10;
    }
    return cfg;
}

int run_bases(const RunConfig& cfg) {
    const ubnob::BasisFamily fam = ubnob::build_family(cfg.p, cfg.lambda);
    emit(cfg, ubnob::json_family(fam));
    return 0;
}

int run_verify(const RunConfig& cfg) {
    const ubnob::BasisFamily fam = ubnob::build_family(cfg.p, cfg.lambda);
    const ubnob::VerificationReport rep = ubnob::full_report(fam, cfg.tol);
    emit(cfg, ubnob::json_report(rep));
    return rep.overall_pass ? 0 : 1;
}

int run_tomo(const RunConfig& cfg) {
    const ubnob::DensityMatrix rho = ubnob::load_density_matrix(cfg.state_path);
    if (rho.dim() != cfg.p) {
        throw std::invalid_argument("state dimension does not match --p");
    }
    const ubnob::BasisFamily fam = ubnob::build_family(cfg.p, cfg.lambda);
    ubnob::ProbabilityTable table = ubnob::born_probabilities(rho, fam);
    if (cfg.shots > 0) {
        ubnob::RngStream rng(cfg.seed);
        table = ubnob::sample_table(table, cfg.shots, rng);
    }
    const ubnob::Matrix rho_hat = ubnob::reconstruct(table, fam);
    const double err = ubnob::frobenius_distance(rho_hat, rho.matrix());

    std::string out = "{\"p\":" + std::to_string(cfg.p) +
                      ",\"lambda\":" + ubnob::g17(cfg.lambda) +
                      ",\"shots\":" + std::to_string(cfg.shots) +
                      ",\"seed\":" + std::to_string(cfg.seed) +
                      ",\"frobenius_error\":" + ubnob::g17(err) +
                      ",\"trace\":" + ubnob::g17(rho_hat.trace().real()) +
                      ",\"rho_hat\":" + ubnob::json_matrix(rho_hat) + "}";
    emit(cfg, out);
    return 0;
}

int run_sweep(const RunConfig& cfg) {
    const std::vector<double> grid = parse_lambda_grid(cfg.lambda_grid);
    const ubnob::SweepResult res =
        ubnob::noise_sweep(cfg.p, grid, cfg.shots, cfg.trials, cfg.seed);
    if (cfg.out_path.empty()) {
        std::cout << ubnob::csv_sweep(res);
    } else {
        ubnob::write_text_file(cfg.out_path + ".csv", ubnob::csv_sweep(res));
        ubnob::write_text_file(cfg.out_path + ".json", ubnob::json_sweep(res));
    }
    return 0;
}

int run_qubit(const RunConfig& cfg) {
    const ubnob::QubitPair pair = ubnob::povm_pair(std::sqrt(cfg.r2));

    ubnob::Matrix rho(2);
    if (cfg.state_path.empty()) {
        rho(0, 0) = 0.5;
        rho(1, 1) = 0.5;
    } else {
        const ubnob::DensityMatrix loaded = ubnob::load_density_matrix(cfg.state_path);
        if (loaded.dim() != 2) throw std::invalid_argument("qubit state must be 2x2");
        rho = loaded.matrix();
    }

    const std::array<const ubnob::cvec*, 4> states = {
        &pair.xi1.vectors[0], &pair.xi1.vectors[1],
        &pair.xi2.vectors[0], &pair.xi2.vectors[1]};
    std::array<double, 4> probs{};
    for (int a = 0; a < 4; ++a) {
        probs[a] = ubnob::inner(*states[a], rho.apply(*states[a])).real();
    }

    ubnob::Matrix povm_sum(2);
    for (int a = 0; a < 4; ++a) {
        ubnob::add_scaled_outer(povm_sum, 1.0, *states[a], *states[a]);
    }
    const double povm_residual = ubnob::frobenius_distance(
        povm_sum, ubnob::cplx(2.0) * ubnob::Matrix::identity(2));

    const ubnob::QubitReconstruction rec = ubnob::qubit_reconstruct(probs, pair);
    const std::array<double, 4> printed = ubnob::printed_qkj(probs, pair.params.r);
    double num = 0.0, den = 0.0;
    for (int a = 0; a < 4; ++a) {
        num += printed[a] * rec.q[a];
        den += rec.q[a] * rec.q[a];
    }
    const double ratio = num / den;
    const double err = ubnob::frobenius_distance(rec.rho_hat, rho);

    const bool sic = std::abs(cfg.r2 - 1.0 / 3.0) < 1e-9;
    std::string sic_field = "null";
    if (sic) {
        const ubnob::Matrix via_sic = ubnob::sic_reconstruct(probs, pair);
        sic_field = ubnob::g17(ubnob::frobenius_distance(via_sic, rec.rho_hat));
    }

    const ubnob::QubitParams& qp = pair.params;
    std::string out =
        "{\"r2\":" + ubnob::g17(cfg.r2) + ",\"theta\":" + ubnob::g17(qp.theta) +
        ",\"phi\":" + ubnob::g17(qp.phi) + ",\"phi1\":" + ubnob::g17(qp.phi1) +
        ",\"phi2\":" + ubnob::g17(qp.phi2()) + ",\"lambda1\":" + ubnob::g17(qp.lambda1()) +
        ",\"lambda2_sq\":" + ubnob::g17(qp.lambda2_sq()) +
        ",\"povm_residual\":" + ubnob::g17(povm_residual) +
        ",\"xi1\":" + ubnob::json_basis(pair.xi1) + ",\"xi2\":" + ubnob::json_basis(pair.xi2) +
        ",\"probs\":[" + ubnob::g17(probs[0]) + "," + ubnob::g17(probs[1]) + "," +
        ubnob::g17(probs[2]) + "," + ubnob::g17(probs[3]) + "]" +
        ",\"q\":[" + ubnob::g17(rec.q[0]) + "," + ubnob::g17(rec.q[1]) + "," +
        ubnob::g17(rec.q[2]) + "," + ubnob::g17(rec.q[3]) + "]" +
        ",\"q_printed\":[" + ubnob::g17(printed[0]) + "," + ubnob::g17(printed[1]) + "," +
        ubnob::g17(printed[2]) + "," + ubnob::g17(printed[3]) + "]" +
        ",\"printed_ratio\":" + ubnob::g17(ratio) +
        ",\"rho_hat\":" + ubnob::json_matrix(rec.rho_hat) +
        ",\"frobenius_error\":" + ubnob::g17(err) + ",\"sic_agreement\":" + sic_field + "}";
    emit(cfg, out);
    return 0;
}

int run(const RunConfig& cfg) {
    if (cfg.command == "bases") return run_bases(cfg);
    if (cfg.command == "verify") return run_verify(cfg);
    if (cfg.command == "tomo") return run_tomo(cfg);
    if (cfg.command == "sweep") return run_sweep(cfg);
    if (cfg.command == "qubit") return run_qubit(cfg);
    throw usage_error("unknown command: " + cfg.command);
}

} // namespace

int main(int argc, char** argv) {
    try {
        const RunConfig cfg = parse_args(argc, argv);
        if (cfg.command == "help") return 0;
        return run(cfg);
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const ubnob::io_error& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 4;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
}
