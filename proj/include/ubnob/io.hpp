#pragma once

// Serialization and file I/O.
//
// Output formats are part of the determinism contract: identical data must
// produce byte-identical text on every run.  Writers are therefore
// hand-assembled with %.17g numerics, fixed field order, no whitespace
// variety, and UNIX newlines.  Parsing (where flexibility is a feature, not
// a bug) is delegated to nlohmann::json.
//
// Matrix JSON format: {"dim": d, "entries": [[re, im], ...]} row-major.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ubnob/basis.hpp"
#include "ubnob/checks.hpp"
#include "ubnob/linalg.hpp"
#include "ubnob/tomography.hpp"

namespace ubnob {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

inline std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string json_real_list(const std::vector<double>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += g17(xs[i]);
    }
    return out + "]";
}

inline std::string json_complex(const cplx& z) {
    return "[" + g17(z.real()) + "," + g17(z.imag()) + "]";
}

inline std::string json_matrix(const Matrix& m) {
    std::string out = "{\"dim\":" + std::to_string(m.dim()) + ",\"entries\":[";
    for (int i = 0; i < m.dim(); ++i) {
        for (int j = 0; j < m.dim(); ++j) {
            if (i || j) out += ',';
            out += json_complex(m(i, j));
        }
    }
    return out + "]}";
}

inline std::string json_basis(const Basis& b) {
    std::string out = "{\"p\":" + std::to_string(b.p) + ",\"s\":" + std::to_string(b.s) +
                      ",\"vectors\":[";
    for (std::size_t n = 0; n < b.vectors.size(); ++n) {
        if (n) out += ',';
        out += '[';
        for (std::size_t k = 0; k < b.vectors[n].size(); ++k) {
            if (k) out += ',';
            out += json_complex(b.vectors[n][k]);
        }
        out += ']';
    }
    return out + "]}";
}

inline std::string json_family(const BasisFamily& fam) {
    const SeparationParams& sp = fam.params;
    std::string out = "{\"p\":" + std::to_string(sp.p) + ",\"lambda\":" + g17(sp.lambda) +
                      ",\"mu\":" + g17(sp.mu) + ",\"nu\":" + g17(sp.nu) +
                      ",\"eta\":" + g17(sp.eta) + ",\"psi\":[";
    for (int s = 0; s < sp.p; ++s) {
        if (s) out += ',';
        out += json_basis(fam.psi[s]);
    }
    out += "],\"phi\":[";
    for (int s = 0; s < sp.p; ++s) {
        if (s) out += ',';
        out += json_basis(fam.phi[s]);
    }
    out += "],\"x_basis\":" + json_basis(fam.x_basis);
    out += ",\"Z\":" + json_matrix(fam.Z);
    out += ",\"X\":" + json_matrix(fam.X);
    return out + "}";
}

inline std::string json_report(const VerificationReport& rep) {
    std::string out = "{\"p\":" + std::to_string(rep.p) + ",\"lambda\":" + g17(rep.lambda) +
                      ",\"tolerance\":" + g17(rep.tolerance) + ",\"overall_pass\":" +
                      (rep.overall_pass ? "true" : "false") + ",\"checks\":[";
    for (std::size_t i = 0; i < rep.checks.size(); ++i) {
        const CheckResult& c = rep.checks[i];
        if (i) out += ',';
        out += "{\"name\":\"" + c.name + "\",\"value\":" + g17(c.value) +
               ",\"threshold\":" + g17(c.threshold) + ",\"pass\":" + (c.pass ? "true" : "false") +
               "}";
    }
    return out + "]}";
}

inline std::string json_sweep(const SweepResult& res) {
    return "{\"lambda_grid\":" + json_real_list(res.lambda_grid) +
           ",\"rms_error\":" + json_real_list(res.rms_error) +
           ",\"fitted_slope\":" + g17(res.fitted_slope) +
           ",\"shots\":" + std::to_string(res.shots) +
           ",\"trials\":" + std::to_string(res.trials) +
           ",\"seed\":" + std::to_string(res.seed) + "}";
}

inline std::string csv_sweep(const SweepResult& res) {
    std::string out = "lambda,one_minus_lambda,rms_error,trials,shots\n";
    for (std::size_t i = 0; i < res.lambda_grid.size(); ++i) {
        out += g17(res.lambda_grid[i]);
        out += ',';
        out += g17(1.0 - res.lambda_grid[i]);
        out += ',';
        out += g17(res.rms_error[i]);
        out += ',';
        out += std::to_string(res.trials);
        out += ',';
        out += std::to_string(res.shots);
        out += '\n';
    }
    return out;
}

inline std::string json_limit(const LimitDiagnostic& diag) {
    return "{\"p\":" + std::to_string(diag.p) +
           ",\"lambda_sequence\":" + json_real_list(diag.lambda_sequence) +
           ",\"alpha_sn\":" + json_real_list(diag.alpha_sn) +
           ",\"convergence_deltas\":" + json_real_list(diag.convergence_deltas) + "}";
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for writing: " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw io_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Readers
// ---------------------------------------------------------------------------

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open: " + path);
    try {
        nlohmann::json j;
        f >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw io_error(path + ": " + e.what());
    }
}

// Structural (format) problems are io_error; physics validation is left to
// DensityMatrix::from_matrix.
inline Matrix matrix_from_json(const nlohmann::json& j, const std::string& origin) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) {
        throw io_error(origin + ": expected {\"dim\":..., \"entries\":[...]}");
    }
    if (!j["dim"].is_number_integer() || j["dim"].get<long long>() < 1) {
        throw io_error(origin + ": dim must be a positive integer");
    }
    const int dim = j["dim"].get<int>();
    const auto& entries = j["entries"];
    if (!entries.is_array() || entries.size() != static_cast<std::size_t>(dim) * dim) {
        throw io_error(origin + ": entries must hold dim*dim [re, im] pairs");
    }
    Matrix m(dim);
    for (int i = 0; i < dim; ++i) {
        for (int k = 0; k < dim; ++k) {
            const auto& e = entries[static_cast<std::size_t>(i) * dim + k];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
                throw io_error(origin + ": each entry must be [re, im]");
            }
            m(i, k) = cplx(e[0].get<double>(), e[1].get<double>());
        }
    }
    if (!m.all_finite()) throw io_error(origin + ": non-finite entry");
    return m;
}

inline DensityMatrix load_density_matrix(const std::string& path) {
    const Matrix m = matrix_from_json(load_json_file(path), path);
    return DensityMatrix::from_matrix(m); // invalid_argument on physics violations
}

} // namespace ubnob
