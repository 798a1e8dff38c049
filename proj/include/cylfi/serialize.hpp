#pragma once

// JSON schemas for the file formats the CLI reads and writes. Complex
// numbers are always [re, im]; tensors list sorted index tuples only.
//
//   BilinearForm      {"dim": N, "matrix": [[[re,im], ...], ...]}
//   Projection        {"dim": N, "rows": [[r, ...], ...]}
//   SymTensor         {"rank": k, "entries": [{"idx": [i, ...], "val": [re, im]}, ...]}
//   MomentFunctional  {"nvars": n, "max_degree": D, "tensors": [SymTensor, ...]}
//
// Files written by the CLI embed a run manifest (command line, input
// paths, optional seed, tool version, timestamps) under "manifest".

#include <complex>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "cylfi/errors.hpp"
#include "cylfi/model.hpp"
#include "cylfi/moments.hpp"
#include "cylfi/polytensor.hpp"

namespace cylfi {

using nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

inline json complex_to_json(cxd z) { return json::array({z.real(), z.imag()}); }

inline cxd complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw parse_error("expected a complex number as [re, im]", 0);
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json form_to_json(const BilinearForm& b) {
    json rows = json::array();
    for (int r = 0; r < b.dim(); ++r) {
        json row = json::array();
        for (int c = 0; c < b.dim(); ++c) row.push_back(complex_to_json(b.matrix()(r, c)));
        rows.push_back(std::move(row));
    }
    return json{{"dim", b.dim()}, {"matrix", std::move(rows)}};
}

inline BilinearForm form_from_json(const json& j) {
    if (!j.contains("dim") || !j.contains("matrix"))
        throw parse_error("bilinear form: missing \"dim\" or \"matrix\"", 0);
    const int n = j.at("dim").get<int>();
    const json& m = j.at("matrix");
    if (!m.is_array() || static_cast<int>(m.size()) != n)
        throw parse_error("bilinear form: matrix must have dim rows", 0);
    Eigen::MatrixXcd mat(n, n);
    for (int r = 0; r < n; ++r) {
        const json& row = m[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw parse_error("bilinear form: matrix must have dim columns per row", 0);
        for (int c = 0; c < n; ++c) mat(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
    }
    return BilinearForm(ModelSpace(n), std::move(mat));
}

inline json projection_to_json(const Projection& p) {
    json rows = json::array();
    for (int r = 0; r < p.arity(); ++r) {
        json row = json::array();
        for (int c = 0; c < p.space.dim; ++c) row.push_back(p.rows(r, c));
        rows.push_back(std::move(row));
    }
    return json{{"dim", p.space.dim}, {"rows", std::move(rows)}};
}

inline Projection projection_from_json(const json& j) {
    if (!j.contains("dim") || !j.contains("rows"))
        throw parse_error("projection: missing \"dim\" or \"rows\"", 0);
    const int n = j.at("dim").get<int>();
    const json& rows = j.at("rows");
    if (!rows.is_array() || rows.empty())
        throw parse_error("projection: rows must be a nonempty array", 0);
    Eigen::MatrixXd mat(static_cast<Eigen::Index>(rows.size()), n);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const json& row = rows[r];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw parse_error("projection: each row must have dim entries", 0);
        for (int c = 0; c < n; ++c) mat(static_cast<Eigen::Index>(r), c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return Projection(ModelSpace(n), std::move(mat));
}

inline json tensor_to_json(const SymTensor& t) {
    json entries = json::array();
    for (const auto& [tuple, v] : t.entries())
        entries.push_back(json{{"idx", tuple}, {"val", complex_to_json(v)}});
    return json{{"rank", t.rank()}, {"entries", std::move(entries)}};
}

inline SymTensor tensor_from_json(const json& j, int nvars) {
    if (!j.contains("rank") || !j.contains("entries"))
        throw parse_error("tensor: missing \"rank\" or \"entries\"", 0);
    SymTensor t(nvars, j.at("rank").get<int>());
    for (const json& e : j.at("entries")) {
        if (!e.contains("idx") || !e.contains("val"))
            throw parse_error("tensor: entry missing \"idx\" or \"val\"", 0);
        t.add(e.at("idx").get<IndexTuple>(), complex_from_json(e.at("val")));
    }
    return t;
}

inline json moments_to_json(const MomentFunctional& mu) {
    json tensors = json::array();
    for (int k = 0; k <= mu.max_degree(); ++k) tensors.push_back(tensor_to_json(mu.tensor(k)));
    return json{{"nvars", mu.nvars()}, {"max_degree", mu.max_degree()}, {"tensors", std::move(tensors)}};
}

inline MomentFunctional moments_from_json(const json& j) {
    if (!j.contains("nvars") || !j.contains("max_degree") || !j.contains("tensors"))
        throw parse_error("moment functional: missing \"nvars\", \"max_degree\" or \"tensors\"", 0);
    MomentFunctional mu(j.at("nvars").get<int>(), j.at("max_degree").get<int>());
    for (const json& tj : j.at("tensors")) {
        SymTensor t = tensor_from_json(tj, mu.nvars());
        if (t.rank() == 0 && t.at({}) != cxd(1.0, 0.0) && !t.is_zero())
            throw domain_error("moment functional: rank-0 tensor must be the normalization 1");
        if (t.rank() > 0) mu.set_tensor(std::move(t));
    }
    return mu;
}

struct RunManifest {
    std::string command;              // full command line as invoked
    std::vector<std::string> inputs;  // input file paths
    std::optional<std::uint64_t> seed;
    std::string started_utc;
    std::string finished_utc;
};

inline json manifest_to_json(const RunManifest& m) {
    json j{{"command", m.command},
           {"inputs", m.inputs},
           {"tool_version", kToolVersion},
           {"timestamps", json{{"started_utc", m.started_utc}, {"finished_utc", m.finished_utc}}}};
    if (m.seed)
        j["seed"] = *m.seed;
    else
        j["seed"] = nullptr;
    return j;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("invalid JSON in ") + path + ": " + e.what(),
                          static_cast<std::size_t>(e.byte));
    }
}

inline void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw error("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

} // namespace cylfi
