#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aesn/errors.hpp"
#include "aesn/model.hpp"

namespace aesn {

namespace detail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    std::vector<double> data(m.data(), m.data() + m.size()); // column-major
    j["data"] = data;
    return j;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
        throw DataError("model artifact: matrix payload size mismatch");
    }
    return Eigen::Map<const Eigen::MatrixXd>(data.data(), rows, cols);
}

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    const auto data = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

inline nlohmann::json sparse_to_json(const Eigen::SparseMatrix<double>& m) {
    nlohmann::json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    std::vector<int> ri, ci;
    std::vector<double> vals;
    ri.reserve(static_cast<std::size_t>(m.nonZeros()));
    ci.reserve(static_cast<std::size_t>(m.nonZeros()));
    vals.reserve(static_cast<std::size_t>(m.nonZeros()));
    for (int k = 0; k < m.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
            ri.push_back(static_cast<int>(it.row()));
            ci.push_back(static_cast<int>(it.col()));
            vals.push_back(it.value());
        }
    }
    j["row_indices"] = ri;
    j["col_indices"] = ci;
    j["values"] = vals;
    return j;
}

inline Eigen::SparseMatrix<double> sparse_from_json(const nlohmann::json& j) {
    const int rows = j.at("rows").get<int>();
    const int cols = j.at("cols").get<int>();
    const auto ri = j.at("row_indices").get<std::vector<int>>();
    const auto ci = j.at("col_indices").get<std::vector<int>>();
    const auto vals = j.at("values").get<std::vector<double>>();
    if (ri.size() != vals.size() || ci.size() != vals.size()) {
        throw DataError("model artifact: sparse payload size mismatch");
    }
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(vals.size());
    for (std::size_t k = 0; k < vals.size(); ++k) {
        trips.emplace_back(ri[k], ci[k], vals[k]);
    }
    Eigen::SparseMatrix<double> m(rows, cols);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

} // namespace detail

inline nlohmann::json hyper_to_json(const HyperParams& h) {
    return nlohmann::json{{"a_u", h.a_u},     {"a_in", h.a_in},       {"nu", h.nu},
                          {"tau", h.tau},     {"alpha", h.alpha},     {"n_h", h.n_h},
                          {"K_embed", h.K_embed}, {"lags", h.lags},   {"n_eof", h.n_eof}};
}

inline HyperParams hyper_from_json(const nlohmann::json& j) {
    HyperParams h;
    h.a_u = j.at("a_u").get<double>();
    h.a_in = j.at("a_in").get<double>();
    h.nu = j.at("nu").get<double>();
    h.tau = j.at("tau").get<double>();
    h.alpha = j.at("alpha").get<double>();
    h.n_h = j.at("n_h").get<int>();
    h.K_embed = j.at("K_embed").get<int>();
    h.lags = j.at("lags").get<int>();
    h.n_eof = j.at("n_eof").get<int>();
    return h;
}

/// Versioned, self-describing JSON artifact: seeds, hyperparameters, all
/// sampled weights, the trained readout, and the transform record.
inline nlohmann::json save_model(const FittedModel& mf) {
    nlohmann::json j;
    j["format"] = "aesn-model";
    j["version"] = 1;
    j["kind"] = to_string(mf.spec.kind);
    j["lead"] = mf.spec.lead;
    j["lags"] = mf.spec.lags;
    j["washout"] = mf.spec.washout;
    j["pi_res"] = mf.spec.pi_res;
    j["activation"] = to_string(mf.spec.activation);
    j["hyper"] = hyper_to_json(mf.spec.hyper);
    j["seed"] = mf.seed;
    j["n_s"] = mf.n_s;
    j["transform"] = to_string(mf.transform);
    j["reservoir"] = {{"W_res", detail::sparse_to_json(mf.reservoir.W_res)},
                      {"W_in", detail::matrix_to_json(mf.reservoir.W_in)},
                      {"lambda_w", mf.reservoir.lambda_w},
                      {"seed", mf.reservoir.seed},
                      {"activation", to_string(mf.reservoir.activation)}};
    j["readout"] = {{"W_out", detail::matrix_to_json(mf.readout.W_out)},
                    {"tau", mf.readout.tau},
                    {"sigma2", mf.readout.sigma2}};
    j["h_last"] = detail::vector_to_json(mf.h_last);
    if (mf.embedding.has_value()) {
        nlohmann::json e;
        e["n_s"] = mf.embedding->n_s;
        e["n_x"] = mf.embedding->n_x;
        e["K"] = mf.embedding->K;
        e["a_u"] = mf.embedding->a_u;
        e["seed"] = mf.embedding->seed;
        nlohmann::json mats = nlohmann::json::array();
        for (const auto& u : mf.embedding->U) {
            mats.push_back(detail::matrix_to_json(u));
        }
        e["U"] = mats;
        j["embedding"] = e;
        j["S"] = detail::sparse_to_json(mf.S.sparse());
    }
    if (mf.eof_basis.has_value()) {
        j["eof"] = {{"mean", detail::vector_to_json(mf.eof_basis->mean)},
                    {"basis", detail::matrix_to_json(mf.eof_basis->basis)},
                    {"singular_values", detail::vector_to_json(mf.eof_basis->singular_values)}};
    }
    return j;
}

inline FittedModel load_model(const nlohmann::json& j) {
    if (j.value("format", "") != "aesn-model") {
        throw DataError("model artifact: unrecognized format tag");
    }
    if (j.value("version", 0) != 1) {
        throw DataError("model artifact: unsupported version");
    }
    FittedModel mf;
    mf.spec.kind = parse_model_kind(j.at("kind").get<std::string>());
    mf.spec.lead = j.at("lead").get<int>();
    mf.spec.lags = j.at("lags").get<int>();
    mf.spec.washout = j.at("washout").get<int>();
    mf.spec.pi_res = j.at("pi_res").get<double>();
    mf.spec.activation = parse_activation(j.at("activation").get<std::string>());
    mf.spec.hyper = hyper_from_json(j.at("hyper"));
    mf.seed = j.at("seed").get<std::uint64_t>();
    mf.n_s = j.at("n_s").get<int>();
    mf.transform = parse_transform_state(j.at("transform").get<std::string>());
    const auto& r = j.at("reservoir");
    mf.reservoir.W_res = detail::sparse_from_json(r.at("W_res"));
    mf.reservoir.W_in = detail::matrix_from_json(r.at("W_in"));
    mf.reservoir.lambda_w = r.at("lambda_w").get<double>();
    mf.reservoir.seed = r.at("seed").get<std::uint64_t>();
    mf.reservoir.activation = parse_activation(r.at("activation").get<std::string>());
    const auto& ro = j.at("readout");
    mf.readout.W_out = detail::matrix_from_json(ro.at("W_out"));
    mf.readout.tau = ro.at("tau").get<double>();
    mf.readout.sigma2 = ro.at("sigma2").get<double>();
    mf.h_last = detail::vector_from_json(j.at("h_last"));
    if (j.contains("embedding")) {
        const auto& e = j.at("embedding");
        ArealEmbedding emb;
        emb.n_s = e.at("n_s").get<int>();
        emb.n_x = e.at("n_x").get<int>();
        emb.K = e.at("K").get<int>();
        emb.a_u = e.at("a_u").get<double>();
        emb.seed = e.at("seed").get<std::uint64_t>();
        for (const auto& m : e.at("U")) {
            emb.U.push_back(detail::matrix_from_json(m));
        }
        mf.embedding = std::move(emb);
        mf.S = NormalizedAdjacency(detail::sparse_from_json(j.at("S")));
    }
    if (j.contains("eof")) {
        EofBasis b;
        b.mean = detail::vector_from_json(j.at("eof").at("mean"));
        b.basis = detail::matrix_from_json(j.at("eof").at("basis"));
        b.singular_values = detail::vector_from_json(j.at("eof").at("singular_values"));
        mf.eof_basis = std::move(b);
    }
    return mf;
}

inline void save_model_file(const FittedModel& mf, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write model artifact: " + path);
    }
    out << save_model(mf).dump(2) << "\n";
}

inline FittedModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open model artifact: " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model artifact parse error: " + std::string(e.what()));
    }
    return load_model(j);
}

} // namespace aesn
