#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "linucb/policies.hpp"

namespace linucb {

// Versioned JSON snapshots of model state, used for reproducible resume.
// Doubles are stored as JSON numbers (nlohmann round-trips them exactly);
// fixed-point elements are stored as raw integers.

namespace detail {

template <class T>
nlohmann::json elem_to_json(T v) {
    if constexpr (ElemOps<T>::is_fixed) {
        return v.raw();
    } else {
        return v;
    }
}

template <class T>
T elem_from_json(const nlohmann::json& j) {
    if constexpr (ElemOps<T>::is_fixed) {
        return T::from_raw(j.get<std::int64_t>());
    } else {
        return j.get<double>();
    }
}

template <class T>
nlohmann::json matrix_to_json(const Matrix<T>& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(elem_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class T>
Matrix<T> matrix_from_json(const nlohmann::json& j) {
    const int rows = static_cast<int>(j.size());
    const int cols = rows > 0 ? static_cast<int>(j.at(0).size()) : 0;
    Matrix<T> m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int jj = 0; jj < cols; ++jj) m(i, jj) = elem_from_json<T>(j.at(i).at(jj));
    return m;
}

template <class T>
nlohmann::json vector_to_json(const Vector<T>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (int i = 0; i < v.len(); ++i) out.push_back(elem_to_json(v[i]));
    return out;
}

template <class T>
Vector<T> vector_from_json(const nlohmann::json& j) {
    Vector<T> v(static_cast<int>(j.size()));
    for (int i = 0; i < v.len(); ++i) v[i] = elem_from_json<T>(j.at(i));
    return v;
}

inline nlohmann::json config_to_json(const BanditConfig& cfg) {
    return {{"n_arms", cfg.n_arms}, {"d", cfg.d}, {"f", cfg.f}, {"alpha", cfg.alpha}, {"lambda", cfg.lambda}};
}

inline BanditConfig config_from_json(const nlohmann::json& j) {
    BanditConfig cfg;
    cfg.n_arms = j.at("n_arms").get<int>();
    cfg.d = j.at("d").get<int>();
    cfg.f = j.at("f").get<int>();
    cfg.alpha = j.at("alpha").get<double>();
    cfg.lambda = j.at("lambda").get<double>();
    return cfg;
}

template <class T>
nlohmann::json snapshot_header(const char* kind, Variant variant, const BanditConfig& cfg, std::int64_t t) {
    nlohmann::json j;
    j["format"] = "linucb-model";
    j["version"] = 1;
    j["kind"] = kind;
    j["variant"] = variant == Variant::standard ? "standard" : "optimized";
    j["elem"] = ElemOps<T>::name();
    if constexpr (ElemOps<T>::is_fixed) j["frac_bits"] = T::frac_bits;
    j["config"] = config_to_json(cfg);
    j["t"] = t;
    return j;
}

template <class T>
void check_snapshot_header(const nlohmann::json& j, const char* kind) {
    if (j.at("format").get<std::string>() != "linucb-model" || j.at("version").get<int>() != 1)
        throw UsageError("snapshot: unknown format or version");
    if (j.at("kind").get<std::string>() != kind) throw UsageError("snapshot: model kind mismatch");
    if (j.at("elem").get<std::string>() != ElemOps<T>::name())
        throw UsageError("snapshot: element type mismatch");
    if constexpr (ElemOps<T>::is_fixed) {
        if (j.at("frac_bits").get<int>() != T::frac_bits) throw UsageError("snapshot: frac_bits mismatch");
    }
}

}  // namespace detail

template <class T>
nlohmann::json to_json(const DisjointModel<T>& m) {
    nlohmann::json j = detail::snapshot_header<T>("disjoint", m.variant, m.cfg, m.t);
    nlohmann::json arms = nlohmann::json::array();
    for (int a = 0; a < m.cfg.n_arms; ++a) {
        arms.push_back({{"A", detail::matrix_to_json(m.A[a])}, {"b", detail::vector_to_json(m.b[a])}});
    }
    j["arms"] = std::move(arms);
    return j;
}

template <class T>
DisjointModel<T> disjoint_from_json(const nlohmann::json& j) {
    detail::check_snapshot_header<T>(j, "disjoint");
    const BanditConfig cfg = detail::config_from_json(j.at("config"));
    const Variant variant =
        j.at("variant").get<std::string>() == "standard" ? Variant::standard : Variant::optimized;
    auto m = DisjointModel<T>::make(cfg, variant);
    m.t = j.at("t").get<std::int64_t>();
    for (int a = 0; a < cfg.n_arms; ++a) {
        m.A[a] = detail::matrix_from_json<T>(j.at("arms").at(a).at("A"));
        m.b[a] = detail::vector_from_json<T>(j.at("arms").at(a).at("b"));
    }
    return m;
}

template <class T>
nlohmann::json to_json(const HybridModel<T>& m) {
    nlohmann::json j = detail::snapshot_header<T>("hybrid", m.variant, m.cfg, m.t);
    j["shared"] = {{"A0", detail::matrix_to_json(m.A0)}, {"b0", detail::vector_to_json(m.b0)}};
    nlohmann::json arms = nlohmann::json::array();
    for (int a = 0; a < m.cfg.n_arms; ++a) {
        arms.push_back({{"A", detail::matrix_to_json(m.A[a])},
                        {"B", detail::matrix_to_json(m.B[a])},
                        {"b", detail::vector_to_json(m.b[a])}});
    }
    j["arms"] = std::move(arms);
    return j;
}

template <class T>
HybridModel<T> hybrid_from_json(const nlohmann::json& j) {
    detail::check_snapshot_header<T>(j, "hybrid");
    const BanditConfig cfg = detail::config_from_json(j.at("config"));
    const Variant variant =
        j.at("variant").get<std::string>() == "standard" ? Variant::standard : Variant::optimized;
    auto m = HybridModel<T>::make(cfg, variant);
    m.t = j.at("t").get<std::int64_t>();
    m.A0 = detail::matrix_from_json<T>(j.at("shared").at("A0"));
    m.b0 = detail::vector_from_json<T>(j.at("shared").at("b0"));
    for (int a = 0; a < cfg.n_arms; ++a) {
        m.A[a] = detail::matrix_from_json<T>(j.at("arms").at(a).at("A"));
        m.B[a] = detail::matrix_from_json<T>(j.at("arms").at(a).at("B"));
        m.b[a] = detail::vector_from_json<T>(j.at("arms").at(a).at("b"));
    }
    return m;
}

template <class Model>
void save_model(const Model& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw NumericalError("cannot open snapshot path: " + path);
    out << to_json(m).dump(2) << '\n';
}

inline nlohmann::json load_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NumericalError("cannot open snapshot path: " + path);
    return nlohmann::json::parse(in);
}

}  // namespace linucb
