#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "ymh/model.hpp"

namespace ymh {

// Snapshot layout (little-endian):
//   magic "YMHS", u8 version, u8 target tag, u32 d, u32 L, u32 N,
//   then |E+| row-major f64 N x N edge matrices in positive-edge order,
//   then site values (N f64 per site, or N x N f64 for the group target).
inline constexpr std::uint8_t kSnapshotVersion = 1;

namespace detail {
template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void read_pod(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
}  // namespace detail

inline void save_snapshot(const FieldConfiguration& cfg, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    require(os.good(), "save_snapshot: cannot open " + path);
    os.write("YMHS", 4);
    detail::write_pod(os, kSnapshotVersion);
    detail::write_pod(os, static_cast<std::uint8_t>(cfg.target));
    detail::write_pod(os, static_cast<std::uint32_t>(cfg.lat().dim()));
    detail::write_pod(os, static_cast<std::uint32_t>(cfg.lat().side()));
    detail::write_pod(os, static_cast<std::uint32_t>(cfg.N));
    for (const auto& q : cfg.Q)
        for (int i = 0; i < cfg.N; ++i)
            for (int j = 0; j < cfg.N; ++j) detail::write_pod(os, q(i, j));
    if (cfg.target == HiggsTarget::Group) {
        for (const auto& p : cfg.phi_mat)
            for (int i = 0; i < cfg.N; ++i)
                for (int j = 0; j < cfg.N; ++j) detail::write_pod(os, p(i, j));
    } else {
        for (const auto& p : cfg.phi_vec)
            for (int i = 0; i < cfg.N; ++i) detail::write_pod(os, p(i));
    }
    require(os.good(), "save_snapshot: write failed for " + path);
}

inline FieldConfiguration load_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(is.good(), "load_snapshot: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    require(is.good() && std::string(magic, 4) == "YMHS", "load_snapshot: bad magic");
    std::uint8_t version = 0, target_tag = 0;
    std::uint32_t d = 0, L = 0, N = 0;
    detail::read_pod(is, version);
    require(version == kSnapshotVersion, "load_snapshot: unsupported version");
    detail::read_pod(is, target_tag);
    detail::read_pod(is, d);
    detail::read_pod(is, L);
    detail::read_pod(is, N);
    require(target_tag <= 2, "load_snapshot: bad target tag");

    FieldConfiguration cfg;
    cfg.lattice = std::make_shared<Lattice>(static_cast<int>(d), static_cast<int>(L));
    cfg.N = static_cast<int>(N);
    cfg.target = static_cast<HiggsTarget>(target_tag);
    cfg.Q.assign(cfg.lat().edge_count(), Matrix::Zero(cfg.N, cfg.N));
    for (auto& q : cfg.Q)
        for (int i = 0; i < cfg.N; ++i)
            for (int j = 0; j < cfg.N; ++j) detail::read_pod(is, q(i, j));
    if (cfg.target == HiggsTarget::Group) {
        cfg.phi_mat.assign(cfg.lat().site_count(), Matrix::Zero(cfg.N, cfg.N));
        for (auto& p : cfg.phi_mat)
            for (int i = 0; i < cfg.N; ++i)
                for (int j = 0; j < cfg.N; ++j) detail::read_pod(is, p(i, j));
    } else {
        cfg.phi_vec.assign(cfg.lat().site_count(), Vector::Zero(cfg.N));
        for (auto& p : cfg.phi_vec)
            for (int i = 0; i < cfg.N; ++i) detail::read_pod(is, p(i));
    }
    require(is.good(), "load_snapshot: truncated file " + path);
    return cfg;
}

/// Lossless text dump for debugging; full round-trip precision.
inline void dump_text(const FieldConfiguration& cfg, std::ostream& os) {
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << buf;
    };
    os << "ymh-snapshot v" << int(kSnapshotVersion) << " d=" << cfg.lat().dim()
       << " L=" << cfg.lat().side() << " N=" << cfg.N
       << " target=" << target_name(cfg.target) << "\n";
    for (std::size_t ei = 0; ei < cfg.Q.size(); ++ei) {
        os << "Q " << ei;
        for (int i = 0; i < cfg.N; ++i)
            for (int j = 0; j < cfg.N; ++j) {
                os << ' ';
                put(cfg.Q[ei](i, j));
            }
        os << "\n";
    }
    const auto sites = cfg.lat().site_count();
    for (std::int64_t x = 0; x < sites; ++x) {
        os << "Phi " << x;
        if (cfg.target == HiggsTarget::Group) {
            for (int i = 0; i < cfg.N; ++i)
                for (int j = 0; j < cfg.N; ++j) {
                    os << ' ';
                    put(cfg.phi_mat[x](i, j));
                }
        } else {
            for (int i = 0; i < cfg.N; ++i) {
                os << ' ';
                put(cfg.phi_vec[x](i));
            }
        }
        os << "\n";
    }
}

}  // namespace ymh
