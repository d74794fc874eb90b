#pragma once

#include <bit>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "beq/diagnostics.hpp"
#include "beq/errors.hpp"
#include "beq/integrate.hpp"
#include "beq/version.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; big-endian hosts unsupported");

namespace beq {

namespace detail {

// Compact SHA-256 (FIPS 180-4), enough for manifest checksums.
class sha256 {
public:
    sha256() { reset(); }

    void update(const unsigned char* data, std::size_t len) {
        total_ += len;
        while (len > 0) {
            const std::size_t take = std::min<std::size_t>(64 - fill_, len);
            std::memcpy(buf_ + fill_, data, take);
            fill_ += take;
            data += take;
            len -= take;
            if (fill_ == 64) {
                block(buf_);
                fill_ = 0;
            }
        }
    }

    std::string hexdigest() {
        const std::uint64_t bits = total_ * 8;
        unsigned char pad[72] = {0x80};
        const std::size_t padlen = (fill_ < 56 ? 56 - fill_ : 120 - fill_);
        update_nopad(pad, padlen);
        unsigned char lenb[8];
        for (int i = 0; i < 8; ++i) lenb[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
        update_nopad(lenb, 8);
        char out[65];
        for (int i = 0; i < 8; ++i) std::snprintf(out + 8 * i, 9, "%08x", h_[i]);
        return std::string(out, 64);
    }

private:
    void update_nopad(const unsigned char* data, std::size_t len) {
        while (len > 0) {
            const std::size_t take = std::min<std::size_t>(64 - fill_, len);
            std::memcpy(buf_ + fill_, data, take);
            fill_ += take;
            data += take;
            len -= take;
            if (fill_ == 64) {
                block(buf_);
                fill_ = 0;
            }
        }
    }

    void reset() {
        static constexpr std::uint32_t init[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                                                  0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
        std::memcpy(h_, init, sizeof(h_));
        fill_ = 0;
        total_ = 0;
    }

    static std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void block(const unsigned char* p) {
        static constexpr std::uint32_t k[64] = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
            0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
            0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
            0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
            0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
            0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
            0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
            0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
            0xc67178f2};
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
                   (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        std::uint32_t a = h_[0], b = h_[1], c = h_[2], d = h_[3];
        std::uint32_t e = h_[4], f = h_[5], g = h_[6], h = h_[7];
        for (int i = 0; i < 64; ++i) {
            const std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = h + s1 + ch + k[i] + w[i];
            const std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t mj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = s0 + mj;
            h = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        h_[0] += a;
        h_[1] += b;
        h_[2] += c;
        h_[3] += d;
        h_[4] += e;
        h_[5] += f;
        h_[6] += g;
        h_[7] += h;
    }

    std::uint32_t h_[8];
    unsigned char buf_[64];
    std::size_t fill_ = 0;
    std::uint64_t total_ = 0;
};

} // namespace detail

inline std::string file_sha256(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_input("checksum: cannot open " + path.string());
    detail::sha256 h;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        h.update(reinterpret_cast<const unsigned char*>(buf), static_cast<std::size_t>(in.gcount()));
    return h.hexdigest();
}

// 17 significant digits: doubles survive a text round trip bit-exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// One CSV with the shared time axis first, one column per series.
inline void write_series_csv(const std::filesystem::path& path,
                             const std::vector<DiagnosticSeries>& series) {
    if (series.empty()) throw invalid_input("write_series_csv: no series");
    std::ofstream out(path, std::ios::binary); // binary: LF-only, byte-stable
    if (!out) throw invalid_input("write_series_csv: cannot open " + path.string());
    out << "time";
    for (const auto& s : series) out << "," << s.name;
    out << "\n";
    const std::size_t rows = series[0].times.size();
    for (const auto& s : series)
        if (s.times.size() != rows || s.values.size() != rows)
            throw invalid_input("write_series_csv: ragged series");
    for (std::size_t r = 0; r < rows; ++r) {
        out << format_double(series[0].times[r]);
        for (const auto& s : series) out << "," << format_double(s.values[r]);
        out << "\n";
    }
}

namespace detail {

inline void write_raw_field(const std::filesystem::path& path, const VectorField& u) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input("snapshot: cannot open " + path.string());
    for (const auto& c : u.components)
        out.write(reinterpret_cast<const char*>(c.values.data()),
                  static_cast<std::streamsize>(c.values.size() * sizeof(double)));
}

inline nlohmann::ordered_json grid_json(const GridSpec& g) {
    nlohmann::ordered_json j;
    j["dim"] = g.dim;
    j["points"] = std::vector<int>(g.points.begin(), g.points.begin() + g.dim);
    j["lengths"] = std::vector<double>(g.lengths.begin(), g.lengths.begin() + g.dim);
    return j;
}

inline void write_sidecar(const std::filesystem::path& path, const GridSpec& g, double time,
                          const std::string& field, int components) {
    nlohmann::ordered_json j;
    j["grid"] = grid_json(g);
    j["time"] = time;
    j["field"] = field;
    j["components"] = components;
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << "\n";
}

} // namespace detail

// One .f64 file (components concatenated, row-major, little-endian doubles)
// plus a JSON sidecar per field per snapshot.
inline std::vector<std::string> write_snapshots(const std::filesystem::path& dir,
                                                const Trajectory& traj,
                                                const std::string& tag) {
    std::vector<std::string> files;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const SolverState& st = traj.states[i];
        char idx[16];
        std::snprintf(idx, sizeof(idx), "%06zu", i);
        auto emit = [&](const std::string& field, const VectorField& u) {
            const std::string base = tag + "_" + field + "_" + idx;
            detail::write_raw_field(dir / (base + ".f64"), u);
            detail::write_sidecar(dir / (base + ".json"), u.grid, st.time, field, u.grid.dim);
            files.push_back(base + ".f64");
            files.push_back(base + ".json");
        };
        if (st.formulation == Formulation::eulerian) {
            emit("u", st.u);
        } else {
            emit("phi_displacement", st.phi.displacement);
            emit("v", st.v);
        }
    }
    return files;
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Written once, at run end: config echo, tool version, timing, termination,
// and the checksummed inventory of every other output file.
inline void write_manifest(const std::filesystem::path& dir, const nlohmann::ordered_json& config,
                           const std::string& started, const nlohmann::ordered_json& termination,
                           const std::vector<std::string>& files) {
    nlohmann::ordered_json m;
    m["tool"] = version_string;
    m["config"] = config;
    m["started"] = started;
    m["finished"] = utc_timestamp();
    m["termination"] = termination;
    m["files"] = nlohmann::ordered_json::array();
    for (const auto& f : files) {
        nlohmann::ordered_json e;
        e["path"] = f;
        e["bytes"] = static_cast<std::uint64_t>(std::filesystem::file_size(dir / f));
        e["sha256"] = file_sha256(dir / f);
        m["files"].push_back(e);
    }
    std::ofstream out(dir / "run_manifest.json", std::ios::binary);
    if (!out) throw invalid_input("manifest: cannot open output");
    out << m.dump(2) << "\n";
}

} // namespace beq
