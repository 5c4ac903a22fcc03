#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "jigsaw/errors.hpp"
#include "jigsaw/transport.hpp"

namespace jigsaw {

// Published operation-count model: transferring N parts costs
// N + floor(N/k)*(k-1) block XORs and floor(N/k) block multiplications.
// The live codec works in groups of k-1 parts and masks one R per group, so
// its measured counts differ; both are reported, neither is "corrected".

inline uint64_t model_xor_count(uint64_t n, uint64_t k) {
    if (k < 2)
        throw Error("k must be at least 2");
    return n + (n / k) * (k - 1);
}

inline uint64_t model_mul_count(uint64_t n, uint64_t k) {
    if (k < 2)
        throw Error("k must be at least 2");
    return n / k;
}

// AES reference point: at least 11 block XORs per block processed.
inline uint64_t aes_xor_count(uint64_t n_blocks) { return 11 * n_blocks; }

struct CurveRow {
    uint64_t k = 0;
    uint64_t n = 0; // best-case part count (parts of full size ps)
    uint64_t best_case_xor = 0;
    uint64_t worst_case_xor = 0; // parts of size ps/2, i.e. 2n of them
    uint64_t mul = 0;            // best-case multiplications
    uint64_t aes_xor = 0;
};

// One row per (k, n) point. n values come either directly from n_values or
// from data sizes (n = data_bits / ps, the best-case split); the worst case
// doubles the part count (parts of ps/2 bits).
inline std::vector<CurveRow> emit_curves(const std::vector<uint64_t>& k_values,
                                         const std::vector<uint64_t>& n_values,
                                         const std::vector<uint64_t>& data_bits_values = {},
                                         uint64_t ps_bits = 1024) {
    if (k_values.empty() || (n_values.empty() && data_bits_values.empty()))
        throw Error("emit_curves needs at least one k and one n or data size");
    std::vector<uint64_t> ns = n_values;
    for (uint64_t bits : data_bits_values)
        ns.push_back(bits / ps_bits);
    std::vector<CurveRow> rows;
    rows.reserve(k_values.size() * ns.size());
    for (uint64_t k : k_values) {
        for (uint64_t n : ns) {
            CurveRow row;
            row.k = k;
            row.n = n;
            row.best_case_xor = model_xor_count(n, k);
            row.worst_case_xor = model_xor_count(2 * n, k);
            row.mul = model_mul_count(n, k);
            row.aes_xor = aes_xor_count(n);
            rows.push_back(row);
        }
    }
    return rows;
}

inline std::string curves_csv(const std::vector<CurveRow>& rows) {
    std::ostringstream out;
    out << "k,n,best_case_xor,worst_case_xor,mul,aes_xor\n";
    for (const CurveRow& r : rows)
        out << r.k << ',' << r.n << ',' << r.best_case_xor << ',' << r.worst_case_xor << ','
            << r.mul << ',' << r.aes_xor << '\n';
    return out.str();
}

// Measured block-op counts from a completed transfer, next to which the
// analytic numbers are usually printed.
struct OpCount {
    uint64_t xor_blocks = 0;
    uint64_t mul_blocks = 0;
    uint64_t n_parts = 0;
    uint64_t k = 0;
};

inline OpCount instrumented_counts(const TransferReport& report) {
    return OpCount{report.xor_blocks, report.mul_blocks, report.parts, report.k};
}

} // namespace jigsaw
