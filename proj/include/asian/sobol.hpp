#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "asian/errors.hpp"
#include "asian/joe_kuo_table.hpp"

namespace asian {

/// One line of a Joe-Kuo direction-number table.
struct DirectionEntry {
    unsigned dimension = 0;
    unsigned degree = 0;      ///< s
    std::uint32_t coeffs = 0; ///< a, the interior polynomial coefficients
    std::vector<std::uint32_t> initial;  ///< m_1 .. m_s
};

/// Table rows for dimensions 2, 3, ...; dimension 1 is implicit.
using DirectionTable = std::vector<DirectionEntry>;

/// Parses the Joe-Kuo text format: one line per dimension "d s a m_1 .. m_s".
/// A leading header line (non-numeric first token) is skipped.
inline DirectionTable parse_joe_kuo(std::istream& in) {
    DirectionTable table;
    std::string line;
    unsigned line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first.find_first_not_of("0123456789") != std::string::npos) {
            if (line_no == 1) continue;
            throw ConfigError("direction table line " + std::to_string(line_no) + " is not numeric");
        }
        DirectionEntry e;
        e.dimension = static_cast<unsigned>(std::stoul(first));
        if (!(ls >> e.degree >> e.coeffs) || e.degree == 0 || e.degree > 31)
            throw ConfigError("direction table line " + std::to_string(line_no) + " is malformed");
        e.initial.resize(e.degree);
        for (unsigned k = 0; k < e.degree; ++k) {
            if (!(ls >> e.initial[k])) throw ConfigError("direction table line " + std::to_string(line_no) + " is short");
            const std::uint32_t m = e.initial[k];
            if (m % 2 == 0 || m >= (1u << (k + 1)))
                throw ConfigError("direction table line " + std::to_string(line_no) + " has an invalid m value");
        }
        const unsigned expected = static_cast<unsigned>(table.size()) + 2;
        if (e.dimension != expected)
            throw ConfigError("direction table dimensions must run 2, 3, ... (line " + std::to_string(line_no) + ")");
        table.push_back(std::move(e));
    }
    return table;
}

/// The bundled Joe-Kuo table (1024 dimensions).
inline const DirectionTable& bundled_joe_kuo() {
    static const DirectionTable table = [] {
        std::istringstream in(detail::joe_kuo_table);
        return parse_joe_kuo(in);
    }();
    return table;
}

/// Sobol' points in Gray-code order with 32-bit resolution.
class SobolGenerator {
public:
    static constexpr unsigned bits = 32;

    explicit SobolGenerator(std::size_t dimension, const DirectionTable& table = bundled_joe_kuo())
        : dim_(dimension), v_(dimension) {
        if (dimension == 0) throw ConfigError("Sobol' dimension must be >= 1");
        if (dimension > table.size() + 1)
            throw ConfigError("Sobol' dimension " + std::to_string(dimension) + " exceeds the direction table (" +
                              std::to_string(table.size() + 1) + ")");
        for (unsigned k = 0; k < bits; ++k) v_[0][k] = 1u << (bits - 1 - k);
        for (std::size_t d = 1; d < dimension; ++d) {
            const auto& e = table[d - 1];
            const unsigned s = e.degree;
            auto& v = v_[d];
            for (unsigned k = 0; k < bits; ++k) {
                if (k < s) {
                    v[k] = e.initial[k] << (bits - 1 - k);
                } else {
                    std::uint32_t x = v[k - s] ^ (v[k - s] >> s);
                    for (unsigned j = 1; j < s; ++j)
                        if ((e.coeffs >> (s - 1 - j)) & 1u) x ^= v[k - j];
                    v[k] = x;
                }
            }
        }
    }

    std::size_t dimension() const { return dim_; }

    /// Point number `index` (0 is the origin).
    void point(std::uint64_t index, std::span<double> out) const {
        if (index >= (std::uint64_t{1} << bits)) throw ConfigError("Sobol' index exceeds 2^32 - 1");
        const std::uint32_t gray = static_cast<std::uint32_t>(index ^ (index >> 1));
        for (std::size_t d = 0; d < dim_; ++d) {
            std::uint32_t x = 0;
            for (unsigned k = 0; k < bits; ++k)
                if ((gray >> k) & 1u) x ^= v_[d][k];
            out[d] = to_unit(x);
        }
    }

    std::vector<double> point(std::uint64_t index) const {
        std::vector<double> out(dim_);
        point(index, out);
        return out;
    }

    /// Sequential access from a starting index; cheaper than point() per draw.
    class Cursor {
    public:
        Cursor(const SobolGenerator& gen, std::uint64_t start) : gen_(&gen), index_(start), state_(gen.dim_) {
            const std::uint32_t gray = static_cast<std::uint32_t>(start ^ (start >> 1));
            for (std::size_t d = 0; d < gen.dim_; ++d) {
                std::uint32_t x = 0;
                for (unsigned k = 0; k < bits; ++k)
                    if ((gray >> k) & 1u) x ^= gen.v_[d][k];
                state_[d] = x;
            }
        }

        std::uint64_t index() const { return index_; }

        /// Writes the current point and advances.
        void next(std::span<double> out) {
            for (std::size_t d = 0; d < state_.size(); ++d) out[d] = to_unit(state_[d]);
            const unsigned c = static_cast<unsigned>(std::countr_one(index_));
            ++index_;
            if (c >= bits) return;
            for (std::size_t d = 0; d < state_.size(); ++d) state_[d] ^= gen_->v_[d][c];
        }

    private:
        const SobolGenerator* gen_;
        std::uint64_t index_;
        std::vector<std::uint32_t> state_;
    };

    Cursor cursor(std::uint64_t start = 0) const { return Cursor(*this, start); }

private:
    static double to_unit(std::uint32_t x) { return static_cast<double>(x) * 0x1p-32; }

    std::size_t dim_;
    std::vector<std::array<std::uint32_t, bits>> v_;
};

}  // namespace asian
