#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bootrobopt/panel.hpp"
#include "bootrobopt/rng.hpp"

namespace bootrobopt {

enum class BootstrapMethod { MovingBlock, CircularBlock, Stationary };

inline std::string to_string(BootstrapMethod m) {
    switch (m) {
        case BootstrapMethod::MovingBlock: return "moving_block";
        case BootstrapMethod::CircularBlock: return "circular_block";
        case BootstrapMethod::Stationary: return "stationary";
    }
    return "stationary";
}

inline BootstrapMethod bootstrap_method_from_string(const std::string& s) {
    if (s == "moving_block") return BootstrapMethod::MovingBlock;
    if (s == "circular_block") return BootstrapMethod::CircularBlock;
    if (s == "stationary") return BootstrapMethod::Stationary;
    throw std::invalid_argument("unknown bootstrap method: " + s);
}

/// Dependence-preserving resampling plan. block_length is the fixed block
/// size for the block methods and the expected block length for the
/// stationary bootstrap.
struct BootstrapSpec {
    BootstrapMethod method = BootstrapMethod::Stationary;
    std::size_t block_length = 1;
    std::size_t count = 100;  ///< number of replicates S
    std::uint64_t seed = 42;
};

/// Rate-optimal default block length, ceil(T^(1/3)).
inline std::size_t default_block_length(std::size_t T) {
    const auto L = static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(T))));
    return L < 1 ? 1 : L;
}

/// A length-T resampling path: indices[k] names the source row that becomes
/// row k of the replicate.
struct IndexPath {
    std::vector<std::size_t> indices;
};

/// Generate the index path of one bootstrap replicate.
///
/// moving_block: concatenates ceil(T/L) blocks of L consecutive indices with
/// uniformly random starts in [0, T-L], truncated to length T.
/// circular_block: same with starts in [0, T) and wrap-around modulo T.
/// stationary: position 0 restarts at a uniform index; each later position
/// restarts with probability 1/L (one uniform coin, then one uniform index
/// draw on restart) and otherwise advances the previous index by 1 modulo T,
/// giving geometrically distributed block lengths with mean L.
///
/// Deterministic given (seed, replicate_id): the replicate stream is
/// mt19937_64 seeded with splitmix64(seed ^ splitmix64(replicate_id + 1)),
/// see rng.hpp, so replicates can be produced in any order or in parallel
/// with identical results.
inline IndexPath generate_indices(const BootstrapSpec& spec, std::size_t T,
                                  std::size_t replicate_id) {
    if (T == 0) throw std::invalid_argument("generate_indices: T must be positive");
    if (spec.block_length < 1)
        throw std::invalid_argument("generate_indices: block_length must be >= 1");
    if (spec.count < 1) throw std::invalid_argument("generate_indices: count must be >= 1");
    if (replicate_id >= spec.count)
        throw std::invalid_argument("generate_indices: replicate_id out of range");
    const std::size_t L = spec.block_length;
    if (spec.method == BootstrapMethod::MovingBlock && L > T)
        throw std::invalid_argument("generate_indices: block_length exceeds T for moving_block");

    std::mt19937_64 rng = replicate_rng(spec.seed, replicate_id);
    IndexPath path;
    path.indices.reserve(T);

    switch (spec.method) {
        case BootstrapMethod::MovingBlock: {
            while (path.indices.size() < T) {
                const std::size_t start = uniform_below(rng, T - L + 1);
                for (std::size_t j = 0; j < L && path.indices.size() < T; ++j)
                    path.indices.push_back(start + j);
            }
            break;
        }
        case BootstrapMethod::CircularBlock: {
            while (path.indices.size() < T) {
                const std::size_t start = uniform_below(rng, T);
                for (std::size_t j = 0; j < L && path.indices.size() < T; ++j)
                    path.indices.push_back((start + j) % T);
            }
            break;
        }
        case BootstrapMethod::Stationary: {
            const double restart_prob = 1.0 / static_cast<double>(L);
            std::size_t idx = uniform_below(rng, T);
            path.indices.push_back(idx);
            for (std::size_t t = 1; t < T; ++t) {
                if (uniform_unit(rng) < restart_prob)
                    idx = uniform_below(rng, T);
                else
                    idx = (idx + 1) % T;
                path.indices.push_back(idx);
            }
            break;
        }
    }
    return path;
}

/// Materialize a replicate panel: row k of the output is row path[k] of the
/// source. Asset labels are preserved; dates become synthetic 0..T-1 labels
/// since a resampled path has no calendar meaning.
inline ReturnPanel materialize(const ReturnPanel& r, const IndexPath& path) {
    const std::size_t T = r.rows();
    if (path.indices.size() != T)
        throw std::invalid_argument("materialize: path length does not match panel rows");
    ReturnPanel out;
    out.assets = r.assets;
    out.dates.reserve(T);
    out.values.resize(static_cast<Eigen::Index>(T), r.values.cols());
    for (std::size_t k = 0; k < T; ++k) {
        const std::size_t src = path.indices[k];
        if (src >= T) throw std::logic_error("materialize: index out of range (invariant breach)");
        out.dates.push_back(std::to_string(k));
        out.values.row(static_cast<Eigen::Index>(k)) = r.values.row(static_cast<Eigen::Index>(src));
    }
    return out;
}

/// Debug dump: one-column CSV of a path's indices.
inline void dump_index_path(const IndexPath& path, std::ostream& os) {
    os << "index\n";
    for (const auto i : path.indices) os << i << "\n";
}

/// FNV-1a hash of a path; used to assert the common-random-numbers contract.
inline std::uint64_t path_hash(const IndexPath& path) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto i : path.indices) {
        auto v = static_cast<std::uint64_t>(i);
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xFF;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

}  // namespace bootrobopt
