#pragma once

// Named random ensembles of matrices and positive maps.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string_view>
#include <vector>

#include "oplab/posmaps.hpp"
#include "oplab/random.hpp"

namespace oplab {

enum class MatrixKind { ginibre, psd, unitary, normal, contraction };
enum class MapKind { kraus, schur, pinching };

inline ComplexMatrix random_matrix(MatrixKind kind, Index n, Rng& rng) {
  if (n < 1) throw Error(ErrorKind::InvalidDims, "random_matrix: dimension must be >= 1");
  switch (kind) {
    case MatrixKind::ginibre: return ginibre(n, n, rng);
    case MatrixKind::psd: return random_psd(n, rng);
    case MatrixKind::unitary: return random_unitary(n, rng);
    case MatrixKind::normal: return random_normal(n, rng);
    case MatrixKind::contraction: return random_contraction(n, rng, 0.9);
  }
  return {};
}

inline ComplexMatrix random_matrix(MatrixKind kind, Index n, std::uint64_t seed) {
  Rng rng(seed);
  return random_matrix(kind, n, rng);
}

/// Kraus: 1-4 Ginibre weights of shape n_in x n_out scaled by 1/sqrt(n_in).
/// Schur: multiplier G*G normalized to unit largest diagonal entry.
/// Pinching: random partition of a random permutation of the coordinates.
/// Schur and pinching maps require n_out == n_in.
inline PositiveMap random_map(MapKind kind, Index n_in, Index n_out, Rng& rng) {
  if (n_in < 1 || n_out < 1) throw Error(ErrorKind::InvalidDims, "random_map: dimensions must be >= 1");
  if (kind != MapKind::kraus && n_out != n_in) {
    throw Error(ErrorKind::InvalidDims, "random_map: Schur and pinching maps are square");
  }
  switch (kind) {
    case MapKind::kraus: {
      const Index count = uniform_index(rng, 1, 4);
      std::vector<ComplexMatrix> weights;
      for (Index i = 0; i < count; ++i) {
        weights.push_back(ginibre(n_in, n_out, rng) / std::sqrt(static_cast<double>(n_in)));
      }
      return PositiveMap::kraus(std::move(weights));
    }
    case MapKind::schur: {
      ComplexMatrix s = random_psd(n_in, rng);
      const double top = s.diagonal().real().maxCoeff();
      return PositiveMap::schur(PsdMatrix::from_hermitian(s / top));
    }
    case MapKind::pinching: {
      std::vector<Index> perm(static_cast<std::size_t>(n_in));
      std::iota(perm.begin(), perm.end(), Index{0});
      for (Index i = n_in - 1; i > 0; --i) std::swap(perm[static_cast<std::size_t>(i)],
                                                    perm[static_cast<std::size_t>(uniform_index(rng, 0, i))]);
      std::vector<std::vector<Index>> blocks;
      Index pos = 0;
      while (pos < n_in) {
        const Index len = uniform_index(rng, 1, n_in - pos);
        std::vector<Index> block(perm.begin() + pos, perm.begin() + pos + len);
        std::sort(block.begin(), block.end());
        blocks.push_back(std::move(block));
        pos += len;
      }
      return PositiveMap::pinching(std::move(blocks), n_in);
    }
  }
  throw Error(ErrorKind::InvalidArgument, "random_map: unknown kind");
}

inline PositiveMap random_map(MapKind kind, Index n_in, Index n_out, std::uint64_t seed) {
  Rng rng(seed);
  return random_map(kind, n_in, n_out, rng);
}

}  // namespace oplab
