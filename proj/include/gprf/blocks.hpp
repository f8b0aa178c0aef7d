#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "gprf/common.hpp"

namespace gprf {

struct Rect {
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;

  static Rect of(const Matrix& X) {
    if (X.rows() == 0 || X.cols() < 2)
      throw ValidationError("Rect::of requires at least one 2-D point");
    Rect r;
    r.x_min = X.col(0).minCoeff();
    r.x_max = X.col(0).maxCoeff();
    r.y_min = X.col(1).minCoeff();
    r.y_max = X.col(1).maxCoeff();
    return r;
  }
};

enum class PartitionKind { Grid, PATree, Explicit };

struct GridMeta {
  int cells_x = 1;
  int cells_y = 1;
  Rect bounds;
  // Grid coordinates (ix, iy) of each surviving (nonempty) block.
  std::vector<std::pair<int, int>> cell_of_block;
};

struct Partition {
  std::vector<int> assignment;           // point index -> block id
  std::vector<std::vector<int>> blocks;  // block id -> sorted point indices
  PartitionKind kind = PartitionKind::Explicit;
  std::optional<GridMeta> grid;
  int max_block_size = 0;   // PATree parameter, 0 otherwise
  int clamped_points = 0;   // points outside grid bounds, clamped in

  int num_blocks() const { return static_cast<int>(blocks.size()); }
  Index num_points() const { return static_cast<Index>(assignment.size()); }

  double mean_block_size() const {
    return blocks.empty() ? 0.0
                          : static_cast<double>(assignment.size()) / blocks.size();
  }
};

inline void validate_partition(const Partition& p) {
  std::vector<char> seen(p.assignment.size(), 0);
  for (int b = 0; b < p.num_blocks(); ++b) {
    if (p.blocks[static_cast<size_t>(b)].empty())
      throw ValidationError("partition has an empty block");
    for (int i : p.blocks[static_cast<size_t>(b)]) {
      if (i < 0 || i >= static_cast<int>(p.assignment.size()) || seen[static_cast<size_t>(i)])
        throw ValidationError("partition blocks are not a disjoint cover");
      if (p.assignment[static_cast<size_t>(i)] != b)
        throw ValidationError("partition assignment disagrees with blocks");
      seen[static_cast<size_t>(i)] = 1;
    }
  }
  for (char s : seen)
    if (!s) throw ValidationError("partition blocks are not a disjoint cover");
}

inline Partition make_explicit_partition(std::vector<int> assignment) {
  Partition p;
  p.kind = PartitionKind::Explicit;
  p.assignment = std::move(assignment);
  int max_id = -1;
  for (int b : p.assignment) max_id = std::max(max_id, b);
  p.blocks.assign(static_cast<size_t>(max_id + 1), {});
  for (size_t i = 0; i < p.assignment.size(); ++i)
    p.blocks[static_cast<size_t>(p.assignment[i])].push_back(static_cast<int>(i));
  validate_partition(p);
  return p;
}

// Rectangular grid over bounds; cells are half-open, points on the max edge
// go to the last cell, points outside are clamped to the nearest cell and
// counted in clamped_points. Empty cells are dropped and ids compacted.
inline Partition grid_partition(const Matrix& X, int cells_x, int cells_y,
                                const Rect& bounds) {
  if (X.cols() != 2) throw ValidationError("grid_partition: points must be 2-D");
  if (cells_x < 1 || cells_y < 1)
    throw ValidationError("grid_partition: cell counts must be positive");
  const Index n = X.rows();
  const double dx = (bounds.x_max - bounds.x_min) / cells_x;
  const double dy = (bounds.y_max - bounds.y_min) / cells_y;
  if (!(dx > 0.0) || !(dy > 0.0))
    throw ValidationError("grid_partition: degenerate bounds");

  Partition p;
  p.kind = PartitionKind::Grid;
  p.assignment.assign(static_cast<size_t>(n), -1);

  std::vector<int> cell_count(static_cast<size_t>(cells_x * cells_y), 0);
  std::vector<int> raw_cell(static_cast<size_t>(n));
  int clamped = 0;
  for (Index i = 0; i < n; ++i) {
    int ix = static_cast<int>(std::floor((X(i, 0) - bounds.x_min) / dx));
    int iy = static_cast<int>(std::floor((X(i, 1) - bounds.y_min) / dy));
    // the max edge belongs to the last cell; genuinely outside gets clamped
    const bool outside = X(i, 0) < bounds.x_min || X(i, 0) > bounds.x_max ||
                         X(i, 1) < bounds.y_min || X(i, 1) > bounds.y_max;
    if (outside) ++clamped;
    ix = std::clamp(ix, 0, cells_x - 1);
    iy = std::clamp(iy, 0, cells_y - 1);
    const int cell = iy * cells_x + ix;
    raw_cell[static_cast<size_t>(i)] = cell;
    ++cell_count[static_cast<size_t>(cell)];
  }
  p.clamped_points = clamped;

  GridMeta meta;
  meta.cells_x = cells_x;
  meta.cells_y = cells_y;
  meta.bounds = bounds;
  std::vector<int> block_of_cell(static_cast<size_t>(cells_x * cells_y), -1);
  for (int cell = 0; cell < cells_x * cells_y; ++cell) {
    if (cell_count[static_cast<size_t>(cell)] == 0) continue;
    block_of_cell[static_cast<size_t>(cell)] = static_cast<int>(meta.cell_of_block.size());
    meta.cell_of_block.emplace_back(cell % cells_x, cell / cells_x);
  }
  p.blocks.assign(meta.cell_of_block.size(), {});
  for (Index i = 0; i < n; ++i) {
    const int b = block_of_cell[static_cast<size_t>(raw_cell[static_cast<size_t>(i)])];
    p.assignment[static_cast<size_t>(i)] = b;
    p.blocks[static_cast<size_t>(b)].push_back(static_cast<int>(i));
  }
  p.grid = std::move(meta);
  validate_partition(p);
  return p;
}

inline Partition grid_partition(const Matrix& X, int cells_per_side,
                                const Rect& bounds) {
  return grid_partition(X, cells_per_side, cells_per_side, bounds);
}

// a x b with a*b = cells and the aspect ratio as square as possible.
inline std::pair<int, int> squarest_grid(int cells) {
  int best = 1;
  for (int a = 1; a * a <= cells; ++a)
    if (cells % a == 0) best = a;
  return {best, cells / best};
}

namespace detail {

inline void pa_tree_split(const Matrix& X, std::vector<int>& indices,
                          size_t lo, size_t hi, int max_block_size,
                          std::vector<std::vector<int>>& out_blocks) {
  const size_t count = hi - lo;
  if (count <= static_cast<size_t>(max_block_size)) {
    std::vector<int> block(indices.begin() + static_cast<std::ptrdiff_t>(lo),
                           indices.begin() + static_cast<std::ptrdiff_t>(hi));
    std::sort(block.begin(), block.end());
    out_blocks.push_back(std::move(block));
    return;
  }
  const int d = static_cast<int>(X.cols());
  Vector mean = Vector::Zero(d);
  for (size_t k = lo; k < hi; ++k) mean += X.row(indices[k]).transpose();
  mean /= static_cast<double>(count);
  Matrix cov = Matrix::Zero(d, d);
  for (size_t k = lo; k < hi; ++k) {
    const Vector c = X.row(indices[k]).transpose() - mean;
    cov.noalias() += c * c.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const Vector axis = eig.eigenvectors().col(d - 1);  // leading eigenvector

  // Median split on the projection; ties broken by original index so the
  // result is deterministic.
  std::sort(indices.begin() + static_cast<std::ptrdiff_t>(lo),
            indices.begin() + static_cast<std::ptrdiff_t>(hi),
            [&](int a, int b) {
              const double pa = X.row(a) * axis;
              const double pb = X.row(b) * axis;
              if (pa != pb) return pa < pb;
              return a < b;
            });
  const size_t mid = lo + count / 2;
  pa_tree_split(X, indices, lo, mid, max_block_size, out_blocks);
  pa_tree_split(X, indices, mid, hi, max_block_size, out_blocks);
}

}  // namespace detail

// Principal-axis tree: recursively split at the median projection onto the
// leading eigenvector of the point covariance until blocks are small enough.
inline Partition pa_tree_partition(const Matrix& X, int max_block_size) {
  if (X.rows() < 1) throw ValidationError("pa_tree_partition: no points");
  if (max_block_size < 1)
    throw ValidationError("pa_tree_partition: max_block_size must be positive");
  std::vector<int> indices(static_cast<size_t>(X.rows()));
  std::iota(indices.begin(), indices.end(), 0);
  std::vector<std::vector<int>> blocks;
  detail::pa_tree_split(X, indices, 0, indices.size(), max_block_size, blocks);

  Partition p;
  p.kind = PartitionKind::PATree;
  p.max_block_size = max_block_size;
  p.blocks = std::move(blocks);
  p.assignment.assign(static_cast<size_t>(X.rows()), -1);
  for (int b = 0; b < p.num_blocks(); ++b)
    for (int i : p.blocks[static_cast<size_t>(b)])
      p.assignment[static_cast<size_t>(i)] = b;
  validate_partition(p);
  return p;
}

struct EdgeSet {
  std::vector<std::pair<int, int>> edges;  // i < j, sorted lexicographically
  std::vector<int> degree;
  int num_blocks = 0;

  int num_edges() const { return static_cast<int>(edges.size()); }
};

inline EdgeSet make_edge_set(int num_blocks,
                             std::vector<std::pair<int, int>> edges) {
  EdgeSet e;
  e.num_blocks = num_blocks;
  for (auto& [i, j] : edges) {
    if (i > j) std::swap(i, j);
    if (i == j) throw ValidationError("edge set: self-edge");
    if (i < 0 || j >= num_blocks) throw ValidationError("edge set: block id out of range");
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  e.edges = std::move(edges);
  e.degree.assign(static_cast<size_t>(num_blocks), 0);
  for (const auto& [i, j] : e.edges) {
    ++e.degree[static_cast<size_t>(i)];
    ++e.degree[static_cast<size_t>(j)];
  }
  return e;
}

inline EdgeSet edges_empty(int num_blocks) {
  if (num_blocks < 1) throw ValidationError("edges_empty: need at least one block");
  return make_edge_set(num_blocks, {});
}

inline EdgeSet edges_complete(int num_blocks) {
  if (num_blocks < 1) throw ValidationError("edges_complete: need at least one block");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<size_t>(num_blocks) * (num_blocks - 1) / 2);
  for (int i = 0; i < num_blocks; ++i)
    for (int j = i + 1; j < num_blocks; ++j) edges.emplace_back(i, j);
  return make_edge_set(num_blocks, std::move(edges));
}

// 8-neighborhood of the grid cells underlying a grid partition.
inline EdgeSet edges_grid_neighbors(const Partition& partition) {
  if (partition.kind != PartitionKind::Grid || !partition.grid)
    throw ValidationError("edges_grid_neighbors: wrong partition kind (grid required)");
  const auto& meta = *partition.grid;
  std::vector<std::pair<int, int>> edges;
  const int M = partition.num_blocks();
  for (int a = 0; a < M; ++a)
    for (int b = a + 1; b < M; ++b) {
      const auto& [ax, ay] = meta.cell_of_block[static_cast<size_t>(a)];
      const auto& [bx, by] = meta.cell_of_block[static_cast<size_t>(b)];
      if (std::abs(ax - bx) <= 1 && std::abs(ay - by) <= 1)
        edges.emplace_back(a, b);
    }
  return make_edge_set(M, std::move(edges));
}

// Edge (i, j) iff any point of block i starts within tau of any point of
// block j, measured on the initial locations X0.
inline EdgeSet edges_distance_threshold(const Partition& partition,
                                        const Matrix& X0, double tau) {
  if (X0.rows() != partition.num_points())
    throw ValidationError("edges_distance_threshold: X0 has wrong row count");
  const int M = partition.num_blocks();
  const double tau2 = tau * tau;
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < M; ++a)
    for (int b = a + 1; b < M; ++b) {
      bool close = false;
      for (int p : partition.blocks[static_cast<size_t>(a)]) {
        for (int q : partition.blocks[static_cast<size_t>(b)]) {
          if ((X0.row(p) - X0.row(q)).squaredNorm() <= tau2) {
            close = true;
            break;
          }
        }
        if (close) break;
      }
      if (close) edges.emplace_back(a, b);
    }
  return make_edge_set(M, std::move(edges));
}

}  // namespace gprf
