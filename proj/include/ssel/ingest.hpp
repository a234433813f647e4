#pragma once

// Gridded dataset I/O and cross-validation splits.
//
// Files are either the flat binary format (magic "SSEL1") or CSV; see
// docs/FORMATS.md for the byte layout. Masked (land) cells hold NaN.

#include "ssel/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ssel {

enum class FileFormat { Auto, Binary, Csv };

struct GriddedDataset {
  std::vector<double> lat;  // one per grid row
  std::vector<double> lon;  // one per grid column
  // Row-major ny x nx; true = valid cell.
  std::vector<bool> mask;
  std::vector<Matrix> frames;  // each ny x nx, masked cells NaN
  std::vector<std::string> times;

  Index grid_rows() const { return static_cast<Index>(lat.size()); }
  Index grid_cols() const { return static_cast<Index>(lon.size()); }
  Index valid_cells() const;
};

// Mapping between snapshot rows and grid cells. Rows enumerate mask-true
// cells in row-major order.
struct CellIndex {
  Index grid_rows = 0;
  Index grid_cols = 0;
  std::vector<Index> cell_of_row;  // flat cell = r * grid_cols + c
  std::vector<Index> row_of_cell;  // -1 for masked cells

  std::pair<Index, Index> grid_position(Index row) const {
    const Index cell = cell_of_row[static_cast<std::size_t>(row)];
    return {cell / grid_cols, cell % grid_cols};
  }
};

struct GridSnapshots {
  SnapshotMatrix snapshots;
  CellIndex cells;
};

GriddedDataset load_grid(const std::filesystem::path& path, FileFormat format = FileFormat::Auto);
void save_grid(const std::filesystem::path& path, const GriddedDataset& ds,
               FileFormat format = FileFormat::Auto);

// One column per frame, one row per valid cell; optional per-row temporal
// mean removal.
GridSnapshots to_snapshots(const GriddedDataset& ds, bool center);

// Plain n x m matrices in the same two formats.
Matrix load_matrix(const std::filesystem::path& path, FileFormat format = FileFormat::Auto);
void save_matrix(const std::filesystem::path& path, const Matrix& m,
                 FileFormat format = FileFormat::Auto);

// Loads either a matrix file or a grid file. Grid files also return the
// cell map.
struct LoadedData {
  SnapshotMatrix snapshots;
  std::optional<CellIndex> cells;
};
LoadedData load_snapshots(const std::filesystem::path& path, bool center = false,
                          FileFormat format = FileFormat::Auto);

struct CvSplit {
  Index fold_count = 0;
  std::vector<std::pair<std::vector<Index>, std::vector<Index>>> folds;  // (train, test)
};

// k contiguous test blocks whose sizes differ by at most one.
CvSplit make_folds(Index m, Index k);

// Subtracts each row's mean across columns.
Matrix center_rows(const Matrix& m);

}  // namespace ssel
