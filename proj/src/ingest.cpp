#include "ssel/ingest.hpp"

#include "ssel/errors.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

namespace ssel {

namespace {

constexpr char kMagic[] = {'S', 'S', 'E', 'L', '1'};
constexpr std::size_t kMagicLen = sizeof(kMagic);

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool has_magic(const std::vector<unsigned char>& bytes) {
  return bytes.size() >= kMagicLen && std::memcmp(bytes.data(), kMagic, kMagicLen) == 0;
}

FileFormat resolve(FileFormat f, const std::filesystem::path& path) {
  if (f != FileFormat::Auto) return f;
  return path.extension() == ".csv" ? FileFormat::Csv : FileFormat::Binary;
}

struct BinaryArray {
  std::vector<std::uint32_t> dims;
  std::vector<double> values;  // row-major
};

BinaryArray parse_binary(const std::vector<unsigned char>& bytes, const std::string& name) {
  if (!has_magic(bytes)) throw Error(ErrorCode::ParseError, name + ": missing SSEL1 magic");
  std::size_t pos = kMagicLen;
  auto read_u32 = [&](const char* what) {
    if (pos + 4 > bytes.size()) throw Error(ErrorCode::ParseError, name + ": truncated " + what);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(bytes[pos + static_cast<std::size_t>(b)]) << (8 * b);
    pos += 4;
    return v;
  };
  BinaryArray arr;
  const std::uint32_t rank = read_u32("rank");
  if (rank < 2 || rank > 3) throw Error(ErrorCode::ParseError, name + ": rank must be 2 or 3");
  std::uint64_t count = 1;
  for (std::uint32_t d = 0; d < rank; ++d) {
    arr.dims.push_back(read_u32("dimension"));
    count *= arr.dims.back();
  }
  if (bytes.size() - pos != count * 8) {
    throw Error(ErrorCode::ParseError, name + ": payload holds " + std::to_string(bytes.size() - pos) +
                                           " bytes, header promises " + std::to_string(count * 8));
  }
  arr.values.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t raw = 0;
    for (int b = 0; b < 8; ++b) raw |= static_cast<std::uint64_t>(bytes[pos + static_cast<std::size_t>(b)]) << (8 * b);
    pos += 8;
    arr.values[i] = std::bit_cast<double>(raw);
  }
  return arr;
}

void write_binary(const std::filesystem::path& path, const std::vector<std::uint32_t>& dims,
                  const std::vector<double>& values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(kMagic, kMagicLen);
  auto put_u32 = [&](std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.put(static_cast<char>((v >> (8 * b)) & 0xffu));
  };
  put_u32(static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) put_u32(d);
  for (double v : values) {
    const auto raw = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.put(static_cast<char>((raw >> (8 * b)) & 0xffu));
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

double parse_value(const std::string& field, const std::string& where) {
  std::string t;
  for (char ch : field) {
    if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
  }
  if (t == "nan" || t == "NaN" || t == "NAN") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, where + ": cannot parse '" + field + "'");
  }
}

std::vector<double> split_row(const std::string& line, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(parse_value(field, where));
  return out;
}

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

GriddedDataset grid_from_frames(std::vector<Matrix> frames, const std::string& name) {
  if (frames.empty()) throw Error(ErrorCode::InconsistentGrid, name + ": no frames");
  const Index ny = frames.front().rows();
  const Index nx = frames.front().cols();
  GriddedDataset ds;
  ds.lat.resize(static_cast<std::size_t>(ny));
  ds.lon.resize(static_cast<std::size_t>(nx));
  for (Index r = 0; r < ny; ++r) ds.lat[static_cast<std::size_t>(r)] = static_cast<double>(r);
  for (Index c = 0; c < nx; ++c) ds.lon[static_cast<std::size_t>(c)] = static_cast<double>(c);
  ds.mask.resize(static_cast<std::size_t>(ny * nx));
  for (Index r = 0; r < ny; ++r)
    for (Index c = 0; c < nx; ++c) ds.mask[static_cast<std::size_t>(r * nx + c)] = std::isfinite(frames.front()(r, c));

  for (std::size_t t = 0; t < frames.size(); ++t) {
    const Matrix& f = frames[t];
    if (f.rows() != ny || f.cols() != nx) {
      throw Error(ErrorCode::InconsistentGrid, name + ": frame " + std::to_string(t) + " has shape " +
                                                   std::to_string(f.rows()) + "x" + std::to_string(f.cols()));
    }
    for (Index r = 0; r < ny; ++r)
      for (Index c = 0; c < nx; ++c) {
        if (std::isfinite(f(r, c)) != ds.mask[static_cast<std::size_t>(r * nx + c)]) {
          throw Error(ErrorCode::InconsistentGrid, name + ": mask of frame " + std::to_string(t) +
                                                       " differs from frame 0 at (" + std::to_string(r) +
                                                       ", " + std::to_string(c) + ")");
        }
      }
    ds.times.push_back(std::to_string(t));
  }
  ds.frames = std::move(frames);
  return ds;
}

GriddedDataset load_grid_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const std::string name = path.string();
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, name + ": empty file");
  std::istringstream header(line);
  std::string hash, tag;
  long long t = 0, ny = 0, nx = 0;
  header >> hash >> tag >> t >> ny >> nx;
  if (hash != "#" || tag != "ssel-grid" || t < 1 || ny < 1 || nx < 1) {
    throw Error(ErrorCode::ParseError, name + ": expected header '# ssel-grid <frames> <rows> <cols>'");
  }
  std::vector<Matrix> frames;
  Index lineno = 1;
  for (long long f = 0; f < t; ++f) {
    Matrix frame(ny, nx);
    for (long long r = 0; r < ny; ++r) {
      if (!std::getline(in, line)) {
        throw Error(ErrorCode::InconsistentGrid, name + ": frame " + std::to_string(f) + " is missing rows");
      }
      ++lineno;
      const auto vals = split_row(line, name + ":" + std::to_string(lineno));
      if (static_cast<long long>(vals.size()) != nx) {
        throw Error(ErrorCode::InconsistentGrid, name + ":" + std::to_string(lineno) + ": expected " +
                                                     std::to_string(nx) + " columns, got " +
                                                     std::to_string(vals.size()));
      }
      for (long long c = 0; c < nx; ++c) frame(r, c) = vals[static_cast<std::size_t>(c)];
    }
    frames.push_back(std::move(frame));
  }
  while (std::getline(in, line)) {
    if (!line.empty()) throw Error(ErrorCode::InconsistentGrid, name + ": trailing rows after last frame");
  }
  return grid_from_frames(std::move(frames), name);
}

}  // namespace

Index GriddedDataset::valid_cells() const {
  Index count = 0;
  for (bool b : mask) count += b ? 1 : 0;
  return count;
}

GriddedDataset load_grid(const std::filesystem::path& path, FileFormat format) {
  if (resolve(format, path) == FileFormat::Csv) return load_grid_csv(path);
  const auto arr = parse_binary(read_all(path), path.string());
  if (arr.dims.size() != 3) throw Error(ErrorCode::ParseError, path.string() + ": grid file must have rank 3");
  const Index t = arr.dims[0], ny = arr.dims[1], nx = arr.dims[2];
  std::vector<Matrix> frames;
  std::size_t k = 0;
  for (Index f = 0; f < t; ++f) {
    Matrix frame(ny, nx);
    for (Index r = 0; r < ny; ++r)
      for (Index c = 0; c < nx; ++c) frame(r, c) = arr.values[k++];
    frames.push_back(std::move(frame));
  }
  return grid_from_frames(std::move(frames), path.string());
}

void save_grid(const std::filesystem::path& path, const GriddedDataset& ds, FileFormat format) {
  const Index ny = ds.grid_rows(), nx = ds.grid_cols();
  for (const auto& f : ds.frames) {
    if (f.rows() != ny || f.cols() != nx) throw Error(ErrorCode::InconsistentGrid, "frame shape mismatch");
  }
  if (resolve(format, path) == FileFormat::Csv) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << "# ssel-grid " << ds.frames.size() << ' ' << ny << ' ' << nx << '\n';
    for (const auto& f : ds.frames)
      for (Index r = 0; r < ny; ++r) {
        for (Index c = 0; c < nx; ++c) out << (c ? "," : "") << format_value(f(r, c));
        out << '\n';
      }
    return;
  }
  std::vector<double> values;
  values.reserve(ds.frames.size() * static_cast<std::size_t>(ny * nx));
  for (const auto& f : ds.frames)
    for (Index r = 0; r < ny; ++r)
      for (Index c = 0; c < nx; ++c) values.push_back(f(r, c));
  write_binary(path, {static_cast<std::uint32_t>(ds.frames.size()), static_cast<std::uint32_t>(ny),
                      static_cast<std::uint32_t>(nx)},
               values);
}

GridSnapshots to_snapshots(const GriddedDataset& ds, bool center) {
  const Index ny = ds.grid_rows(), nx = ds.grid_cols();
  CellIndex cells;
  cells.grid_rows = ny;
  cells.grid_cols = nx;
  cells.row_of_cell.assign(static_cast<std::size_t>(ny * nx), -1);
  for (Index cell = 0; cell < ny * nx; ++cell) {
    if (ds.mask[static_cast<std::size_t>(cell)]) {
      cells.row_of_cell[static_cast<std::size_t>(cell)] = static_cast<Index>(cells.cell_of_row.size());
      cells.cell_of_row.push_back(cell);
    }
  }
  if (cells.cell_of_row.empty()) throw Error(ErrorCode::EmptyMask, "grid has no valid cells");

  const Index n = static_cast<Index>(cells.cell_of_row.size());
  const Index m = static_cast<Index>(ds.frames.size());
  Matrix x(n, m);
  for (Index j = 0; j < m; ++j) {
    const Matrix& f = ds.frames[static_cast<std::size_t>(j)];
    for (Index i = 0; i < n; ++i) {
      const Index cell = cells.cell_of_row[static_cast<std::size_t>(i)];
      x(i, j) = f(cell / nx, cell % nx);
    }
  }
  if (center) x = center_rows(x);
  return GridSnapshots{SnapshotMatrix(std::move(x)), std::move(cells)};
}

Matrix load_matrix(const std::filesystem::path& path, FileFormat format) {
  if (resolve(format, path) == FileFormat::Csv) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    Index lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      rows.push_back(split_row(line, path.string() + ":" + std::to_string(lineno)));
      if (rows.back().size() != rows.front().size()) {
        throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(lineno) + ": ragged row");
      }
    }
    if (rows.empty()) throw Error(ErrorCode::ParseError, path.string() + ": no data rows");
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
  }
  const auto arr = parse_binary(read_all(path), path.string());
  if (arr.dims.size() != 2) throw Error(ErrorCode::ParseError, path.string() + ": matrix file must have rank 2");
  Matrix m(arr.dims[0], arr.dims[1]);
  std::size_t k = 0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = arr.values[k++];
  return m;
}

void save_matrix(const std::filesystem::path& path, const Matrix& m, FileFormat format) {
  if (resolve(format, path) == FileFormat::Csv) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_value(m(i, j));
      out << '\n';
    }
    return;
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) values.push_back(m(i, j));
  write_binary(path, {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())}, values);
}

LoadedData load_snapshots(const std::filesystem::path& path, bool center, FileFormat format) {
  const FileFormat fmt = resolve(format, path);
  bool is_grid = false;
  if (fmt == FileFormat::Csv) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::string first;
    std::getline(in, first);
    is_grid = first.rfind("# ssel-grid", 0) == 0;
  } else {
    const auto bytes = read_all(path);
    if (!has_magic(bytes) || bytes.size() < kMagicLen + 4) {
      throw Error(ErrorCode::ParseError, path.string() + ": missing SSEL1 magic");
    }
    is_grid = bytes[kMagicLen] == 3;
  }
  if (is_grid) {
    auto gs = to_snapshots(load_grid(path, fmt), center);
    return LoadedData{std::move(gs.snapshots), std::move(gs.cells)};
  }
  Matrix m = load_matrix(path, fmt);
  if (center) m = center_rows(m);
  return LoadedData{SnapshotMatrix(std::move(m)), std::nullopt};
}

CvSplit make_folds(Index m, Index k) {
  if (k < 2 || m < k) {
    throw Error(ErrorCode::BadFoldCount, "need 2 <= folds <= columns, got folds=" + std::to_string(k) +
                                             " columns=" + std::to_string(m));
  }
  CvSplit split;
  split.fold_count = k;
  for (Index f = 0; f < k; ++f) {
    const Index begin = f * m / k;
    const Index end = (f + 1) * m / k;
    std::vector<Index> train, test;
    for (Index j = 0; j < m; ++j) (j >= begin && j < end ? test : train).push_back(j);
    split.folds.emplace_back(std::move(train), std::move(test));
  }
  return split;
}

Matrix center_rows(const Matrix& m) {
  return m.colwise() - m.rowwise().mean();
}

}  // namespace ssel
