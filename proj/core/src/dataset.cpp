#include "bindim/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_map>

#include "bindim/error.hpp"
#include "bindim/random.hpp"

namespace bindim {

// --- BinaryDataset -----------------------------------------------------------

BinaryDataset::BinaryDataset(std::size_t n_cols,
                             const std::vector<std::vector<ColumnIndex>>& rows) {
  Builder builder(n_cols);
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  builder.reserve(rows.size(), total);
  for (const auto& r : rows) builder.add_row(r);
  *this = std::move(builder).build();
}

double BinaryDataset::density() const {
  const double cells = static_cast<double>(n_rows()) * static_cast<double>(n_cols_);
  return cells == 0.0 ? 0.0 : static_cast<double>(ones()) / cells;
}

std::vector<std::vector<ColumnIndex>> BinaryDataset::to_rows() const {
  std::vector<std::vector<ColumnIndex>> out;
  out.reserve(n_rows());
  for (std::size_t i = 0; i < n_rows(); ++i) {
    auto r = row(i);
    out.emplace_back(r.begin(), r.end());
  }
  return out;
}

void BinaryDataset::Builder::reserve(std::size_t rows, std::size_t ones) {
  offsets_.reserve(rows + 1);
  indices_.reserve(ones);
}

void BinaryDataset::Builder::add_row(std::span<const ColumnIndex> row) {
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k] >= n_cols_) {
      fail(ErrorCode::invalid_argument, "column index " + std::to_string(row[k]) +
                                            " out of range for " + std::to_string(n_cols_) +
                                            " columns");
    }
    if (k > 0 && row[k] <= row[k - 1]) {
      fail(ErrorCode::invalid_argument, "row indices must be strictly increasing");
    }
  }
  indices_.insert(indices_.end(), row.begin(), row.end());
  offsets_.push_back(indices_.size());
}

BinaryDataset BinaryDataset::Builder::build() && {
  BinaryDataset out;
  out.n_cols_ = n_cols_;
  out.offsets_ = std::move(offsets_);
  out.indices_ = std::move(indices_);
  return out;
}

void MarginProfile::validate() const {
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      fail(ErrorCode::invalid_argument, "profile value " + std::to_string(v) + " outside [0,1]");
    }
  }
}

// --- I/O ---------------------------------------------------------------------

FileFormat parse_file_format(std::string_view name) {
  if (name == "fimi") return FileFormat::fimi;
  if (name == "dense01") return FileFormat::dense01;
  fail(ErrorCode::invalid_argument, "unknown dataset format '" + std::string(name) + "'");
}

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

BinaryDataset load_fimi(std::istream& in, std::size_t min_cols) {
  std::vector<std::vector<ColumnIndex>> rows;
  std::size_t n_cols = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<ColumnIndex> items;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
      if (is_blank(*p)) {
        ++p;
        continue;
      }
      const char* tok = p;
      while (p < end && !is_blank(*p)) ++p;
      ColumnIndex id = 0;
      auto [ptr, ec] = std::from_chars(tok, p, id);
      if (ec != std::errc{} || ptr != p || id == std::numeric_limits<ColumnIndex>::max()) {
        fail(ErrorCode::format, "fimi line " + std::to_string(line_no) + ": bad item '" +
                                    std::string(tok, p) + "'");
      }
      items.push_back(id);
    }
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    if (!items.empty()) n_cols = std::max<std::size_t>(n_cols, items.back() + 1);
    rows.push_back(std::move(items));
  }
  return BinaryDataset(std::max(n_cols, min_cols), rows);
}

BinaryDataset load_dense(std::istream& in, std::size_t min_cols) {
  std::vector<std::vector<ColumnIndex>> rows;
  std::size_t width = 0;
  bool have_width = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<ColumnIndex> ones;
    std::size_t col = 0;
    for (char c : line) {
      if (c == '0' || c == '1') {
        if (c == '1') ones.push_back(static_cast<ColumnIndex>(col));
        ++col;
      } else if (c != ',' && !is_blank(c)) {
        fail(ErrorCode::format, "dense01 line " + std::to_string(line_no) +
                                    ": unexpected character '" + std::string(1, c) + "'");
      }
    }
    if (col == 0) continue;
    if (!have_width) {
      width = col;
      have_width = true;
    } else if (col != width) {
      fail(ErrorCode::format, "dense01 line " + std::to_string(line_no) + " has " +
                                  std::to_string(col) + " entries, expected " +
                                  std::to_string(width));
    }
    rows.push_back(std::move(ones));
  }
  return BinaryDataset(std::max(width, min_cols), rows);
}

}  // namespace

BinaryDataset load_dataset(std::istream& in, FileFormat format, std::size_t min_cols) {
  return format == FileFormat::fimi ? load_fimi(in, min_cols) : load_dense(in, min_cols);
}

BinaryDataset load_dataset(const std::filesystem::path& path, FileFormat format,
                           std::size_t min_cols) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::format, "cannot open '" + path.string() + "'");
  return load_dataset(in, format, min_cols);
}

void save_dataset(std::ostream& out, const BinaryDataset& data, FileFormat format) {
  std::string line;
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    line.clear();
    auto r = data.row(i);
    if (format == FileFormat::fimi) {
      for (std::size_t k = 0; k < r.size(); ++k) {
        if (k) line.push_back(' ');
        line += std::to_string(r[k]);
      }
    } else {
      line.assign(data.n_cols(), '0');
      for (ColumnIndex c : r) line[c] = '1';
    }
    line.push_back('\n');
    out << line;
  }
}

// --- transforms ----------------------------------------------------------------

MarginProfile margins(const BinaryDataset& data) {
  if (data.n_rows() == 0) fail(ErrorCode::undefined_margins, "margins of an empty dataset");
  std::vector<std::size_t> counts(data.n_cols(), 0);
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    for (ColumnIndex c : data.row(i)) ++counts[c];
  }
  MarginProfile out;
  out.kind = ProfileKind::margin;
  out.values.resize(data.n_cols());
  const double n = static_cast<double>(data.n_rows());
  for (std::size_t c = 0; c < counts.size(); ++c) out.values[c] = static_cast<double>(counts[c]) / n;
  return out;
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count,
                                                    std::uint64_t seed) {
  if (count > n) fail(ErrorCode::invalid_argument, "sample larger than population");
  // Lazy Fisher-Yates: only the displaced slots are materialised.
  Rng rng(seed);
  std::unordered_map<std::size_t, std::size_t> moved;
  moved.reserve(count * 2);
  auto at = [&](std::size_t i) {
    auto it = moved.find(i);
    return it == moved.end() ? i : it->second;
  };
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    const std::size_t vi = at(i);
    const std::size_t vj = at(j);
    out.push_back(vj);
    moved[j] = vi;
  }
  return out;
}

BinaryDataset permute_columns(const BinaryDataset& data, std::uint64_t seed) {
  const std::size_t n = data.n_rows();
  std::vector<std::vector<std::size_t>> rows_of_col(data.n_cols());
  for (std::size_t i = 0; i < n; ++i) {
    for (ColumnIndex c : data.row(i)) rows_of_col[c].push_back(i);
  }
  // A uniform shuffle of a column moves its 1s to a uniform random set of rows
  // of the same size; draw that set directly with the column's own stream.
  std::vector<std::vector<ColumnIndex>> rows(n);
  for (std::size_t c = 0; c < data.n_cols(); ++c) {
    const auto targets =
        sample_without_replacement(n, rows_of_col[c].size(), derive_seed(seed, "permute", c));
    for (std::size_t r : targets) rows[r].push_back(static_cast<ColumnIndex>(c));
  }
  return BinaryDataset(data.n_cols(), rows);
}

BinaryDataset copy_columns(const BinaryDataset& data, std::size_t copies) {
  if (copies == 0) fail(ErrorCode::invalid_argument, "copy count must be at least 1");
  BinaryDataset::Builder builder(data.n_cols() * copies);
  builder.reserve(data.n_rows(), data.ones() * copies);
  std::vector<ColumnIndex> buf;
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    buf.clear();
    for (ColumnIndex c : data.row(i)) {
      for (std::size_t k = 0; k < copies; ++k) {
        buf.push_back(static_cast<ColumnIndex>(c * copies + k));
      }
    }
    builder.add_row(buf);
  }
  return std::move(builder).build();
}

BinaryDataset random_subset(const BinaryDataset& data, SubsetMode mode, std::size_t count,
                            std::uint64_t seed) {
  const std::size_t limit = mode == SubsetMode::rows ? data.n_rows() : data.n_cols();
  if (count < 1 || count > limit) {
    fail(ErrorCode::invalid_argument, "subset size " + std::to_string(count) +
                                          " outside [1, " + std::to_string(limit) + "]");
  }
  auto picked = sample_without_replacement(limit, count, seed);
  if (mode == SubsetMode::rows) {
    BinaryDataset::Builder builder(data.n_cols());
    for (std::size_t r : picked) builder.add_row(data.row(r));
    return std::move(builder).build();
  }
  std::sort(picked.begin(), picked.end());
  std::vector<std::int64_t> remap(data.n_cols(), -1);
  for (std::size_t k = 0; k < picked.size(); ++k) remap[picked[k]] = static_cast<std::int64_t>(k);
  BinaryDataset::Builder builder(count);
  std::vector<ColumnIndex> buf;
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    buf.clear();
    for (ColumnIndex c : data.row(i)) {
      if (remap[c] >= 0) buf.push_back(static_cast<ColumnIndex>(remap[c]));
    }
    builder.add_row(buf);
  }
  return std::move(builder).build();
}

// --- generators ------------------------------------------------------------------

BinaryDataset gen_independent(std::size_t n_cols, std::size_t n_rows, const MarginProfile& p,
                              std::uint64_t seed) {
  if (p.size() != n_cols) fail(ErrorCode::invalid_argument, "margin profile length != K");
  p.validate();
  BinaryDataset::Builder builder(n_cols);
  std::vector<ColumnIndex> buf;
  for (std::size_t i = 0; i < n_rows; ++i) {
    Rng rng(seed, "indep-row", i);
    buf.clear();
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (rng.bernoulli(p.values[c])) buf.push_back(static_cast<ColumnIndex>(c));
    }
    builder.add_row(buf);
  }
  return std::move(builder).build();
}

MarginProfile random_profile(std::size_t n_cols, ProfileKind kind, std::uint64_t seed) {
  if (n_cols == 0) fail(ErrorCode::invalid_argument, "profile needs at least one column");
  Rng rng(seed, "profile");
  const double x_max = rng.uniform();
  MarginProfile out;
  out.kind = kind;
  out.values.resize(n_cols);
  for (double& v : out.values) v = rng.uniform() * x_max;
  return out;
}

BinaryDataset gen_markov(std::size_t n_cols, std::size_t n_rows, const MarginProfile& t,
                         std::uint64_t seed) {
  if (t.size() != n_cols) fail(ErrorCode::invalid_argument, "reversal profile length != K");
  t.validate();
  BinaryDataset::Builder builder(n_cols);
  std::vector<ColumnIndex> buf;
  for (std::size_t i = 0; i < n_rows; ++i) {
    Rng rng(seed, "markov-row", i);
    buf.clear();
    bool state = rng.bernoulli(0.5);
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (c > 0 && rng.bernoulli(t.values[c])) state = !state;
      if (state) buf.push_back(static_cast<ColumnIndex>(c));
    }
    builder.add_row(buf);
  }
  return std::move(builder).build();
}

double t_measure(const MarginProfile& t) {
  return std::accumulate(t.values.begin(), t.values.end(), 0.0,
                         [](double acc, double ti) { return acc + 2.0 * ti * (1.0 - ti); });
}

}  // namespace bindim
