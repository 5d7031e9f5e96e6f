#include "sketchls/mtx.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "sketchls/errors.hpp"

namespace sketchls {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '%') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

class Tokens {
 public:
  Tokens(const std::string& line, std::size_t lineno) : in_(line), lineno_(lineno) {}

  std::size_t index(const char* what) {
    std::string tok;
    if (!(in_ >> tok)) throw ParseError(std::string("missing ") + what, lineno_);
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
      throw ParseError(std::string("bad ") + what + " '" + tok + "'", lineno_);
    return v;
  }

  double value() {
    std::string tok;
    if (!(in_ >> tok)) throw ParseError("missing value", lineno_);
    // Some files use Fortran exponents (1.5D+03).
    std::replace_if(tok.begin(), tok.end(), [](char c) { return c == 'd' || c == 'D'; }, 'e');
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) throw ParseError("bad value '" + tok + "'", lineno_);
    if (!std::isfinite(v)) throw ParseError("non-finite value '" + tok + "'", lineno_);
    return v;
  }

  void expect_end() {
    std::string tok;
    if (in_ >> tok) throw ParseError("unexpected trailing token '" + tok + "'", lineno_);
  }

 private:
  std::istringstream in_;
  std::size_t lineno_;
};

Matrix orient(Matrix a) {
  if (rows_of(a) >= cols_of(a)) return a;
  return std::visit([](const auto& m) -> Matrix { return m.transposed(); }, a);
}

}  // namespace

MtxHeader parse_mtx_banner(const std::string& line) {
  std::istringstream in(line);
  std::string banner, object, format, field, symmetry;
  in >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner", 1);
  if (lower(object) != "matrix") throw ParseError("unsupported object '" + object + "'", 1);
  MtxHeader h;
  format = lower(format);
  if (format == "coordinate")
    h.format = MtxHeader::Format::coordinate;
  else if (format == "array")
    h.format = MtxHeader::Format::array;
  else
    throw ParseError("unsupported format '" + format + "'", 1);
  field = lower(field);
  if (field == "real" || field == "double")
    h.field = MtxHeader::Field::real;
  else if (field == "integer")
    h.field = MtxHeader::Field::integer;
  else if (field == "pattern")
    h.field = MtxHeader::Field::pattern;
  else
    throw ParseError("unsupported field '" + field + "'", 1);
  symmetry = lower(symmetry);
  if (symmetry == "general")
    h.symmetry = MtxHeader::Symmetry::general;
  else if (symmetry == "symmetric")
    h.symmetry = MtxHeader::Symmetry::symmetric;
  else
    throw ParseError("unsupported symmetry '" + symmetry + "'", 1);
  if (h.format == MtxHeader::Format::array && h.field == MtxHeader::Field::pattern)
    throw ParseError("array format cannot have pattern field", 1);
  return h;
}

Matrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  ++lineno;
  const MtxHeader h = parse_mtx_banner(line);
  const bool symmetric = h.symmetry == MtxHeader::Symmetry::symmetric;

  // Size line.
  do {
    if (!std::getline(in, line)) throw ParseError("missing size line", lineno + 1);
    ++lineno;
  } while (blank_or_comment(line));
  Tokens size(line, lineno);
  const std::size_t rows = size.index("row count");
  const std::size_t cols = size.index("column count");
  if (symmetric && rows != cols) throw ParseError("symmetric matrix must be square", lineno);

  const auto next_entry_line = [&](std::size_t k, std::size_t total) {
    do {
      if (!std::getline(in, line))
        throw ParseError("expected " + std::to_string(total) + " entries, found " + std::to_string(k), lineno + 1);
      ++lineno;
    } while (blank_or_comment(line));
  };

  if (h.format == MtxHeader::Format::coordinate) {
    const std::size_t nnz = size.index("entry count");
    size.expect_end();
    std::vector<Triplet> entries;
    entries.reserve(symmetric ? 2 * nnz : nnz);
    for (std::size_t k = 0; k < nnz; ++k) {
      next_entry_line(k, nnz);
      Tokens t(line, lineno);
      const std::size_t i = t.index("row index");
      const std::size_t j = t.index("column index");
      if (i < 1 || i > rows || j < 1 || j > cols)
        throw ParseError("index (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range", lineno);
      const double v = h.field == MtxHeader::Field::pattern ? 1.0 : t.value();
      t.expect_end();
      entries.push_back({i - 1, j - 1, v});
      if (symmetric && i != j) entries.push_back({j - 1, i - 1, v});
    }
    return orient(SparseMat::from_triplets(rows, cols, std::move(entries)));
  }

  size.expect_end();
  DenseMat a(rows, cols);
  // Array storage is column-major; symmetric files list the lower triangle.
  const std::size_t total = symmetric ? rows * (rows + 1) / 2 : rows * cols;
  std::size_t k = 0;
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = symmetric ? j : 0; i < rows; ++i, ++k) {
      next_entry_line(k, total);
      Tokens t(line, lineno);
      const double v = t.value();
      t.expect_end();
      a(i, j) = v;
      if (symmetric) a(j, i) = v;
    }
  }
  return orient(std::move(a));
}

Matrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const Matrix& a) {
  char buf[64];
  const auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  };
  if (const auto* d = std::get_if<DenseMat>(&a)) {
    out << "%%MatrixMarket matrix array real general\n" << d->rows() << ' ' << d->cols() << '\n';
    for (double v : d->data()) out << fmt(v) << '\n';
    return;
  }
  const auto& s = std::get<SparseMat>(a);
  out << "%%MatrixMarket matrix coordinate real general\n"
      << s.rows() << ' ' << s.cols() << ' ' << s.nnz() << '\n';
  const auto ptr = s.row_ptr();
  const auto idx = s.col_idx();
  const auto val = s.values();
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t q = ptr[i]; q < ptr[i + 1]; ++q) out << i + 1 << ' ' << idx[q] + 1 << ' ' << fmt(val[q]) << '\n';
}

void write_matrix_market(const std::string& path, const Matrix& a) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  write_matrix_market(out, a);
  if (!out) throw InvalidArgument("write failed for '" + path + "'");
}

}  // namespace sketchls
