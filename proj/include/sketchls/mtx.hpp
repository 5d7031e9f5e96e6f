#pragma once

#include <iosfwd>
#include <string>

#include "sketchls/matrix.hpp"

namespace sketchls {

struct MtxHeader {
  enum class Format { coordinate, array };
  enum class Field { real, integer, pattern };
  enum class Symmetry { general, symmetric };

  Format format = Format::coordinate;
  Field field = Field::real;
  Symmetry symmetry = Symmetry::general;
};

/// Parses the "%%MatrixMarket matrix ..." banner. Throws ParseError.
MtxHeader parse_mtx_banner(const std::string& line);

/// Coordinate files give a SparseMat (duplicates summed), array files a
/// DenseMat. Pattern entries read as 1, symmetric matrices are expanded, and
/// a matrix with fewer rows than columns is transposed. Throws ParseError
/// carrying the offending line number.
Matrix read_matrix_market(std::istream& in);
Matrix read_matrix_market(const std::string& path);

/// Real general matrices, values with 17 significant digits: DenseMat as
/// array, SparseMat as coordinate.
void write_matrix_market(std::ostream& out, const Matrix& a);
void write_matrix_market(const std::string& path, const Matrix& a);

}  // namespace sketchls
