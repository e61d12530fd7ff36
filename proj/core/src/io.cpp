#include "gcnboost/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "gcnboost/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "file formats assume a little-endian host");

namespace gcnboost {

void atomic_write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> csv_split(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

void append_u32(std::string& out, std::uint32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

void append_f32(std::string& out, float v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

std::uint32_t read_u32(std::string_view bytes, std::size_t offset) {
  if (offset + 4 > bytes.size()) throw DataError("truncated binary file");
  std::uint32_t v;
  std::memcpy(&v, bytes.data() + offset, 4);
  return v;
}

float read_f32(std::string_view bytes, std::size_t offset) {
  if (offset + 4 > bytes.size()) throw DataError("truncated binary file");
  float v;
  std::memcpy(&v, bytes.data() + offset, 4);
  return v;
}

void write_feature_matrix(const std::filesystem::path& path, const Eigen::MatrixXf& m) {
  std::string bytes;
  bytes.reserve(16 + static_cast<std::size_t>(m.size()) * 4);
  bytes += "GBFT";
  append_u32(bytes, static_cast<std::uint32_t>(m.rows()));
  append_u32(bytes, static_cast<std::uint32_t>(m.cols()));
  append_u32(bytes, 0);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) append_f32(bytes, m(r, c));
  }
  atomic_write_file(path, bytes);
}

Eigen::MatrixXf read_feature_matrix(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 16 || bytes.compare(0, 4, "GBFT") != 0) {
    throw DataError("'" + path.string() + "' is not a feature matrix file");
  }
  const std::uint32_t rows = read_u32(bytes, 4);
  const std::uint32_t cols = read_u32(bytes, 8);
  const std::size_t expected = 16 + static_cast<std::size_t>(rows) * cols * 4;
  if (bytes.size() != expected) {
    throw DataError("'" + path.string() + "' has unexpected size");
  }
  Eigen::MatrixXf m(rows, cols);
  std::size_t offset = 16;
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) {
      m(r, c) = read_f32(bytes, offset);
      offset += 4;
    }
  }
  return m;
}

}  // namespace gcnboost
