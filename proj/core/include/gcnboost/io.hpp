#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gcnboost {

// Write-temp-then-rename so readers never observe a partial file.
void atomic_write_file(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);  // throws DataError

// Minimal CSV handling: fields are quoted only when they contain a comma,
// quote, or newline.
std::string csv_escape(std::string_view field);
std::vector<std::string> csv_split(std::string_view line);

void append_u32(std::string& out, std::uint32_t v);
void append_f32(std::string& out, float v);
std::uint32_t read_u32(std::string_view bytes, std::size_t offset);
float read_f32(std::string_view bytes, std::size_t offset);

// Row-major little-endian f32 matrix with a 16-byte header:
// magic "GBFT", u32 row count, u32 column count, u32 reserved (zero).
void write_feature_matrix(const std::filesystem::path& path, const Eigen::MatrixXf& m);
Eigen::MatrixXf read_feature_matrix(const std::filesystem::path& path);

}  // namespace gcnboost
