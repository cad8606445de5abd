#pragma once

// FMATX1 feature-matrix and FSTAT1 statistics files: a magic line, a one-line
// JSON header, then little-endian float64 payload.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

#include "attrdesc/fid.hpp"

namespace attrdesc {

inline constexpr std::string_view kFeatureMagic = "FMATX1\n";
inline constexpr std::string_view kStatsMagic = "FSTAT1\n";

std::string encode_features(const FeatureMatrix& features);
FeatureMatrix decode_features(const std::string& bytes);
std::string encode_stats(const FeatureStats& stats);
FeatureStats decode_stats(const std::string& bytes);

void write_features(const FeatureMatrix& features, const std::filesystem::path& path);
FeatureMatrix read_features(const std::filesystem::path& path);
void write_stats(const FeatureStats& stats, const std::filesystem::path& path);
FeatureStats read_stats(const std::filesystem::path& path);

/// Reads either format; feature matrices are accumulated into statistics.
FeatureStats read_stats_or_features(const std::filesystem::path& path);

/// Raw bytes of a file; throws ConfigError when it cannot be opened.
std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::string& bytes);

}  // namespace attrdesc
