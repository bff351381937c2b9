#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sideinfo/causality.hpp"
#include "sideinfo/loss.hpp"
#include "sideinfo/prob.hpp"
#include "sideinfo/sufficiency.hpp"
#include "sideinfo/var.hpp"

namespace sideinfo::io {

inline constexpr int kSchemaVersion = 1;

/// A loss as written on disk: either a named built-in or an explicit matrix
/// (rows are outcomes, columns actions), optionally scaled.
struct LossDoc {
  std::optional<std::string> builtin;
  std::size_t outcomes = 0;
  std::size_t actions = 0;
  std::vector<double> matrix;  // row-major, may hold +inf
  double scale = 1.0;

  /// Built-ins need the outcome alphabet size.
  LossSpec to_loss(std::size_t n) const;

  friend bool operator==(const LossDoc&, const LossDoc&) = default;
};

/// Nonnegative combination of named convex oracles.
struct ConvexGDoc {
  std::vector<std::pair<std::string, double>> terms;

  ConvexOracle to_oracle() const;

  friend bool operator==(const ConvexGDoc&, const ConvexGDoc&) = default;
};

using Model = std::variant<Dist, Joint, Joint3, LossDoc, Transform, ProcessModel, VarModel, ConvexGDoc>;

struct ModelFile {
  int version = kSchemaVersion;
  Model model;

  friend bool operator==(const ModelFile&, const ModelFile&) = default;
};

/// dist, joint, joint3, loss, transform, markov_process, var_model, convex_g
std::string kind_name(const Model& m);

/// Throws SchemaError for malformed documents and ValidationError (with the
/// offending field path) when the content fails validation.
ModelFile parse_model(std::string_view text);
ModelFile read_model(const std::filesystem::path& path);

/// Probabilities and coefficients are written as shortest round-trip decimal
/// strings, so parse_model(serialize_model(m)) == m.
std::string serialize_model(const ModelFile& m);
void write_model(const std::filesystem::path& path, const ModelFile& m);

/// Parses "0.25", "1e-3", "1/3" or "inf".
double parse_decimal(std::string_view s);
std::string format_decimal(double v);

struct EmpiricalJoint {
  Joint joint;
  std::size_t sample_size = 0;
};

/// Plug-in estimate from 1-based (x, y) symbol pairs. Throws EmptySample and
/// UnknownSymbol.
EmpiricalJoint empirical_joint(std::span<const std::pair<std::size_t, std::size_t>> samples, std::size_t nx,
                               std::size_t ny);

/// CSV with header "x,y" and one 1-based pair per line.
std::vector<std::pair<std::size_t, std::size_t>> read_samples_csv(const std::filesystem::path& path);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

}  // namespace sideinfo::io
