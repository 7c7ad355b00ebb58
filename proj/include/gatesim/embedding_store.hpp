#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gatesim/errors.hpp"

namespace gatesim {

inline constexpr std::size_t kEmbeddingDim = 128;
inline constexpr double kDefaultMatchThreshold = 0.7;
inline constexpr std::size_t kDefaultEnrollmentSize = 100;

class EmbeddingVector {
public:
    using Array = std::array<double, kEmbeddingDim>;

    EmbeddingVector() : components_{} {}
    explicit EmbeddingVector(const Array& components) : components_(components) {}

    // Standard basis vector e_axis.
    static EmbeddingVector basis(std::size_t axis);

    double operator[](std::size_t i) const { return components_[i]; }
    double& operator[](std::size_t i) { return components_[i]; }
    const Array& components() const { return components_; }

    double dot(const EmbeddingVector& other) const;
    double norm() const;

    // Throws DomainError("degenerate embedding") on zero or non-finite norm.
    EmbeddingVector normalized() const;

    bool operator==(const EmbeddingVector&) const = default;

private:
    Array components_;
};

EmbeddingVector operator+(const EmbeddingVector& a, const EmbeddingVector& b);
EmbeddingVector operator*(double s, const EmbeddingVector& v);

/// dot(a,b) / (|a| |b|), clamped to [-1, 1].
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

struct MatchResult {
    double similarity = 0.0;
    bool is_owner = false;
    std::optional<std::string> matched_identity;

    bool operator==(const MatchResult&) const = default;
};

/// The enrolled embeddings of a single identity. Immutable once built; every
/// stored vector is unit-norm.
class OwnerDatabase {
public:
    static constexpr std::uint32_t kFormatVersion = 1;

    OwnerDatabase(std::string identity, std::vector<EmbeddingVector> unit_embeddings,
                  std::int64_t created_at = 0, std::uint32_t format_version = kFormatVersion);

    const std::string& identity() const { return identity_; }
    std::span<const EmbeddingVector> embeddings() const { return embeddings_; }
    std::size_t size() const { return embeddings_.size(); }
    // Unix seconds; in-memory metadata only, EMBDB1 has no slot for it.
    std::int64_t created_at() const { return created_at_; }
    std::uint32_t format_version() const { return format_version_; }

    // Persisted state only: identity, version and embeddings.
    bool operator==(const OwnerDatabase& other) const;

private:
    std::string identity_;
    std::vector<EmbeddingVector> embeddings_;
    std::int64_t created_at_;
    std::uint32_t format_version_;
};

// Normalizes every input. Throws ValidationError on an empty list and
// DomainError on a degenerate vector.
OwnerDatabase enroll(std::string identity, std::span<const EmbeddingVector> embeddings,
                     std::int64_t created_at = 0);

// Max cosine similarity over the enrolled vectors; owner iff similarity >= threshold.
MatchResult match(const OwnerDatabase& db, const EmbeddingVector& probe,
                  double threshold = kDefaultMatchThreshold);

enum class DatabaseErrorCode {
    Io,
    BadMagic,
    UnsupportedVersion,
    Truncated,
    Corrupt,
};

class DatabaseError : public Error {
public:
    DatabaseError(DatabaseErrorCode code, const std::string& message)
        : Error(message), code_(code) {}
    DatabaseErrorCode code() const { return code_; }

private:
    DatabaseErrorCode code_;
};

// EMBDB1 layout, all integers and reals little-endian:
//   "EMBDB1\n" | u32 version | u32 identity length | identity bytes (UTF-8)
//   | u32 count | count x 128 x f64
std::vector<std::uint8_t> encode_database(const OwnerDatabase& db);
OwnerDatabase decode_database(std::span<const std::uint8_t> bytes);

void save_database(const OwnerDatabase& db, const std::filesystem::path& path);
OwnerDatabase load_database(const std::filesystem::path& path);

}  // namespace gatesim
