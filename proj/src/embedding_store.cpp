#include "gatesim/embedding_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string_view>

namespace gatesim {

namespace {

constexpr std::string_view kMagic = "EMBDB1\n";
constexpr double kUnitNormTolerance = 1e-9;
constexpr double kFixedPointTolerance = 1e-12;

bool is_unit(const EmbeddingVector& v) {
    return std::abs(v.norm() - 1.0) <= kUnitNormTolerance;
}

class ByteWriter {
public:
    void raw(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double d) {
        const auto bits = std::bit_cast<std::uint64_t>(d);
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t remaining() const { return bytes_.size() - pos_; }

    std::span<const std::uint8_t> take(std::size_t n, const char* what) {
        if (remaining() < n) {
            throw DatabaseError(DatabaseErrorCode::Truncated,
                                std::string("truncated embedding database (") + what + ")");
        }
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::uint32_t u32(const char* what) {
        auto s = take(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(s[i]) << (8 * i);
        return v;
    }
    double f64(const char* what) {
        auto s = take(8, what);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(s[i]) << (8 * i);
        return std::bit_cast<double>(bits);
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

EmbeddingVector EmbeddingVector::basis(std::size_t axis) {
    EmbeddingVector v;
    v.components_.at(axis) = 1.0;
    return v;
}

double EmbeddingVector::dot(const EmbeddingVector& other) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < kEmbeddingDim; ++i) acc += components_[i] * other.components_[i];
    return acc;
}

double EmbeddingVector::norm() const { return std::sqrt(dot(*this)); }

EmbeddingVector EmbeddingVector::normalized() const {
    const double n = norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("degenerate embedding");
    EmbeddingVector out;
    for (std::size_t i = 0; i < kEmbeddingDim; ++i) out.components_[i] = components_[i] / n;
    return out;
}

EmbeddingVector operator+(const EmbeddingVector& a, const EmbeddingVector& b) {
    EmbeddingVector out;
    for (std::size_t i = 0; i < kEmbeddingDim; ++i) out[i] = a[i] + b[i];
    return out;
}

EmbeddingVector operator*(double s, const EmbeddingVector& v) {
    EmbeddingVector out;
    for (std::size_t i = 0; i < kEmbeddingDim; ++i) out[i] = s * v[i];
    return out;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0) || !std::isfinite(na) || !std::isfinite(nb)) {
        throw DomainError("degenerate embedding");
    }
    return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

OwnerDatabase::OwnerDatabase(std::string identity, std::vector<EmbeddingVector> unit_embeddings,
                             std::int64_t created_at, std::uint32_t format_version)
    : identity_(std::move(identity)),
      embeddings_(std::move(unit_embeddings)),
      created_at_(created_at),
      format_version_(format_version) {
    if (embeddings_.empty()) {
        throw ValidationError("enrollment requires at least one embedding");
    }
    if (!std::all_of(embeddings_.begin(), embeddings_.end(), is_unit)) {
        throw ValidationError("owner database embeddings must be unit-norm");
    }
}

bool OwnerDatabase::operator==(const OwnerDatabase& other) const {
    return identity_ == other.identity_ && format_version_ == other.format_version_ &&
           embeddings_ == other.embeddings_;
}

OwnerDatabase enroll(std::string identity, std::span<const EmbeddingVector> embeddings,
                     std::int64_t created_at) {
    if (embeddings.empty()) {
        throw ValidationError("enrollment requires at least one embedding");
    }
    std::vector<EmbeddingVector> unit;
    unit.reserve(embeddings.size());
    for (const auto& e : embeddings) {
        // Already-unit inputs are stored verbatim so enrollment is a fixed point.
        const bool unit_already = std::abs(e.norm() - 1.0) <= kFixedPointTolerance;
        unit.push_back(unit_already ? e : e.normalized());
    }
    return OwnerDatabase(std::move(identity), std::move(unit), created_at);
}

MatchResult match(const OwnerDatabase& db, const EmbeddingVector& probe, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ValidationError("match threshold must lie in [0,1]");
    }
    const EmbeddingVector unit_probe = probe.normalized();
    double best = -1.0;
    for (const auto& stored : db.embeddings()) {
        best = std::max(best, unit_probe.dot(stored));
    }
    MatchResult result;
    result.similarity = std::clamp(best, -1.0, 1.0);
    result.is_owner = result.similarity >= threshold;
    if (result.is_owner) result.matched_identity = db.identity();
    return result;
}

std::vector<std::uint8_t> encode_database(const OwnerDatabase& db) {
    ByteWriter w;
    w.raw(kMagic);
    w.u32(db.format_version());
    w.u32(static_cast<std::uint32_t>(db.identity().size()));
    w.raw(db.identity());
    w.u32(static_cast<std::uint32_t>(db.size()));
    for (const auto& e : db.embeddings()) {
        for (double c : e.components()) w.f64(c);
    }
    return w.take();
}

OwnerDatabase decode_database(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    if (r.remaining() < kMagic.size() ||
        !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
        throw DatabaseError(DatabaseErrorCode::BadMagic, "not an embedding database");
    }
    r.take(kMagic.size(), "magic");

    const std::uint32_t version = r.u32("version");
    if (version != OwnerDatabase::kFormatVersion) {
        throw DatabaseError(DatabaseErrorCode::UnsupportedVersion,
                            "unsupported format version " + std::to_string(version));
    }

    const std::uint32_t id_len = r.u32("identity length");
    auto id_bytes = r.take(id_len, "identity");
    std::string identity(id_bytes.begin(), id_bytes.end());

    const std::uint32_t count = r.u32("count");
    if (count == 0) {
        throw DatabaseError(DatabaseErrorCode::Corrupt, "embedding database has no entries");
    }
    if (r.remaining() / (8 * kEmbeddingDim) < count) {
        throw DatabaseError(DatabaseErrorCode::Truncated,
                            "truncated embedding database (embeddings)");
    }
    std::vector<EmbeddingVector> embeddings(count);
    for (auto& e : embeddings) {
        for (std::size_t i = 0; i < kEmbeddingDim; ++i) e[i] = r.f64("embeddings");
        if (!is_unit(e)) {
            throw DatabaseError(DatabaseErrorCode::Corrupt,
                                "embedding database holds a non-unit vector");
        }
    }
    if (r.remaining() != 0) {
        throw DatabaseError(DatabaseErrorCode::Corrupt,
                            "trailing bytes after embedding database");
    }
    return OwnerDatabase(std::move(identity), std::move(embeddings), 0, version);
}

void save_database(const OwnerDatabase& db, const std::filesystem::path& path) {
    const auto bytes = encode_database(db);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DatabaseError(DatabaseErrorCode::Io, "cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DatabaseError(DatabaseErrorCode::Io, "write failed: " + path.string());
}

OwnerDatabase load_database(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatabaseError(DatabaseErrorCode::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_database(bytes);
}

}  // namespace gatesim
