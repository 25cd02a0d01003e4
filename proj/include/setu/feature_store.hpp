// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 SETU Contributors

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "setu/detail/io.hpp"
#include "setu/error.hpp"
#include "setu/image_features.hpp"
#include "setu/ranker.hpp"
#include "setu/text_features.hpp"

namespace setu {

inline constexpr char kStoreMagic[8] = {'S', 'E', 'T', 'U', 'F', 'E', 'A', 'T'};
inline constexpr int kStoreFormatVersion = 1;

/// Features of one project plus the TF-IDF model they were built with.
struct StoredProject {
    ProjectFeatures features;
    TfIdfModel tfidf;
};

struct FeatureStore {
    std::size_t embedding_dim = kDefaultEmbeddingDim;
    std::vector<StoredProject> projects;

    [[nodiscard]] const StoredProject* find(const std::string& project_id) const {
        for (const auto& p : projects) {
            if (p.features.project_id == project_id) {
                return &p;
            }
        }
        return nullptr;
    }

    /// Project holding `report_id`, or nullptr.
    [[nodiscard]] const StoredProject* find_report(const std::string& report_id) const {
        for (const auto& p : projects) {
            if (p.features.index_of(report_id)) {
                return &p;
            }
        }
        return nullptr;
    }
};

/// Expectations a caller places on a store before using it.
struct StoreRequirements {
    std::optional<std::size_t> embedding_dim;
};

namespace detail {

class ByteWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) { little_endian(v); }
    void f64(double v) { little_endian(std::bit_cast<std::uint64_t>(v)); }
    void bytes(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        out_.insert(out_.end(), s.begin(), s.end());
    }
    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        out_.insert(out_.end(), b, b + n);
    }
    [[nodiscard]] std::vector<std::uint8_t>& data() noexcept { return out_; }

private:
    template <typename T>
    void little_endian(T v) {
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    std::vector<std::uint8_t> out_;
};

class ByteReader {
public:
    ByteReader(const std::vector<std::uint8_t>& data, std::string source) : data_(data), source_(std::move(source)) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(little_endian<std::uint8_t>()); }
    std::uint32_t u32() { return little_endian<std::uint32_t>(); }
    double f64() { return std::bit_cast<double>(little_endian<std::uint64_t>()); }
    std::string bytes() {
        const std::uint32_t n = u32();
        need(n);
        std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    void raw(void* p, std::size_t n) {
        need(n);
        std::memcpy(p, data_.data() + pos_, n);
        pos_ += n;
    }
    [[nodiscard]] bool at_end() const noexcept { return pos_ == data_.size(); }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) {
            throw FormatError(source_ + ": truncated feature store");
        }
    }
    template <typename T>
    T little_endian() {
        need(sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            v |= static_cast<T>(static_cast<T>(data_[pos_ + i]) << (8 * i));
        }
        pos_ += sizeof(T);
        return v;
    }
    const std::vector<std::uint8_t>& data_;
    std::string source_;
    std::size_t pos_ = 0;
};

}  // namespace detail

[[nodiscard]] inline std::vector<std::uint8_t> serialize_store(const FeatureStore& store) {
    nlohmann::ordered_json header;
    header["format_version"] = kStoreFormatVersion;
    header["descriptor_version"] = kDescriptorVersion;
    header["text_model_version"] = kTextModelVersion;
    header["structure_dim"] = kStructureDim;
    header["color_dim"] = kColorDim;
    header["embedding_dim"] = store.embedding_dim;
    header["projects"] = nlohmann::ordered_json::array();
    for (const auto& p : store.projects) {
        header["projects"].push_back({{"project_id", p.features.project_id},
                                      {"n_reports", p.features.size()},
                                      {"n_documents", p.tfidf.n_documents},
                                      {"terms", p.tfidf.terms},
                                      {"idf", p.tfidf.idf}});
    }
    const std::string header_text = header.dump();

    detail::ByteWriter w;
    w.raw(kStoreMagic, sizeof(kStoreMagic));
    w.bytes(header_text);
    for (const auto& p : store.projects) {
        for (std::size_t i = 0; i < p.features.size(); ++i) {
            const FeatureBundle& b = p.features.bundles[i];
            if (b.embedding.size() != store.embedding_dim) {
                throw ConfigError("report " + p.features.report_ids[i] + " has embedding dimension " +
                                  std::to_string(b.embedding.size()) + ", store expects " +
                                  std::to_string(store.embedding_dim));
            }
            w.bytes(p.features.report_ids[i]);
            w.u8(b.has_screenshot ? 1 : 0);
            for (double v : b.structure.values) w.f64(v);
            for (double v : b.color.values) w.f64(v);
            w.u32(static_cast<std::uint32_t>(b.tfidf.entries.size()));
            for (const auto& e : b.tfidf.entries) {
                w.u32(e.index);
                w.f64(e.weight);
            }
            for (double v : b.embedding) w.f64(v);
        }
    }
    return std::move(w.data());
}

[[nodiscard]] inline FeatureStore deserialize_store(const std::vector<std::uint8_t>& bytes,
                                                    const StoreRequirements& req = {},
                                                    const std::string& source = "<store>") {
    detail::ByteReader r(bytes, source);
    char magic[sizeof(kStoreMagic)];
    r.raw(magic, sizeof(magic));
    if (std::memcmp(magic, kStoreMagic, sizeof(magic)) != 0) {
        throw FormatError(source + ": not a feature store");
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(r.bytes());
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(source + ": corrupt header: " + e.what());
    }

    const auto expect = [&](const char* key, const nlohmann::json& want) {
        if (!header.contains(key) || header[key] != want) {
            throw VersionError(source + ": " + key + " is " + (header.contains(key) ? header[key].dump() : "missing") +
                               ", this build expects " + want.dump());
        }
    };
    expect("format_version", kStoreFormatVersion);
    expect("descriptor_version", kDescriptorVersion);
    expect("text_model_version", kTextModelVersion);
    expect("structure_dim", kStructureDim);
    expect("color_dim", kColorDim);
    if (req.embedding_dim) {
        expect("embedding_dim", *req.embedding_dim);
    }

    FeatureStore store;
    try {
        store.embedding_dim = header.at("embedding_dim").get<std::size_t>();
        for (const auto& jp : header.at("projects")) {
            StoredProject p;
            p.features.project_id = jp.at("project_id").get<std::string>();
            p.tfidf = TfIdfModel::from_columns(jp.at("terms").get<std::vector<std::string>>(),
                                               jp.at("idf").get<std::vector<double>>(),
                                               jp.at("n_documents").get<std::size_t>());
            p.features.report_ids.resize(jp.at("n_reports").get<std::size_t>());
            store.projects.push_back(std::move(p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(source + ": malformed header: " + e.what());
    }

    for (auto& p : store.projects) {
        const std::size_t n = p.features.report_ids.size();
        p.features.bundles.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            p.features.report_ids[i] = r.bytes();
            FeatureBundle& b = p.features.bundles[i];
            b.has_screenshot = r.u8() != 0;
            for (double& v : b.structure.values) v = r.f64();
            for (double& v : b.color.values) v = r.f64();
            const std::uint32_t nnz = r.u32();
            b.tfidf.entries.resize(nnz);
            for (auto& e : b.tfidf.entries) {
                e.index = r.u32();
                e.weight = r.f64();
                if (e.index >= p.tfidf.size()) {
                    throw FormatError(source + ": tf-idf column out of range in report " + p.features.report_ids[i]);
                }
            }
            b.embedding.resize(store.embedding_dim);
            for (double& v : b.embedding) v = r.f64();
        }
    }
    if (!r.at_end()) {
        throw FormatError(source + ": trailing bytes after the last record");
    }
    return store;
}

inline void save_feature_store(const FeatureStore& store, const std::filesystem::path& path) {
    const auto bytes = serialize_store(store);
    detail::write_binary_file(path, bytes.data(), bytes.size());
}

[[nodiscard]] inline FeatureStore load_feature_store(const std::filesystem::path& path,
                                                     const StoreRequirements& req = {}) {
    return deserialize_store(detail::read_binary_file(path), req, path.string());
}

}  // namespace setu
