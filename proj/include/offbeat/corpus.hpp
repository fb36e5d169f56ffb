#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace offbeat {

using UserId = std::string;
using TrackId = std::uint64_t;

// Track identity is the case-folded (artist, track) pair hashed to a stable
// 64-bit id; the album is deliberately not part of the identity so play
// counts aggregate across releases.
TrackId make_track_id(std::string_view artist, std::string_view track);

struct ListeningEvent {
    UserId user_id;
    std::string artist;
    std::string album;
    std::string track;
    std::int64_t timestamp = 0;
    TrackId track_id = 0;

    bool operator==(const ListeningEvent&) const = default;
};

// The eight per-track audio descriptors. All but tempo are probabilities.
struct AcousticFeatures {
    double danceability = 0;
    double energy = 0;
    double speechiness = 0;
    double acousticness = 0;
    double instrumentalness = 0;
    double tempo = 0;  // beats per minute
    double valence = 0;
    double liveness = 0;

    static constexpr int kCount = 8;
    static const std::array<std::string_view, kCount>& names();

    std::array<double, kCount> values() const {
        return {danceability,     energy, speechiness, acousticness,
                instrumentalness, tempo,  valence,     liveness};
    }

    // A track either carries a full, in-range feature record or is dropped.
    bool valid() const;

    bool operator==(const AcousticFeatures&) const = default;
};

struct TrackRecord {
    TrackId id = 0;
    std::string artist;
    std::string title;
    AcousticFeatures features;
    std::vector<std::string> raw_tags;  // as ingested; genre matching happens downstream

    bool operator==(const TrackRecord&) const = default;
};

struct Corpus {
    std::vector<ListeningEvent> events;
    std::unordered_map<TrackId, TrackRecord> tracks;
    std::set<UserId> users;
    std::unordered_map<UserId, std::unordered_map<TrackId, std::uint32_t>> play_counts;

    std::size_t total_events() const { return events.size(); }
    bool operator==(const Corpus&) const = default;
};

struct LoadReport {
    std::size_t events_loaded = 0;
    std::size_t events_dropped_unfeatured = 0;  // track missing a full feature record
    std::size_t tracks_rejected_invalid = 0;    // feature out of range
    std::size_t feature_conflicts = 0;          // duplicate (artist, track) rows; first wins
    std::size_t tags_attached = 0;
};

struct LoadResult {
    Corpus corpus;
    LoadReport report;
};

// Reads the TSV inputs (events without header; features with header; tags
// one per line). Malformed lines raise ParseError with the line number.
LoadResult load_corpus(const std::string& events_path, const std::string& features_path,
                       const std::string& tags_path);

struct CorpusStats {
    std::size_t users = 0;
    std::size_t tracks = 0;
    std::size_t artists = 0;
    std::size_t listening_events = 0;
    double min_les_per_user = 0;
    double q1_les_per_user = 0;
    double median_les_per_user = 0;
    double q3_les_per_user = 0;
    double max_les_per_user = 0;
    double mean_les_per_user = 0;
    double stddev_les_per_user = 0;
};

CorpusStats corpus_stats(const Corpus& corpus);

// Desk-scale test substrate: planted feature clusters plus a popularity-driven
// mainstream listener group.
struct SyntheticSpec {
    std::uint64_t seed = 0;
    std::size_t n_users = 100;
    std::size_t n_tracks_per_cluster = 100;
    std::vector<AcousticFeatures> cluster_feature_centers;
    double mainstream_fraction = 0.5;

    std::size_t n_clusters() const { return cluster_feature_centers.size(); }
};

struct SyntheticCorpus {
    Corpus corpus;
    // Ground truth for oracle checks.
    std::unordered_map<TrackId, int> planted_track_cluster;
    std::unordered_map<UserId, int> planted_home_cluster;  // -1 for mainstream users
    std::set<std::string> taxonomy;                        // all synthetic genre identifiers
};

SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec);

// Well-separated default centers for a k-cluster planted corpus.
std::vector<AcousticFeatures> default_cluster_centers(std::size_t k);

// Writes a corpus back out in the ingestion formats (events.tsv,
// features.tsv, tags.tsv and taxonomy.txt in `dir`).
void write_corpus_files(const SyntheticCorpus& synth, const std::string& dir);

}  // namespace offbeat
