#include "offbeat/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "offbeat/random.hpp"
#include "offbeat/stats.hpp"
#include "offbeat/tsv.hpp"

namespace offbeat {

namespace {

std::string casefold_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, std::string_view s) {
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= kFnvPrime;
    }
}

bool in_unit_interval(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

TrackId make_track_id(std::string_view artist, std::string_view track) {
    std::uint64_t h = kFnvOffset;
    fnv_mix(h, casefold_ascii(artist));
    h ^= 0x1f;  // field separator
    h *= kFnvPrime;
    fnv_mix(h, casefold_ascii(track));
    return h;
}

const std::array<std::string_view, AcousticFeatures::kCount>& AcousticFeatures::names() {
    static const std::array<std::string_view, kCount> kNames = {
        "danceability", "energy", "speechiness",      "acousticness",
        "instrumentalness", "tempo", "valence",       "liveness"};
    return kNames;
}

bool AcousticFeatures::valid() const {
    return in_unit_interval(danceability) && in_unit_interval(energy) &&
           in_unit_interval(speechiness) && in_unit_interval(acousticness) &&
           in_unit_interval(instrumentalness) && in_unit_interval(valence) &&
           in_unit_interval(liveness) && std::isfinite(tempo) && tempo >= 0.0;
}

LoadResult load_corpus(const std::string& events_path, const std::string& features_path,
                       const std::string& tags_path) {
    LoadResult result;
    Corpus& corpus = result.corpus;
    LoadReport& report = result.report;

    // features.tsv: artist, track, then the eight feature columns.
    bool saw_header = false;
    for_each_tsv_line(features_path, /*skip_header=*/false,
                      [&](std::size_t line_no, const std::vector<std::string_view>& f) {
        if (f.size() != 10)
            throw ParseError(features_path, line_no, "expected 10 tab-separated fields");
        if (line_no == 1) {
            // Header row is mandatory; a numeric third column means data.
            double probe;
            auto [p, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), probe);
            if (ec == std::errc{} && p == f[2].data() + f[2].size())
                throw ParseError(features_path, 1, "missing header row");
            saw_header = true;
            return;
        }
        AcousticFeatures feat;
        feat.danceability = parse_double(f[2], features_path, line_no);
        feat.energy = parse_double(f[3], features_path, line_no);
        feat.speechiness = parse_double(f[4], features_path, line_no);
        feat.acousticness = parse_double(f[5], features_path, line_no);
        feat.instrumentalness = parse_double(f[6], features_path, line_no);
        feat.tempo = parse_double(f[7], features_path, line_no);
        feat.valence = parse_double(f[8], features_path, line_no);
        feat.liveness = parse_double(f[9], features_path, line_no);
        if (!feat.valid()) {
            ++report.tracks_rejected_invalid;
            return;
        }
        TrackId id = make_track_id(f[0], f[1]);
        auto [it, inserted] = corpus.tracks.try_emplace(id);
        if (!inserted) {
            ++report.feature_conflicts;  // first occurrence wins
            return;
        }
        it->second.id = id;
        it->second.artist = std::string(f[0]);
        it->second.title = std::string(f[1]);
        it->second.features = feat;
    });
    if (!saw_header) throw std::runtime_error(features_path + ": empty features file");

    // events.tsv: user, artist, album, track, timestamp. No header.
    for_each_tsv_line(events_path, /*skip_header=*/false,
                      [&](std::size_t line_no, const std::vector<std::string_view>& f) {
        if (f.size() != 5)
            throw ParseError(events_path, line_no, "expected 5 tab-separated fields");
        if (f[0].empty() || f[1].empty() || f[3].empty())
            throw ParseError(events_path, line_no, "user, artist and track must be non-empty");
        long long ts = parse_int(f[4], events_path, line_no);
        if (ts < 0) throw ParseError(events_path, line_no, "negative timestamp");
        TrackId id = make_track_id(f[1], f[3]);
        if (!corpus.tracks.count(id)) {
            ++report.events_dropped_unfeatured;
            return;
        }
        ListeningEvent ev;
        ev.user_id = std::string(f[0]);
        ev.artist = std::string(f[1]);
        ev.album = std::string(f[2]);
        ev.track = std::string(f[3]);
        ev.timestamp = ts;
        ev.track_id = id;
        corpus.play_counts[ev.user_id][id] += 1;
        corpus.users.insert(ev.user_id);
        corpus.events.push_back(std::move(ev));
        ++report.events_loaded;
    });

    // tags.tsv: artist, track, tag. Tags on unfeatured tracks are ignored.
    for_each_tsv_line(tags_path, /*skip_header=*/false,
                      [&](std::size_t line_no, const std::vector<std::string_view>& f) {
        if (f.size() != 3)
            throw ParseError(tags_path, line_no, "expected 3 tab-separated fields");
        auto it = corpus.tracks.find(make_track_id(f[0], f[1]));
        if (it == corpus.tracks.end()) return;
        it->second.raw_tags.emplace_back(f[2]);
        ++report.tags_attached;
    });

    return result;
}

CorpusStats corpus_stats(const Corpus& corpus) {
    if (corpus.events.empty()) throw std::invalid_argument("corpus_stats: empty corpus");

    CorpusStats s;
    s.users = corpus.users.size();
    s.tracks = corpus.tracks.size();
    s.listening_events = corpus.events.size();

    std::set<std::string> artists;
    for (const auto& [id, rec] : corpus.tracks) artists.insert(casefold_ascii(rec.artist));
    s.artists = artists.size();

    std::vector<double> per_user;
    per_user.reserve(corpus.users.size());
    for (const auto& user : corpus.users) {
        std::size_t n = 0;
        auto it = corpus.play_counts.find(user);
        if (it != corpus.play_counts.end())
            for (const auto& [track, count] : it->second) n += count;
        per_user.push_back(static_cast<double>(n));
    }

    s.min_les_per_user = stats::percentile(per_user, 0.0);
    s.q1_les_per_user = stats::percentile(per_user, 25.0);
    s.median_les_per_user = stats::percentile(per_user, 50.0);
    s.q3_les_per_user = stats::percentile(per_user, 75.0);
    s.max_les_per_user = stats::percentile(per_user, 100.0);
    s.mean_les_per_user = stats::mean(per_user);
    s.stddev_les_per_user = per_user.size() > 1 ? stats::sample_stddev(per_user) : 0.0;
    return s;
}

namespace {

double clip01(double v) { return std::min(1.0, std::max(0.0, v)); }

std::uint32_t poisson(Rng& rng, double lambda) {
    // Knuth's method; lambda stays small here.
    lambda = std::min(lambda, 60.0);
    double l = std::exp(-lambda);
    double p = 1.0;
    std::uint32_t k = 0;
    do {
        ++k;
        p *= rng.uniform01();
    } while (p > l);
    return k - 1;
}

}  // namespace

std::vector<AcousticFeatures> default_cluster_centers(std::size_t k) {
    // Corners of the acoustic cube, loosely echoing folk / hard / ambient /
    // electronic archetypes, then danceability/valence variations.
    std::vector<AcousticFeatures> centers;
    for (std::size_t i = 0; i < k; ++i) {
        AcousticFeatures c;
        bool high_energy = (i % 2) == 1;
        bool instrumental = (i % 4) >= 2;
        bool upbeat = (i % 8) >= 4;
        c.energy = high_energy ? 0.85 : 0.2;
        c.acousticness = high_energy ? 0.12 : 0.82;
        c.instrumentalness = instrumental ? 0.85 : 0.1;
        c.danceability = upbeat ? 0.75 : 0.35;
        c.valence = upbeat ? 0.7 : 0.3;
        c.speechiness = 0.08 + 0.05 * static_cast<double>(i % 3);
        c.liveness = 0.15 + 0.04 * static_cast<double>(i % 4);
        c.tempo = 90.0 + 18.0 * static_cast<double>(i % 5);
        centers.push_back(c);
    }
    return centers;
}

SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec) {
    if (spec.mainstream_fraction < 0.0 || spec.mainstream_fraction > 1.0)
        throw std::invalid_argument("generate_synthetic_corpus: mainstream_fraction outside [0,1]");
    if (spec.n_clusters() == 0)
        throw std::invalid_argument("generate_synthetic_corpus: need at least one cluster center");
    for (const auto& c : spec.cluster_feature_centers)
        if (!c.valid())
            throw std::invalid_argument("generate_synthetic_corpus: invalid cluster center");
    if (spec.n_users == 0 || spec.n_tracks_per_cluster == 0)
        throw std::invalid_argument("generate_synthetic_corpus: empty user or track count");

    Rng rng(spec.seed);
    SyntheticCorpus out;
    Corpus& corpus = out.corpus;

    const std::size_t n_clusters = spec.n_clusters();
    const std::size_t n_tracks = n_clusters * spec.n_tracks_per_cluster;

    struct SynthTrack {
        TrackId id;
        int cluster;
        double popularity;
    };
    std::vector<SynthTrack> all_tracks;
    all_tracks.reserve(n_tracks);

    // Global popularity ranks are shuffled across clusters so the mainstream
    // head spans every planted cluster.
    std::vector<std::size_t> pop_rank(n_tracks);
    for (std::size_t i = 0; i < n_tracks; ++i) pop_rank[i] = i;
    rng.shuffle(pop_rank);

    for (std::size_t k = 0; k < n_clusters; ++k) {
        const AcousticFeatures& center = spec.cluster_feature_centers[k];
        std::string dominant = "cluster" + std::to_string(k) + "genre";
        out.taxonomy.insert(dominant);
        for (std::size_t t = 0; t < spec.n_tracks_per_cluster; ++t) {
            TrackRecord rec;
            rec.artist = "artist_k" + std::to_string(k) + "_" + std::to_string(t / 8);
            rec.title = "track_k" + std::to_string(k) + "_" + std::to_string(t);
            rec.id = make_track_id(rec.artist, rec.title);
            rec.features.danceability = clip01(center.danceability + 0.06 * rng.normal());
            rec.features.energy = clip01(center.energy + 0.06 * rng.normal());
            rec.features.speechiness = clip01(center.speechiness + 0.04 * rng.normal());
            rec.features.acousticness = clip01(center.acousticness + 0.06 * rng.normal());
            rec.features.instrumentalness = clip01(center.instrumentalness + 0.06 * rng.normal());
            rec.features.tempo = std::max(0.0, center.tempo + 6.0 * rng.normal());
            rec.features.valence = clip01(center.valence + 0.06 * rng.normal());
            rec.features.liveness = clip01(center.liveness + 0.05 * rng.normal());

            rec.raw_tags.push_back(dominant);
            if (rng.uniform01() < 0.92) rec.raw_tags.push_back("commontag");
            if (rng.uniform01() < 0.35) {
                std::string flavor =
                    "flavor" + std::to_string(k) + "x" + std::to_string(t % 5);
                rec.raw_tags.push_back(flavor);
                out.taxonomy.insert(flavor);
            }
            if (rng.uniform01() < 0.2) rec.raw_tags.push_back("seenlive");  // not in taxonomy

            std::size_t global_index = k * spec.n_tracks_per_cluster + t;
            double popularity =
                1.0 / std::pow(static_cast<double>(pop_rank[global_index]) + 10.0, 0.8);
            all_tracks.push_back({rec.id, static_cast<int>(k), popularity});
            out.planted_track_cluster[rec.id] = static_cast<int>(k);
            corpus.tracks.emplace(rec.id, std::move(rec));
        }
    }
    out.taxonomy.insert("commontag");

    const std::size_t n_mainstream =
        static_cast<std::size_t>(std::llround(spec.mainstream_fraction *
                                              static_cast<double>(spec.n_users)));

    // Weighted sampling without replacement (Efraimidis–Spirakis keys).
    auto sample_weighted = [&](const std::vector<std::size_t>& pool, std::size_t want) {
        std::vector<std::pair<double, std::size_t>> keyed;
        keyed.reserve(pool.size());
        for (std::size_t idx : pool) {
            double u;
            do {
                u = rng.uniform01();
            } while (u <= 0.0);
            keyed.emplace_back(-std::log(u) / all_tracks[idx].popularity, idx);
        }
        want = std::min(want, keyed.size());
        std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(want),
                          keyed.end());
        std::vector<std::size_t> chosen(want);
        for (std::size_t i = 0; i < want; ++i) chosen[i] = keyed[i].second;
        return chosen;
    };

    std::vector<std::size_t> global_pool(n_tracks);
    for (std::size_t i = 0; i < n_tracks; ++i) global_pool[i] = i;
    std::vector<std::vector<std::size_t>> cluster_pool(n_clusters);
    for (std::size_t i = 0; i < n_tracks; ++i)
        cluster_pool[static_cast<std::size_t>(all_tracks[i].cluster)].push_back(i);

    std::int64_t timestamp = 1'000'000'000;
    for (std::size_t ui = 0; ui < spec.n_users; ++ui) {
        const bool mainstream = ui < n_mainstream;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%s%05zu", mainstream ? "ms" : "bm", ui);
        UserId user(buf);

        int home = mainstream
                       ? -1
                       : static_cast<int>((ui - n_mainstream) % n_clusters);
        out.planted_home_cluster[user] = home;

        const double activity = std::exp(0.5 * rng.normal());
        const std::size_t library = 40 + static_cast<std::size_t>(rng.below(60));
        const double noise_sigma = mainstream ? 0.35 : 0.8;

        const auto& pool = mainstream ? global_pool : cluster_pool[static_cast<std::size_t>(home)];
        std::vector<std::size_t> picks = sample_weighted(pool, library);

        double mean_pop = 0.0;
        for (std::size_t idx : picks) mean_pop += all_tracks[idx].popularity;
        mean_pop /= static_cast<double>(picks.size());

        for (std::size_t idx : picks) {
            const SynthTrack& st = all_tracks[idx];
            double lambda = 3.0 * activity * (st.popularity / mean_pop) *
                            std::exp(noise_sigma * rng.normal());
            std::uint32_t count = 1 + poisson(rng, lambda);
            const TrackRecord& rec = corpus.tracks.at(st.id);
            for (std::uint32_t c = 0; c < count; ++c) {
                ListeningEvent ev;
                ev.user_id = user;
                ev.artist = rec.artist;
                ev.album = "album_" + rec.artist;
                ev.track = rec.title;
                ev.timestamp = timestamp;
                ev.track_id = st.id;
                timestamp += 60;
                corpus.events.push_back(std::move(ev));
            }
            corpus.play_counts[user][st.id] += count;
        }
        corpus.users.insert(user);
    }

    return out;
}

void write_corpus_files(const SyntheticCorpus& synth, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const Corpus& corpus = synth.corpus;

    {
        std::ofstream out(fs::path(dir) / "events.tsv");
        for (const auto& ev : corpus.events)
            out << ev.user_id << '\t' << ev.artist << '\t' << ev.album << '\t' << ev.track
                << '\t' << ev.timestamp << '\n';
    }

    std::vector<const TrackRecord*> sorted_tracks;
    sorted_tracks.reserve(corpus.tracks.size());
    for (const auto& [id, rec] : corpus.tracks) sorted_tracks.push_back(&rec);
    std::sort(sorted_tracks.begin(), sorted_tracks.end(),
              [](const TrackRecord* a, const TrackRecord* b) {
                  return std::tie(a->artist, a->title) < std::tie(b->artist, b->title);
              });

    {
        std::ofstream out(fs::path(dir) / "features.tsv");
        out << "artist\ttrack\tdanceability\tenergy\tspeechiness\tacousticness\t"
               "instrumentalness\ttempo\tvalence\tliveness\n";
        for (const TrackRecord* rec : sorted_tracks) {
            const auto& f = rec->features;
            out << rec->artist << '\t' << rec->title << '\t' << format_double(f.danceability)
                << '\t' << format_double(f.energy) << '\t' << format_double(f.speechiness)
                << '\t' << format_double(f.acousticness) << '\t'
                << format_double(f.instrumentalness) << '\t' << format_double(f.tempo) << '\t'
                << format_double(f.valence) << '\t' << format_double(f.liveness) << '\n';
        }
    }

    {
        std::ofstream out(fs::path(dir) / "tags.tsv");
        for (const TrackRecord* rec : sorted_tracks) {
            std::vector<std::string> tags = rec->raw_tags;
            std::sort(tags.begin(), tags.end());
            for (const auto& tag : tags)
                out << rec->artist << '\t' << rec->title << '\t' << tag << '\n';
        }
    }

    {
        std::ofstream out(fs::path(dir) / "taxonomy.txt");
        for (const auto& genre : synth.taxonomy) out << genre << '\n';
    }
}

}  // namespace offbeat
