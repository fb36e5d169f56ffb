#include "offbeat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace offbeat::stats {

namespace {

void require_finite(std::span<const double> v, const char* name) {
    if (v.empty()) throw std::invalid_argument(std::string(name) + ": empty sample");
    for (double x : v)
        if (!std::isfinite(x))
            throw std::invalid_argument(std::string(name) + ": sample contains NaN/inf");
}

void require_same_length(std::span<const double> x, std::span<const double> y,
                         const char* name) {
    if (x.size() != y.size())
        throw std::invalid_argument(std::string(name) + ": length mismatch (" +
                                    std::to_string(x.size()) + " vs " +
                                    std::to_string(y.size()) + ")");
}

// Pairs lost to ties: sum of t*(t-1)/2 over runs of equal values.
long long tied_pairs(std::vector<double> sorted) {
    std::sort(sorted.begin(), sorted.end());
    long long total = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        long long t = static_cast<long long>(j - i);
        total += t * (t - 1) / 2;
        i = j;
    }
    return total;
}

double tau_from_counts(long long s, long long n0, long long tie_x, long long tie_y) {
    if (tie_x == n0 || tie_y == n0)
        throw std::invalid_argument("kendall_tau: zero variance input, correlation undefined");
    return static_cast<double>(s) /
           std::sqrt(static_cast<double>(n0 - tie_x) * static_cast<double>(n0 - tie_y));
}

// Merge sort counting strict inversions (pairs i<j with v[i] > v[j]).
long long count_inversions(std::vector<double>& v, std::vector<double>& scratch,
                           std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    std::size_t mid = lo + (hi - lo) / 2;
    long long swaps = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[i] <= v[j]) {
            scratch[k++] = v[i++];
        } else {
            swaps += static_cast<long long>(mid - i);
            scratch[k++] = v[j++];
        }
    }
    while (i < mid) scratch[k++] = v[i++];
    while (j < hi) scratch[k++] = v[j++];
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
              scratch.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return swaps;
}

// Midranks scaled by two so they stay integral under ties.
std::vector<long long> midranks_times_two(std::span<const double> pooled_sorted) {
    std::vector<long long> r2(pooled_sorted.size());
    std::size_t i = 0;
    while (i < pooled_sorted.size()) {
        std::size_t j = i;
        while (j < pooled_sorted.size() && pooled_sorted[j] == pooled_sorted[i]) ++j;
        long long rank2 = static_cast<long long>(i + 1 + j);  // 2 * average of ranks i+1..j
        for (std::size_t k = i; k < j; ++k) r2[k] = rank2;
        i = j;
    }
    return r2;
}

constexpr double kBetaEps = 1e-14;
constexpr double kBetaFpMin = 1e-300;
constexpr int kBetaMaxIter = 400;

double gammln(double xx) {
    static const double cof[6] = {76.18009172947146,     -86.50532032941677,
                                  24.01409824083091,     -1.231739572450155,
                                  0.1208650973866179e-2, -0.5395239384953e-5};
    double y = xx, x = xx;
    double tmp = x + 5.5;
    tmp -= (x + 0.5) * std::log(tmp);
    double ser = 1.000000000190015;
    for (int j = 0; j <= 5; ++j) ser += cof[j] / ++y;
    return -tmp + std::log(2.5066282746310005 * ser / x);
}

double betacf(double a, double b, double x) {
    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kBetaFpMin) d = kBetaFpMin;
    d = 1.0 / d;
    double h = d;
    int m = 1;
    for (; m <= kBetaMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kBetaFpMin) d = kBetaFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kBetaFpMin) c = kBetaFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kBetaFpMin) d = kBetaFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kBetaFpMin) c = kBetaFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kBetaEps) break;
    }
    if (m > kBetaMaxIter)
        throw std::runtime_error("betacf: continued fraction failed to converge");
    return h;
}

// Regularized incomplete beta I_x(a, b).
double betai(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("betai: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double bt = std::exp(gammln(a + b) - gammln(a) - gammln(b) + a * std::log(x) +
                         b * std::log(1.0 - x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

// Studentized range upper critical values q(alpha; k, df) for k = 2..10.
// df rows: 1..20, 24, 30, 40, 60, 120, inf. Lookups between rows interpolate
// linearly in 1/df (the standard convention for q tables).
constexpr double kQTableDf[] = {1,  2,  3,  4,  5,  6,  7,  8,  9,  10, 11, 12, 13,
                                14, 15, 16, 17, 18, 19, 20, 24, 30, 40, 60, 120,
                                std::numeric_limits<double>::infinity()};
constexpr int kQTableRows = 26;
constexpr int kQTableCols = 9;  // k = 2..10

constexpr double kQTable05[kQTableRows][kQTableCols] = {
    {17.969287, 26.975530, 32.818726, 37.081502, 40.407559, 43.118631, 45.397300, 47.356582, 49.071022},
    {6.084870, 8.330783, 9.798045, 10.881114, 11.734297, 12.434917, 13.027254, 13.538976, 13.988491},
    {4.500659, 5.909598, 6.824526, 7.501672, 8.037085, 8.478309, 8.852497, 9.176626, 9.462010},
    {3.926486, 5.040241, 5.757060, 6.287027, 6.706438, 7.052554, 7.346519, 7.601520, 7.826335},
    {3.635352, 4.601726, 5.218325, 5.673124, 6.032903, 6.329901, 6.582301, 6.801398, 6.994698},
    {3.460456, 4.339195, 4.895599, 5.304891, 5.628353, 5.895309, 6.122202, 6.319211, 6.493085},
    {3.344084, 4.164941, 4.681276, 5.060074, 5.359079, 5.605721, 5.815314, 5.997305, 6.157944},
    {3.261182, 4.041036, 4.528810, 4.885754, 5.167152, 5.399121, 5.596180, 5.767266, 5.918277},
    {3.199173, 3.948492, 4.414890, 4.755404, 5.023515, 5.244374, 5.431921, 5.594712, 5.738386},
    {3.151064, 3.876777, 4.326582, 4.654293, 4.912016, 5.124166, 5.304238, 5.460499, 5.598386},
    {3.112663, 3.819588, 4.256143, 4.573596, 4.822972, 5.028108, 5.202147, 5.353127, 5.486330},
    {3.081307, 3.772929, 4.198660, 4.507710, 4.750231, 4.949594, 5.118658, 5.265278, 5.394605},
    {3.055223, 3.734142, 4.150866, 4.452906, 4.689697, 4.884224, 5.049115, 5.192070, 5.318137},
    {3.033186, 3.701394, 4.110506, 4.406610, 4.638538, 4.828954, 4.990292, 5.130124, 5.253408},
    {3.014325, 3.673378, 4.075974, 4.366985, 4.594735, 4.781614, 4.939890, 5.077026, 5.197907},
    {2.997999, 3.649139, 4.046093, 4.332688, 4.556809, 4.740611, 4.896220, 5.031007, 5.149791},
    {2.983730, 3.627963, 4.019985, 4.302713, 4.523653, 4.704754, 4.858020, 4.990740, 5.107677},
    {2.971152, 3.609304, 3.996978, 4.276293, 4.494420, 4.673132, 4.824322, 4.955209, 5.070507},
    {2.959983, 3.592739, 3.976551, 4.252831, 4.468454, 4.645036, 4.794374, 4.923625, 5.037459},
    {2.949998, 3.577935, 3.958294, 4.231857, 4.445237, 4.619908, 4.767584, 4.895365, 5.007883},
    {2.918793, 3.531697, 3.901262, 4.166314, 4.372651, 4.541314, 4.683752, 4.806894, 4.915250},
    {2.888209, 3.486420, 3.845401, 4.102079, 4.301464, 4.464177, 4.601415, 4.719938, 4.824141},
    {2.858232, 3.442082, 3.790685, 4.039123, 4.231644, 4.388464, 4.520535, 4.634457, 4.734513},
    {2.828848, 3.398661, 3.737089, 3.977418, 4.163161, 4.314143, 4.441079, 4.550414, 4.646324},
    {2.800044, 3.356138, 3.684589, 3.916938, 4.095986, 4.241182, 4.363013, 4.467775, 4.559538},
    {2.771808, 3.314493, 3.633160, 3.857656, 4.030092, 4.169554, 4.286309, 4.386509, 4.474124},
};

constexpr double kQTable01[kQTableRows][kQTableCols] = {
    {90.024227, 135.040660, 164.257711, 185.575293, 202.209719, 215.769123, 227.166256, 236.966184, 245.541643},
    {14.035848, 19.018936, 22.293746, 24.717186, 26.629041, 28.200561, 29.530135, 30.679381, 31.689352},
    {8.260293, 10.618540, 12.169527, 13.324309, 14.240705, 14.997775, 15.641003, 16.198972, 16.690809},
    {6.511173, 8.119792, 9.172941, 9.958292, 10.583190, 11.100851, 11.541777, 11.925120, 12.263703},
    {5.702311, 6.975737, 7.804156, 8.421491, 8.913107, 9.320882, 9.668689, 9.971481, 10.239256},
    {5.243095, 6.330508, 7.033262, 7.556039, 7.972278, 8.317674, 8.612469, 8.869301, 9.096604},
    {4.949017, 5.919294, 6.542441, 7.004993, 7.373012, 7.678367, 7.939042, 8.166227, 8.367376},
    {4.745234, 5.635393, 6.203835, 6.624813, 6.959423, 7.236949, 7.473848, 7.680333, 7.863188},
    {4.595961, 5.428043, 5.956682, 6.347299, 6.657430, 6.914511, 7.133903, 7.325115, 7.494451},
    {4.482028, 5.270162, 5.768591, 6.136093, 6.427536, 6.668970, 6.874937, 7.054415, 7.213349},
    {4.392274, 5.146034, 5.620779, 5.970110, 6.246827, 6.475906, 6.671253, 6.841434, 6.992115},
    {4.319771, 5.045935, 5.501626, 5.836308, 6.101128, 6.320208, 6.506945, 6.669579, 6.813550},
    {4.260001, 4.963534, 5.403576, 5.726202, 5.981214, 6.192036, 6.371653, 6.528037, 6.666447},
    {4.209891, 4.894539, 5.321501, 5.634036, 5.880825, 6.084715, 6.258346, 6.409471, 6.543194},
    {4.167281, 4.835934, 5.251807, 5.555773, 5.795572, 5.993560, 6.162089, 6.308726, 6.438447},
    {4.130609, 4.785545, 5.191898, 5.488500, 5.722283, 5.915187, 6.079317, 6.222079, 6.348343},
    {4.098717, 4.741763, 5.139856, 5.430062, 5.658614, 5.847092, 6.007389, 6.146774, 6.270021},
    {4.070730, 4.703370, 5.094231, 5.378830, 5.602793, 5.787385, 5.944314, 6.080728, 6.201319},
    {4.045973, 4.669433, 5.053908, 5.333553, 5.553457, 5.734610, 5.888555, 6.022336, 6.140571},
    {4.023918, 4.639220, 5.018016, 5.293253, 5.509542, 5.687630, 5.838914, 5.970344, 6.086476},
    {3.955470, 4.545569, 4.906804, 5.168387, 5.373466, 5.542033, 5.685041, 5.809152, 5.918725},
    {3.889081, 4.454915, 4.799216, 5.047605, 5.241826, 5.401152, 5.536109, 5.653087, 5.756255},
    {3.824683, 4.367157, 4.695134, 4.930778, 5.114488, 5.264848, 5.391980, 5.502009, 5.598926},
    {3.762208, 4.282198, 4.594443, 4.817782, 4.991324, 5.132995, 5.252525, 5.355792, 5.446615},
    {3.701592, 4.199944, 4.497034, 4.708500, 4.872215, 5.005471, 5.117627, 5.214323, 5.299214},
    {3.642773, 4.120303, 4.402801, 4.602821, 4.757047, 4.882166, 4.987183, 5.077506, 5.156635},
};

}  // namespace

double mean(std::span<const double> v) {
    require_finite(v, "mean");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_stddev(std::span<const double> v) {
    require_finite(v, "sample_stddev");
    if (v.size() < 2) throw std::invalid_argument("sample_stddev: need at least 2 values");
    double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double percentile(std::span<const double> values, double q) {
    require_finite(values, "percentile");
    if (q < 0.0 || q > 100.0) throw std::invalid_argument("percentile: q outside [0,100]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.size() == 1) return sorted[0];
    double rank = q / 100.0 * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(rank));
    std::size_t hi = static_cast<std::size_t>(std::ceil(rank));
    if (lo == hi) return sorted[lo];
    double frac = rank - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

FiveNumber five_number_summary(std::span<const double> values) {
    FiveNumber f;
    f.min = percentile(values, 0.0);
    f.q1 = percentile(values, 25.0);
    f.median = percentile(values, 50.0);
    f.q3 = percentile(values, 75.0);
    f.max = percentile(values, 100.0);
    return f;
}

double kendall_tau_pairwise(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y, "kendall_tau");
    require_finite(x, "kendall_tau");
    require_finite(y, "kendall_tau");
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("kendall_tau: need at least 2 observations");
    long long concordant = 0, discordant = 0, tie_x = 0, tie_y = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double dx = x[i] - x[j];
            double dy = y[i] - y[j];
            if (dx == 0.0) ++tie_x;
            if (dy == 0.0) ++tie_y;
            if (dx == 0.0 || dy == 0.0) continue;
            if ((dx > 0.0) == (dy > 0.0))
                ++concordant;
            else
                ++discordant;
        }
    }
    long long n0 = static_cast<long long>(n) * static_cast<long long>(n - 1) / 2;
    return tau_from_counts(concordant - discordant, n0, tie_x, tie_y);
}

double kendall_tau_mergesort(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y, "kendall_tau");
    require_finite(x, "kendall_tau");
    require_finite(y, "kendall_tau");
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("kendall_tau: need at least 2 observations");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    // Pairs tied in x, and tied in both, from runs in the (x, y) ordering.
    long long tie_x = 0, tie_both = 0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j < n && x[order[j]] == x[order[i]]) ++j;
            long long t = static_cast<long long>(j - i);
            tie_x += t * (t - 1) / 2;
            std::size_t a = i;
            while (a < j) {
                std::size_t b = a;
                while (b < j && y[order[b]] == y[order[a]]) ++b;
                long long u = static_cast<long long>(b - a);
                tie_both += u * (u - 1) / 2;
                a = b;
            }
            i = j;
        }
    }

    std::vector<double> y_sorted_by_x(n);
    for (std::size_t i = 0; i < n; ++i) y_sorted_by_x[i] = y[order[i]];
    long long tie_y = tied_pairs(y_sorted_by_x);

    std::vector<double> scratch(n);
    long long discordant = count_inversions(y_sorted_by_x, scratch, 0, n);

    long long n0 = static_cast<long long>(n) * static_cast<long long>(n - 1) / 2;
    long long s = n0 - tie_x - tie_y + tie_both - 2 * discordant;
    return tau_from_counts(s, n0, tie_x, tie_y);
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    return x.size() <= 64 ? kendall_tau_pairwise(x, y) : kendall_tau_mergesort(x, y);
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y, "pearson_r");
    require_finite(x, "pearson_r");
    require_finite(y, "pearson_r");
    if (x.size() < 2) throw std::invalid_argument("pearson_r: need at least 2 observations");
    double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("pearson_r: zero variance input, correlation undefined");
    return sxy / std::sqrt(sxx * syy);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    require_same_length(a, b, "cosine_similarity");
    require_finite(a, "cosine_similarity");
    require_finite(b, "cosine_similarity");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < 0.0 || b[i] < 0.0)
            throw std::invalid_argument("cosine_similarity: negative entry");
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0)
        throw std::invalid_argument("cosine_similarity: zero vector, similarity undefined");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double scott_bandwidth(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("scott_bandwidth: need at least 2 values");
    double sd = sample_stddev(values);
    if (sd == 0.0) throw std::invalid_argument("scott_bandwidth: degenerate spread");
    return sd * std::pow(static_cast<double>(values.size()), -0.2);
}

std::vector<double> gaussian_kde(std::span<const double> values, std::span<const double> grid) {
    return gaussian_kde(values, grid, scott_bandwidth(values));
}

std::vector<double> gaussian_kde(std::span<const double> values, std::span<const double> grid,
                                 double bandwidth) {
    require_finite(values, "gaussian_kde");
    if (values.size() < 2) throw std::invalid_argument("gaussian_kde: need at least 2 values");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("gaussian_kde: bandwidth must be positive");
    const double inv_h = 1.0 / bandwidth;
    const double norm = inv_h / (static_cast<double>(values.size()) * std::sqrt(2.0 * M_PI));
    std::vector<double> density(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double acc = 0.0;
        for (double v : values) {
            double t = (grid[g] - v) * inv_h;
            acc += std::exp(-0.5 * t * t);
        }
        density[g] = acc * norm;
    }
    return density;
}

std::vector<double> central_gradient(std::span<const double> f, double h) {
    require_finite(f, "central_gradient");
    if (f.size() < 3) throw std::invalid_argument("central_gradient: need at least 3 points");
    if (!(h > 0.0)) throw std::invalid_argument("central_gradient: spacing must be positive");
    const std::size_t n = f.size();
    std::vector<double> g(n);
    g[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    g[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return g;
}

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b, double alpha) {
    require_finite(a, "mann_whitney_u");
    require_finite(b, "mann_whitney_u");
    const std::size_t na = a.size(), nb = b.size(), n = na + nb;

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = pooled[order[i]];
    std::vector<long long> rank2 = midranks_times_two(sorted);

    long long r2_a = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (order[i] < na) r2_a += rank2[i];
    const long long u2_obs = r2_a - static_cast<long long>(na) * static_cast<long long>(na + 1);
    const double u_a = static_cast<double>(u2_obs) / 2.0;

    TestResult result;
    result.statistic = u_a;

    if (n <= 12) {
        // Exact permutation distribution: every way of labelling na of the
        // pooled observations as group a is equally likely under H0.
        auto next_combination = [n](std::vector<std::size_t>& comb) {
            const std::size_t k = comb.size();
            std::size_t i = k;
            while (i > 0) {
                --i;
                if (comb[i] != i + n - k) {
                    ++comb[i];
                    for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
                    return true;
                }
            }
            return false;
        };
        std::vector<std::size_t> comb(na);
        std::iota(comb.begin(), comb.end(), 0);
        long long le_count = 0, total = 0;
        do {
            long long r2 = 0;
            for (std::size_t idx : comb) r2 += rank2[idx];
            long long u2 = r2 - static_cast<long long>(na) * static_cast<long long>(na + 1);
            if (u2 <= u2_obs) ++le_count;
            ++total;
        } while (next_combination(comb));
        result.p_value = static_cast<double>(le_count) / static_cast<double>(total);
    } else {
        // Normal approximation with tie and continuity corrections.
        double tie_term = 0.0;
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j < n && sorted[j] == sorted[i]) ++j;
            double t = static_cast<double>(j - i);
            tie_term += t * t * t - t;
            i = j;
        }
        const double dn = static_cast<double>(n), dna = static_cast<double>(na),
                     dnb = static_cast<double>(nb);
        const double mu = dna * dnb / 2.0;
        const double var =
            dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
        if (var <= 0.0) {
            result.p_value = 1.0;  // all pooled values identical
        } else {
            double z = (u_a - mu + 0.5) / std::sqrt(var);
            result.p_value = normal_cdf(z);
        }
    }
    result.reject = result.p_value < alpha;
    return result;
}

TestResult one_way_anova(const std::vector<std::vector<double>>& groups, double alpha) {
    if (groups.size() < 2) throw std::invalid_argument("one_way_anova: need at least 2 groups");
    for (const auto& g : groups) {
        require_finite(g, "one_way_anova");
        if (g.size() < 2)
            throw std::invalid_argument("one_way_anova: every group needs at least 2 values");
    }
    const std::size_t k = groups.size();
    std::size_t total_n = 0;
    double grand_sum = 0.0;
    std::vector<double> group_means(k);
    for (std::size_t i = 0; i < k; ++i) {
        group_means[i] = mean(groups[i]);
        grand_sum += group_means[i] * static_cast<double>(groups[i].size());
        total_n += groups[i].size();
    }
    const double grand_mean = grand_sum / static_cast<double>(total_n);

    double ss_between = 0.0, ss_within = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double d = group_means[i] - grand_mean;
        ss_between += static_cast<double>(groups[i].size()) * d * d;
        for (double x : groups[i]) {
            double e = x - group_means[i];
            ss_within += e * e;
        }
    }
    const double df1 = static_cast<double>(k - 1);
    const double df2 = static_cast<double>(total_n - k);

    TestResult result;
    if (ss_within == 0.0) {
        result.statistic = ss_between == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        result.p_value = ss_between == 0.0 ? 1.0 : 0.0;
    } else {
        result.statistic = (ss_between / df1) / (ss_within / df2);
        result.p_value = f_distribution_sf(result.statistic, df1, df2);
    }
    result.reject = result.p_value < alpha;
    return result;
}

std::vector<std::vector<bool>> tukey_hsd(const std::vector<std::vector<double>>& groups,
                                         double alpha) {
    if (groups.size() < 2) throw std::invalid_argument("tukey_hsd: need at least 2 groups");
    for (const auto& g : groups) {
        require_finite(g, "tukey_hsd");
        if (g.size() < 2)
            throw std::invalid_argument("tukey_hsd: every group needs at least 2 values");
    }
    const std::size_t k = groups.size();
    std::size_t total_n = 0;
    std::vector<double> means(k);
    double ss_within = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        means[i] = mean(groups[i]);
        total_n += groups[i].size();
        for (double x : groups[i]) {
            double e = x - means[i];
            ss_within += e * e;
        }
    }
    const double df = static_cast<double>(total_n - k);
    const double msw = ss_within / df;
    const double q_crit = studentized_range_critical(alpha, static_cast<int>(k), df);

    std::vector<std::vector<bool>> reject(k, std::vector<bool>(k, false));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            bool rej;
            double diff = std::fabs(means[i] - means[j]);
            if (msw == 0.0) {
                rej = diff > 0.0;
            } else {
                double se = std::sqrt(msw / 2.0 * (1.0 / static_cast<double>(groups[i].size()) +
                                                   1.0 / static_cast<double>(groups[j].size())));
                rej = diff / se > q_crit;
            }
            reject[i][j] = rej;
            reject[j][i] = rej;
        }
    }
    return reject;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double f_distribution_sf(double f_stat, double df1, double df2) {
    if (f_stat <= 0.0) return 1.0;
    if (std::isinf(f_stat)) return 0.0;
    return betai(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f_stat));
}

double studentized_range_critical(double alpha, int n_groups, double df) {
    const double(*table)[kQTableCols];
    if (alpha == 0.05)
        table = kQTable05;
    else if (alpha == 0.01)
        table = kQTable01;
    else
        throw std::invalid_argument(
            "studentized_range_critical: tabulated alphas are 0.05 and 0.01");
    if (n_groups < 2 || n_groups > 10)
        throw std::invalid_argument("studentized_range_critical: k must be in [2,10]");
    if (!(df >= 1.0))
        throw std::invalid_argument("studentized_range_critical: df must be >= 1");
    const int col = n_groups - 2;

    int hi = 0;
    while (hi < kQTableRows && kQTableDf[hi] < df) ++hi;
    if (hi == kQTableRows) return table[kQTableRows - 1][col];  // beyond inf row: unreachable
    if (kQTableDf[hi] == df || hi == 0) return table[hi][col];
    // Interpolate in 1/df between the bracketing rows (1/inf == 0).
    const double lo_df = kQTableDf[hi - 1], hi_df = kQTableDf[hi];
    const double inv_lo = 1.0 / lo_df;
    const double inv_hi = std::isinf(hi_df) ? 0.0 : 1.0 / hi_df;
    const double w = (1.0 / df - inv_lo) / (inv_hi - inv_lo);
    return table[hi - 1][col] + w * (table[hi][col] - table[hi - 1][col]);
}

}  // namespace offbeat::stats
