#include "navsim/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>

#include "navsim/errors.hpp"

namespace navsim {

double path_length(const Trajectory& t) {
    if (t.points.empty()) throw Error("trajectory has no points");
    double acc = 0.0;
    for (size_t i = 1; i < t.points.size(); ++i) {
        acc += distance(t.points[i - 1], t.points[i]);
    }
    return acc;
}

double nav_error(const Trajectory& t, Vec2 goal) {
    if (t.points.empty()) throw Error("trajectory has no points");
    return distance(t.final_point(), goal);
}

int success(const Trajectory& t, Vec2 goal, double radius) {
    return nav_error(t, goal) <= radius ? 1 : 0;
}

int oracle_success(const Trajectory& t, Vec2 goal, double radius) {
    if (t.points.empty()) throw Error("trajectory has no points");
    for (const auto& p : t.points) {
        if (distance(p, goal) <= radius) return 1;
    }
    return 0;
}

double spl(int success, double shortest, double taken) {
    if (shortest <= 0.0) throw Error("spl needs a positive shortest-path length");
    return success * shortest / std::max(taken, shortest);
}

double dtw(const std::vector<Vec2>& p, const std::vector<Vec2>& r) {
    if (p.empty() || r.empty()) throw Error("dtw needs non-empty polylines");
    size_t n = p.size(), m = r.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
    prev[0] = 0.0;
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = inf;
        for (size_t j = 1; j <= m; ++j) {
            double best = std::min({prev[j], cur[j - 1], prev[j - 1]});
            cur[j] = distance(p[i - 1], r[j - 1]) + best;
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

double ndtw(const std::vector<Vec2>& p, const std::vector<Vec2>& r, double d_th) {
    if (d_th <= 0.0) throw Error("ndtw needs a positive distance threshold");
    return std::exp(-dtw(p, r) / (static_cast<double>(r.size()) * d_th));
}

namespace {

std::vector<std::string> tokenize(const std::vector<std::string>& phrases) {
    std::vector<std::string> tokens;
    std::string cur;
    for (const auto& phrase : phrases) {
        for (char ch : phrase) {
            if (std::isalnum(static_cast<unsigned char>(ch))) {
                cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            } else if (!cur.empty()) {
                tokens.push_back(cur);
                cur.clear();
            }
        }
        if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    }
    return tokens;
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

} // namespace

DecompositionScore score_decomposition(const std::vector<std::string>& predicted,
                                       const std::vector<std::string>& reference) {
    if (reference.empty()) throw Error("reference decomposition is empty");
    std::vector<std::string> pred = tokenize(predicted);
    std::vector<std::string> ref = tokenize(reference);

    DecompositionScore score;
    if (pred.empty() || ref.empty()) return score;

    // Multiset token overlap.
    std::map<std::string, int> counts;
    for (const auto& t : ref) ++counts[t];
    int overlap = 0;
    for (const auto& t : pred) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    double precision = static_cast<double>(overlap) / pred.size();
    double recall = static_cast<double>(overlap) / ref.size();
    score.f1 = harmonic(precision, recall);

    // LCS over the token sequences.
    size_t n = pred.size(), m = ref.size();
    std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
    for (size_t i = 1; i <= n; ++i) {
        for (size_t j = 1; j <= m; ++j) {
            lcs[i][j] = pred[i - 1] == ref[j - 1] ? lcs[i - 1][j - 1] + 1
                                                  : std::max(lcs[i - 1][j], lcs[i][j - 1]);
        }
    }
    double l = lcs[n][m];
    score.rouge_l = harmonic(l / n, l / m);
    return score;
}

MetricsReport compute_report(const Trajectory& t, const std::vector<Vec2>& reference_path,
                             Vec2 goal, double success_radius, double shortest_geodesic,
                             double d_th) {
    MetricsReport rep;
    rep.tl = path_length(t);
    rep.ne = nav_error(t, goal);
    rep.sr = success(t, goal, success_radius);
    rep.osr = oracle_success(t, goal, success_radius);
    rep.spl = spl(static_cast<int>(rep.sr), shortest_geodesic, rep.tl);
    rep.ndtw = ndtw(t.points, reference_path, d_th);
    return rep;
}

AggregateReport aggregate(const std::vector<MetricsReport>& reports) {
    if (reports.empty()) throw Error("cannot aggregate zero reports");
    AggregateReport agg;
    agg.count = static_cast<int>(reports.size());
    for (const auto& r : reports) {
        agg.tl += r.tl;
        agg.ne += r.ne;
        agg.ndtw += r.ndtw;
        agg.osr += r.osr;
        agg.sr += r.sr;
        agg.spl += r.spl;
    }
    double n = agg.count;
    agg.tl /= n;
    agg.ne /= n;
    agg.ndtw = agg.ndtw / n * 100.0;
    agg.osr = agg.osr / n * 100.0;
    agg.sr = agg.sr / n * 100.0;
    agg.spl = agg.spl / n * 100.0;
    return agg;
}

} // namespace navsim
