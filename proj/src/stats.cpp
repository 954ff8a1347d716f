#include "semkg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semkg/errors.hpp"

namespace semkg {

Prf prf_from_counts(long tp, long fp, long fn) {
    Prf out;
    out.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    out.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    out.f1 = out.precision + out.recall > 0
                 ? 2 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;
    return out;
}

Prf precision_recall_f1(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.size() != labels.size())
        throw Error("precision_recall_f1: length mismatch");
    if (predictions.empty()) throw Error("precision_recall_f1: empty input");
    long tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] == 1 && labels[i] == 1) ++tp;
        if (predictions[i] == 1 && labels[i] == 0) ++fp;
        if (predictions[i] == 0 && labels[i] == 1) ++fn;
    }
    return prf_from_counts(tp, fp, fn);
}

namespace {

// log Beta(a, b)
double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;

    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    return h;  // converged to machine precision long before kMaxIter in practice
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw Error("incomplete_beta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(b, a)) *
                     beta_cf(b, a, 1.0 - x) / b;
}

double beta_inverse(double p, double a, double b) {
    if (p < 0.0 || p > 1.0) throw Error("beta_inverse: p out of [0,1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-10) {
        double mid = 0.5 * (lo + hi);
        if (incomplete_beta(a, b, mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Interval clopper_pearson(long k, long n, double alpha) {
    if (n < 1) throw Error("clopper_pearson: n must be >= 1");
    if (k < 0 || k > n) throw Error("clopper_pearson: need 0 <= k <= n");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("clopper_pearson: alpha must be in (0,1)");
    Interval ci;
    ci.lower = k == 0 ? 0.0 : beta_inverse(alpha / 2.0, static_cast<double>(k),
                                           static_cast<double>(n - k + 1));
    ci.upper = k == n ? 1.0 : beta_inverse(1.0 - alpha / 2.0, static_cast<double>(k + 1),
                                           static_cast<double>(n - k));
    return ci;
}

Interval f1_confidence_interval(long tp, long fp, long fn, double alpha) {
    if (tp + fp < 1 || tp + fn < 1)
        throw Error("f1_confidence_interval: need tp+fp >= 1 and tp+fn >= 1");
    Interval p = clopper_pearson(tp, tp + fp, alpha);
    Interval r = clopper_pearson(tp, tp + fn, alpha);

    auto f1_of = [](double prec, double rec) {
        return prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    };
    double values[4] = {f1_of(p.lower, r.lower), f1_of(p.lower, r.upper),
                        f1_of(p.upper, r.lower), f1_of(p.upper, r.upper)};
    Interval out;
    out.lower = *std::min_element(values, values + 4);
    out.upper = *std::max_element(values, values + 4);
    return out;
}

double select_threshold(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw Error("select_threshold: length mismatch");
    if (scores.empty()) throw Error("select_threshold: empty input");
    long total_pos = std::count(labels.begin(), labels.end(), 1);
    if (total_pos == 0) throw Error("select_threshold: no positive labels");
    long total_neg = static_cast<long>(labels.size()) - total_pos;

    std::vector<size_t> order(scores.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> candidates{-kInf};
    for (size_t i = 1; i < order.size(); ++i) {
        double a = scores[order[i - 1]], b = scores[order[i]];
        if (a < b) candidates.push_back(a + (b - a) / 2.0);
    }
    candidates.push_back(kInf);

    // Sweep candidates in ascending order, tracking how many positives and
    // negatives fall strictly below the threshold (i.e. are predicted 0).
    double best_threshold = -kInf, best_f1 = -1.0;
    size_t cursor = 0;
    long pos_below = 0, neg_below = 0;
    for (double threshold : candidates) {
        while (cursor < order.size() && scores[order[cursor]] < threshold) {
            if (labels[order[cursor]] == 1)
                ++pos_below;
            else
                ++neg_below;
            ++cursor;
        }
        long tp = total_pos - pos_below;
        long fp = total_neg - neg_below;
        long fn = pos_below;
        double f1 = prf_from_counts(tp, fp, fn).f1;
        if (f1 > best_f1) {  // strict: ties keep the smallest threshold
            best_f1 = f1;
            best_threshold = threshold;
        }
    }
    return best_threshold;
}

}  // namespace semkg
