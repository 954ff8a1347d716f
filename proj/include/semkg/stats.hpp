#pragma once

#include <vector>

namespace semkg {

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Positive class is 1; zero denominators yield 0 by convention.
Prf precision_recall_f1(const std::vector<int>& predictions, const std::vector<int>& labels);

Prf prf_from_counts(long tp, long fp, long fn);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Inverse of I_x(a, b) in x, by bisection to 1e-10.
double beta_inverse(double p, double a, double b);

struct Interval {
    double lower = 0.0;
    double upper = 1.0;
};

// Exact binomial confidence interval: lower = BetaInv(alpha/2; k, n-k+1)
// with lower = 0 at k = 0, upper = BetaInv(1-alpha/2; k+1, n-k) with
// upper = 1 at k = n.
Interval clopper_pearson(long k, long n, double alpha);

// Clopper-Pearson bounds for precision (k=tp, n=tp+fp) and recall
// (k=tp, n=tp+fn); F1 evaluated at all four bound combinations, returning
// the min and max. Requires tp+fp >= 1 and tp+fn >= 1.
Interval f1_confidence_interval(long tp, long fp, long fn, double alpha);

// Candidate thresholds are the midpoints between consecutive distinct sorted
// scores plus -inf/+inf sentinels; prediction is score >= threshold. Returns
// the candidate maximizing F1, ties broken toward the smallest threshold.
// Requires at least one positive label.
double select_threshold(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace semkg
