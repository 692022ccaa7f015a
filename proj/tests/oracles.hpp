// Independent reference implementations used only by the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "fitchoice/observables.hpp"
#include "fitchoice/rng.hpp"
#include "fitchoice/tree_state.hpp"

namespace oracle {

using fitchoice::Checkpoint;
using fitchoice::FitnessClass;
using fitchoice::VertexId;

/// Linear-scan inverse-CDF draw with weights degree + beta; one variate.
inline VertexId oracle_sample(std::span<const std::int64_t> degrees, double beta,
                              fitchoice::Engine& rng) {
    double total = 0.0;
    for (auto d : degrees) {
        total += static_cast<double>(d) + beta;
    }
    double target = fitchoice::uniform01(rng) * total;
    for (std::size_t v = 0; v < degrees.size(); ++v) {
        const double w = static_cast<double>(degrees[v]) + beta;
        if (target < w) {
            return v;
        }
        target -= w;
    }
    return degrees.size() - 1;
}

/// Checkpoint recomputed from scratch by scanning every vertex.
inline Checkpoint scan_snapshot(const fitchoice::TreeState& s) {
    Checkpoint cp;
    cp.n = s.n_edges();
    for (VertexId v = 0; v < s.vertex_count(); ++v) {
        const auto deg = s.degree(v);
        if (s.fitness(v) == FitnessClass::Low) {
            if (deg > cp.M1) {
                cp.M1 = deg;
                cp.hub_low = v;
            }
        } else if (deg > cp.Mlambda) {
            cp.Mlambda = deg;
            cp.hub_high = v;
        }
    }
    for (VertexId v = 0; v < s.vertex_count(); ++v) {
        const auto deg = s.degree(v);
        if (s.fitness(v) == FitnessClass::Low) {
            cp.L1_at_max += deg == cp.M1 ? 1 : 0;
        } else {
            cp.Llambda_at_max += deg == cp.Mlambda ? 1 : 0;
        }
    }
    cp.M = std::max(cp.M1, cp.Mlambda);
    cp.X = std::max(static_cast<double>(cp.M1), s.params().lambda() * static_cast<double>(cp.Mlambda));
    cp.Z = static_cast<double>(cp.M) / static_cast<double>(cp.n);
    return cp;
}

/// Pearson goodness-of-fit p-value of observed counts against probabilities.
inline double chi_square_gof_pvalue(std::span<const std::int64_t> counts,
                                    std::span<const double> probs) {
    double total = 0.0;
    for (auto c : counts) {
        total += static_cast<double>(c);
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double e = total * probs[i];
        stat += (static_cast<double>(counts[i]) - e) * (static_cast<double>(counts[i]) - e) / e;
    }
    const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

/// Two-sample chi-square homogeneity p-value for binned counts.
inline double chi_square_two_sample_pvalue(std::span<const std::int64_t> a,
                                           std::span<const std::int64_t> b) {
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += static_cast<double>(a[i]);
        nb += static_cast<double>(b[i]);
    }
    const double ka = std::sqrt(nb / na), kb = std::sqrt(na / nb);
    double stat = 0.0;
    int cells = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double s = static_cast<double>(a[i] + b[i]);
        if (s > 0) {
            const double diff = ka * static_cast<double>(a[i]) - kb * static_cast<double>(b[i]);
            stat += diff * diff / s;
            ++cells;
        }
    }
    if (cells < 2) {
        return 1.0;
    }
    const boost::math::chi_squared dist(cells - 1);
    return boost::math::cdf(boost::math::complement(dist, stat));
}

/// A reachable small tree with its probability.
struct WeightedTree {
    std::vector<std::int64_t> degrees;
    std::vector<FitnessClass> fitness;
    double prob;
};

/// Every reachable tree at `n_final` edges with its exact probability,
/// obtained by enumerating all ordered d-samples, tie-breaks (uniform over
/// distinct maximizing vertices) and fitness draws.
inline std::vector<WeightedTree> enumerate_trees(double beta, int d, double lambda,
                                                 double p_lambda, int n_final) {
    std::vector<WeightedTree> level;
    for (auto f0 : {FitnessClass::Low, FitnessClass::High}) {
        for (auto f1 : {FitnessClass::Low, FitnessClass::High}) {
            const double p0 = f0 == FitnessClass::High ? p_lambda : 1 - p_lambda;
            const double p1 = f1 == FitnessClass::High ? p_lambda : 1 - p_lambda;
            level.push_back({{1, 1}, {f0, f1}, p0 * p1});
        }
    }
    for (int n = 1; n < n_final; ++n) {
        std::vector<WeightedTree> next;
        for (const auto& t : level) {
            const std::size_t N = t.degrees.size();
            double total = 0.0;
            for (auto deg : t.degrees) {
                total += static_cast<double>(deg) + beta;
            }
            std::vector<double> target_prob(N, 0.0);
            std::vector<std::size_t> tuple(static_cast<std::size_t>(d), 0);
            while (true) {
                double pr = 1.0;
                double best = -1.0;
                for (auto v : tuple) {
                    pr *= (static_cast<double>(t.degrees[v]) + beta) / total;
                    const double fit = t.fitness[v] == FitnessClass::High ? lambda : 1.0;
                    best = std::max(best, fit * static_cast<double>(t.degrees[v]));
                }
                std::vector<std::size_t> winners;
                for (auto v : tuple) {
                    const double fit = t.fitness[v] == FitnessClass::High ? lambda : 1.0;
                    if (fit * static_cast<double>(t.degrees[v]) == best &&
                        std::find(winners.begin(), winners.end(), v) == winners.end()) {
                        winners.push_back(v);
                    }
                }
                for (auto w : winners) {
                    target_prob[w] += pr / static_cast<double>(winners.size());
                }
                std::size_t i = 0;
                while (i < tuple.size() && ++tuple[i] == N) {
                    tuple[i++] = 0;
                }
                if (i == tuple.size()) {
                    break;
                }
            }
            for (std::size_t target = 0; target < N; ++target) {
                for (auto f : {FitnessClass::Low, FitnessClass::High}) {
                    WeightedTree child = t;
                    ++child.degrees[target];
                    child.degrees.push_back(1);
                    child.fitness.push_back(f);
                    child.prob *= target_prob[target] * (f == FitnessClass::High ? p_lambda : 1 - p_lambda);
                    if (child.prob > 0.0) {
                        next.push_back(std::move(child));
                    }
                }
            }
        }
        level = std::move(next);
    }
    return level;
}

/// Exact distribution of the maximum degree at `n_final` edges.
inline std::map<std::int64_t, double> max_degree_distribution(double beta, int d, double lambda,
                                                              double p_lambda, int n_final) {
    std::map<std::int64_t, double> dist;
    for (const auto& t : enumerate_trees(beta, d, lambda, p_lambda, n_final)) {
        dist[*std::max_element(t.degrees.begin(), t.degrees.end())] += t.prob;
    }
    return dist;
}

}  // namespace oracle
