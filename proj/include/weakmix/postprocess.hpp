#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "weakmix/sampler.hpp"
#include "weakmix/types.hpp"

namespace weakmix {

/// perm[i] is the original component placed at position i.
using Permutation = std::vector<std::size_t>;

struct PermutationTrace {
    std::vector<Permutation> r;
};

StandardParams permute(const StandardParams& params, const Permutation& perm);

struct MapEstimate {
    StandardParams params;
    std::size_t index = 0;
    double log_posterior = 0.0;
};

/// Record with the largest log-posterior; ties go to the lowest index.
MapEstimate find_map(std::span<const ChainRecord> records);

/// All records of several chains, in chain order.
std::vector<ChainRecord> pool(const std::vector<ChainResult>& chains);

struct RelabelOptions {
    bool use_locs = true;
    bool use_scales = true;
    bool use_weights = true;
    /// Divide each block by its pooled standard deviation before comparing.
    bool standardise = false;
};

struct Relabelled {
    std::vector<StandardParams> draws;
    PermutationTrace trace;
};

inline constexpr std::size_t kMaxExhaustiveK = 8;

double relabel_distance(const StandardParams& draw, const StandardParams& reference,
                        const RelabelOptions& options = {});

/// Permutes every record to the ordering closest to `reference` under the
/// squared Euclidean distance over the selected blocks. Exhaustive over all
/// k! permutations; ties go to the first in lexicographic order.
Relabelled relabel_map(std::span<const ChainRecord> records, const StandardParams& reference,
                       const RelabelOptions& options = {});

struct SwitchReport {
    std::size_t distinct = 0;
    std::size_t transitions = 0;
    std::size_t longest_run = 0;
};

SwitchReport detect_switching(const PermutationTrace& trace);

struct KMeansResult {
    /// centres[c] is a point of the pooled space.
    std::vector<std::vector<double>> centres;
    std::vector<std::size_t> assignment;
    std::vector<std::size_t> sizes;
    double sse = 0.0;
    std::size_t best_restart = 0;
    /// Within-cluster sum of squares after every Lloyd iteration of the best restart.
    std::vector<double> sse_history;
};

/// Lloyd's algorithm with k-means++ seeding, `restarts` seeded restarts and
/// the lowest objective kept (ties to the first). Nearest-centre ties go to
/// the lowest index. Throws NumericalError if every restart ends with an
/// empty cluster.
KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k,
                    std::uint64_t seed = 1, std::size_t restarts = 10, std::size_t max_iter = 200);

struct ParamSummary {
    double mean = 0.0;
    double median = 0.0;
    double q025 = 0.0;
    double q975 = 0.0;
};

/// Quantile of sorted values, linear interpolation between order statistics
/// at h = (n - 1) * level.
double quantile_sorted(std::span<const double> sorted, double level);

ParamSummary summarise(std::span<const double> values);

/// Per-component summaries; rows follow component order.
struct ComponentTable {
    std::vector<ParamSummary> locs;
    std::vector<ParamSummary> scales;
    std::vector<ParamSummary> weights;
};

ComponentTable summarise_components(std::span<const StandardParams> draws);

/// Pools the (loc, scale, weight) triples (rate families: (rate, weight)) of
/// every draw, clusters them into k groups and summarises each group.
/// Clusters are ordered by centre location.
struct KMeansSummary {
    ComponentTable table;
    KMeansResult fit;
};

KMeansSummary kmeans_summary(std::span<const StandardParams> draws, std::size_t k,
                             std::uint64_t seed = 1);

struct Summary {
    Family family = Family::gaussian;
    std::size_t k = 0;
    std::size_t draws = 0;
    std::map<std::string, ParamSummary> global;
    MapEstimate map;
    ComponentTable map_relabelled;
    ComponentTable kmeans;
    SwitchReport switching;
};

/// Global-parameter summaries plus both component tables. The MAP table is
/// reordered by the MAP component locations.
Summary summarise_chains(const std::vector<ChainResult>& chains, std::uint64_t seed = 1,
                         const RelabelOptions& options = {});

double mixture_density(const StandardParams& params, double x);

/// Pointwise mean of the mixture densities of `draws` over `grid`.
std::vector<double> density_curve(std::span<const StandardParams> draws, std::span<const double> grid);

} // namespace weakmix
