// Directed weighted graphs, the Markov-switching topology ensemble, and the
// spectral / structural quantities the estimator's gain analysis needs:
// Laplacians, the stationary-weighted union graph, mirror (symmetrized)
// Laplacians, lambda_2 of the mirror, the max Laplacian norm, and the
// minimum stationary edge mass pi_min.
//
// Edge convention follows the adjacency-matrix form used throughout: a
// directed link j -> i (i receives from j) is encoded as weight(i, j) > 0.

#pragma once

#include <cstdint>
#include <vector>

#include "eftqdi/linalg.hpp"
#include "eftqdi/rng.hpp"

namespace eftqdi {

class Digraph {
public:
    explicit Digraph(int node_count);

    // Adds the directed link from -> to with the given weight in (0, 1).
    void add_edge(int from, int to, double weight);

    int node_count() const { return node_count_; }

    // Adjacency entry a_ij: positive iff there is a link j -> i.
    double weight(int receiver, int sender) const {
        return weights_(static_cast<std::size_t>(receiver), static_cast<std::size_t>(sender));
    }

    bool has_edge(int from, int to) const { return weight(to, from) > 0.0; }

    // Senders j with a link j -> i, ascending.
    std::vector<int> in_neighbors(int receiver) const;

    const Matrix& adjacency() const { return weights_; }

    double in_weight_sum(int node) const;
    double out_weight_sum(int node) const;

    // In-weight sum equals out-weight sum at every node (tolerance 1e-12).
    bool is_balanced(double tol = 1e-12) const;

private:
    int node_count_ = 0;
    Matrix weights_;
};

// diag(row sums) - A; every row sums to zero by construction.
Matrix laplacian(const Digraph& g);

// (L + L^T) / 2 for a balanced digraph. Throws NotBalanced otherwise.
Matrix mirror_laplacian(const Digraph& g);

// Smallest eigenvalue above the zero threshold (1e-9 * lambda_max) of a
// symmetric PSD matrix; returns 0 when no such eigenvalue exists.
double smallest_nonzero_eigenvalue(const Matrix& sym);

// Directed reachability: some root reaches every node along directed edges.
bool has_spanning_tree(const Digraph& g);

struct TopologyEnsemble {
    std::vector<Digraph> graphs;
    Matrix transition;  // s x s row-stochastic
    Vec initial_dist;   // length s

    int node_count() const { return graphs.empty() ? 0 : graphs.front().node_count(); }
    int graph_count() const { return static_cast<int>(graphs.size()); }

    // Throws ConfigInvalid when shapes, stochasticity, or node sets disagree.
    void validate() const;
};

// Unique stationary vector of a row-stochastic matrix, solved as a linear
// system (residual <= 1e-10). Throws NonErgodicChain when the eigenvalue-1
// eigenspace is not one-dimensional (rank tolerance 1e-9) or the residual
// check fails.
Vec stationary_distribution(const Matrix& transition);

// True when some power P^m with m <= s^2 is entrywise positive, i.e. the
// chain is irreducible and aperiodic.
bool is_primitive(const Matrix& transition);

// Union digraph: edge present iff present in any member graph, with weight
// sum_u pi_u * a_ij^(u). Throws NonErgodicChain.
Digraph union_graph(const TopologyEnsemble& ensemble);

struct EnsembleReport {
    Vec stationary;                  // empty when not ergodic
    double pi_min = 0.0;             // min over union edges of stationary edge mass
    double lambda2_mirror = 0.0;     // smallest nonzero eigenvalue, union mirror Laplacian
    double lambda_m = 0.0;           // max ||L^(u)||_2 over member graphs
    std::vector<int> neighbor_sizes; // union in-neighbor count per node
    int n_bar = 0;                   // max neighbor size
    bool balanced_all = false;
    bool union_has_spanning_tree = false;
    bool ergodic = false;

    bool assumption1() const { return balanced_all && union_has_spanning_tree && ergodic; }
};

// Computes every report field; never throws on failing properties — the
// booleans carry the verdicts and stationary-dependent fields are zeroed
// when the chain is not ergodic.
EnsembleReport validate_assumption_1(const TopologyEnsemble& ensemble);

class MarkovSwitcher {
public:
    // Draws the initial state from the ensemble's initial distribution.
    MarkovSwitcher(const TopologyEnsemble& ensemble, Rng stream);

    int state() const { return state_; }

    // Samples the next state from the current row, updates, and returns it.
    int next();

private:
    int sample_from(const double* row, int n);

    Matrix transition_;
    Rng rng_;
    int state_ = 0;
};

}  // namespace eftqdi
