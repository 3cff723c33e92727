#include "eftqdi/graph.hpp"

#include <algorithm>
#include <cmath>

#include "eftqdi/errors.hpp"

namespace eftqdi {

Digraph::Digraph(int node_count) : node_count_(node_count) {
    if (node_count <= 0) throw DimensionMismatch("Digraph: node_count must be positive");
    weights_ = Matrix(static_cast<std::size_t>(node_count), static_cast<std::size_t>(node_count));
}

void Digraph::add_edge(int from, int to, double weight) {
    if (from < 0 || from >= node_count_ || to < 0 || to >= node_count_)
        throw DimensionMismatch("Digraph::add_edge: node index out of range");
    if (from == to) throw ConfigInvalid("Digraph::add_edge: self-loops are not allowed");
    if (!(weight > 0.0) || !(weight < 1.0))
        throw ConfigInvalid("Digraph::add_edge: weight must lie in (0, 1)");
    weights_(static_cast<std::size_t>(to), static_cast<std::size_t>(from)) = weight;
}

std::vector<int> Digraph::in_neighbors(int receiver) const {
    std::vector<int> out;
    for (int j = 0; j < node_count_; ++j)
        if (weight(receiver, j) > 0.0) out.push_back(j);
    return out;
}

double Digraph::in_weight_sum(int node) const {
    double acc = 0.0;
    for (int j = 0; j < node_count_; ++j) acc += weight(node, j);
    return acc;
}

double Digraph::out_weight_sum(int node) const {
    double acc = 0.0;
    for (int i = 0; i < node_count_; ++i) acc += weight(i, node);
    return acc;
}

bool Digraph::is_balanced(double tol) const {
    for (int i = 0; i < node_count_; ++i)
        if (std::abs(in_weight_sum(i) - out_weight_sum(i)) > tol) return false;
    return true;
}

Matrix laplacian(const Digraph& g) {
    const int m = g.node_count();
    Matrix l(static_cast<std::size_t>(m), static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            const double a = g.weight(i, j);
            l(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = -a;
            row_sum += a;
        }
        l(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) = row_sum;
    }
    return l;
}

Matrix mirror_laplacian(const Digraph& g) {
    if (!g.is_balanced())
        throw NotBalanced("mirror_laplacian: digraph is not balanced");
    const Matrix l = laplacian(g);
    return 0.5 * (l + transpose(l));
}

double smallest_nonzero_eigenvalue(const Matrix& sym) {
    const auto eig = symmetric_eigenvalues(sym);
    if (eig.size() < 2) return 0.0;
    const double lambda_max = std::max(0.0, eig.back());
    const double zero_cut = 1e-9 * lambda_max;
    // A Laplacian has at least one zero eigenvalue; a second one below the
    // cut means the graph is disconnected, in which case the connectivity
    // constant is zero rather than the next positive eigenvalue.
    return eig[1] > zero_cut ? eig[1] : 0.0;
}

bool has_spanning_tree(const Digraph& g) {
    const int m = g.node_count();
    for (int root = 0; root < m; ++root) {
        std::vector<char> seen(static_cast<std::size_t>(m), 0);
        std::vector<int> stack{root};
        seen[static_cast<std::size_t>(root)] = 1;
        int count = 1;
        while (!stack.empty()) {
            const int j = stack.back();
            stack.pop_back();
            for (int i = 0; i < m; ++i) {
                if (!seen[static_cast<std::size_t>(i)] && g.weight(i, j) > 0.0) {
                    seen[static_cast<std::size_t>(i)] = 1;
                    stack.push_back(i);
                    ++count;
                }
            }
        }
        if (count == m) return true;
    }
    return false;
}

void TopologyEnsemble::validate() const {
    if (graphs.empty()) throw ConfigInvalid("ensemble: at least one graph required");
    const int m = graphs.front().node_count();
    for (const auto& g : graphs)
        if (g.node_count() != m)
            throw ConfigInvalid("ensemble: all graphs must share the node set");
    const std::size_t s = graphs.size();
    if (transition.rows() != s || transition.cols() != s)
        throw ConfigInvalid("ensemble: transition matrix must be s x s");
    for (std::size_t u = 0; u < s; ++u) {
        double row_sum = 0.0;
        for (std::size_t v = 0; v < s; ++v) {
            const double p = transition(u, v);
            if (p < 0.0) throw ConfigInvalid("ensemble: transition entries must be >= 0");
            row_sum += p;
        }
        if (std::abs(row_sum - 1.0) > 1e-12)
            throw ConfigInvalid("ensemble: transition rows must sum to 1 (tol 1e-12)");
    }
    if (initial_dist.size() != s)
        throw ConfigInvalid("ensemble: initial distribution length must equal s");
    double total = 0.0;
    for (double p : initial_dist) {
        if (p < 0.0) throw ConfigInvalid("ensemble: initial distribution entries must be >= 0");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ConfigInvalid("ensemble: initial distribution must sum to 1 (tol 1e-12)");
}

Vec stationary_distribution(const Matrix& transition) {
    const std::size_t s = transition.rows();
    if (s == 0 || transition.cols() != s)
        throw DimensionMismatch("stationary_distribution: matrix must be square");
    for (std::size_t u = 0; u < s; ++u) {
        double row_sum = 0.0;
        for (std::size_t v = 0; v < s; ++v) row_sum += transition(u, v);
        if (std::abs(row_sum - 1.0) > 1e-10)
            throw NonErgodicChain("stationary_distribution: matrix is not row-stochastic");
    }

    // pi (P - I) = 0  <=>  (P^T - I) pi^T = 0
    Matrix a = transpose(transition) - Matrix::identity(s);
    if (numeric_rank(a, 1e-9) != s - 1)
        throw NonErgodicChain(
            "stationary_distribution: eigenvalue-1 eigenspace is not one-dimensional");

    // Overdetermined system [P^T - I; 1^T] pi = [0; 1], solved by normal
    // equations; fine at this scale and verified against the residual bound.
    Matrix m(s + 1, s);
    Vec rhs(s + 1, 0.0);
    for (std::size_t r = 0; r < s; ++r)
        for (std::size_t c = 0; c < s; ++c) m(r, c) = a(r, c);
    for (std::size_t c = 0; c < s; ++c) m(s, c) = 1.0;
    rhs[s] = 1.0;

    const Matrix mt = transpose(m);
    Vec pi = solve_linear(mt * m, mt * rhs);

    double total = 0.0;
    for (double v : pi) total += v;
    if (!(total > 0.0)) throw NonErgodicChain("stationary_distribution: degenerate solution");
    for (double& v : pi) v /= total;

    double residual = 0.0;
    for (std::size_t v = 0; v < s; ++v) {
        double acc = 0.0;
        for (std::size_t u = 0; u < s; ++u) acc += pi[u] * transition(u, v);
        residual = std::max(residual, std::abs(acc - pi[v]));
    }
    if (residual > 1e-10)
        throw NonErgodicChain("stationary_distribution: residual exceeds 1e-10");
    return pi;
}

bool is_primitive(const Matrix& transition) {
    const std::size_t s = transition.rows();
    if (s == 0) return false;
    std::vector<char> reach(s * s, 0);
    for (std::size_t i = 0; i < s * s; ++i) reach[i] = transition.data()[i] > 0.0 ? 1 : 0;

    const auto all_positive = [&]() {
        for (char v : reach)
            if (!v) return false;
        return true;
    };

    std::vector<char> base = reach;
    std::vector<char> next(s * s, 0);
    const std::size_t max_power = s * s;
    for (std::size_t power = 1; power <= max_power; ++power) {
        if (all_positive()) return true;
        std::fill(next.begin(), next.end(), 0);
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t k = 0; k < s; ++k)
                if (reach[i * s + k])
                    for (std::size_t j = 0; j < s; ++j)
                        if (base[k * s + j]) next[i * s + j] = 1;
        reach.swap(next);
    }
    return all_positive();
}

Digraph union_graph(const TopologyEnsemble& ensemble) {
    ensemble.validate();
    const Vec pi = stationary_distribution(ensemble.transition);
    const int m = ensemble.node_count();
    Digraph u(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            bool present = false;
            double w = 0.0;
            for (int g = 0; g < ensemble.graph_count(); ++g) {
                const double a = ensemble.graphs[static_cast<std::size_t>(g)].weight(i, j);
                if (a > 0.0) present = true;
                w += pi[static_cast<std::size_t>(g)] * a;
            }
            if (present) u.add_edge(j, i, w);
        }
    }
    return u;
}

EnsembleReport validate_assumption_1(const TopologyEnsemble& ensemble) {
    ensemble.validate();
    EnsembleReport report;
    const int m = ensemble.node_count();

    report.balanced_all = true;
    for (const auto& g : ensemble.graphs)
        if (!g.is_balanced()) report.balanced_all = false;

    // Union edge membership does not depend on the stationary distribution.
    Digraph membership(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            for (const auto& g : ensemble.graphs)
                if (g.weight(i, j) > 0.0) {
                    if (!membership.has_edge(j, i)) membership.add_edge(j, i, 0.5);
                    break;
                }
        }
    report.union_has_spanning_tree = has_spanning_tree(membership);

    report.neighbor_sizes.resize(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < m; ++i)
        report.neighbor_sizes[static_cast<std::size_t>(i)] =
            static_cast<int>(membership.in_neighbors(i).size());
    report.n_bar = 0;
    for (int v : report.neighbor_sizes) report.n_bar = std::max(report.n_bar, v);

    for (const auto& g : ensemble.graphs)
        report.lambda_m = std::max(report.lambda_m, spectral_norm(laplacian(g)));

    bool unique_stationary = true;
    Vec pi;
    try {
        pi = stationary_distribution(ensemble.transition);
    } catch (const NonErgodicChain&) {
        unique_stationary = false;
    }
    report.ergodic = unique_stationary && is_primitive(ensemble.transition);

    if (report.ergodic) {
        report.stationary = pi;
        const Digraph u = union_graph(ensemble);
        // pi_min: least stationary mass carried by any union edge.
        double pi_min = 1.0;
        bool any_edge = false;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                if (i == j || !membership.has_edge(j, i)) continue;
                any_edge = true;
                double mass = 0.0;
                for (int g = 0; g < ensemble.graph_count(); ++g)
                    if (ensemble.graphs[static_cast<std::size_t>(g)].weight(i, j) > 0.0)
                        mass += pi[static_cast<std::size_t>(g)];
                pi_min = std::min(pi_min, mass);
            }
        report.pi_min = any_edge ? pi_min : 0.0;

        const Matrix l = laplacian(u);
        report.lambda2_mirror = smallest_nonzero_eigenvalue(0.5 * (l + transpose(l)));
    }
    return report;
}

MarkovSwitcher::MarkovSwitcher(const TopologyEnsemble& ensemble, Rng stream)
    : transition_(ensemble.transition), rng_(stream) {
    state_ = sample_from(ensemble.initial_dist.data(),
                         static_cast<int>(ensemble.initial_dist.size()));
}

int MarkovSwitcher::sample_from(const double* row, int n) {
    const double u = rng_.uniform01();
    double acc = 0.0;
    for (int v = 0; v < n; ++v) {
        acc += row[v];
        if (u < acc) return v;
    }
    return n - 1;  // guards against accumulated rounding in the row sum
}

int MarkovSwitcher::next() {
    const std::size_t s = transition_.rows();
    const double* row = transition_.data().data() + static_cast<std::size_t>(state_) * s;
    state_ = sample_from(row, static_cast<int>(s));
    return state_;
}

}  // namespace eftqdi
