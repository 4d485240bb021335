#include "nmv/wasserstein.hpp"

#include <cmath>
#include <limits>

namespace nmv {

double assignment_cost(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    if (n == 0) return 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    double total = 0.0;
    for (int j = 1; j <= n; ++j) total += cost[p[j] - 1][j - 1];
    return total;
}

double wasserstein2(const EmpiricalLaw& a, const EmpiricalLaw& b, long max_atoms) {
    if (a.size() != b.size())
        throw config_error("wasserstein2: unequal atom counts are unsupported");
    if (!a.atom(0).same_geometry(b.atom(0)))
        throw config_error("wasserstein2: laws live on different grid geometries");
    const long n = a.size();
    if (n > max_atoms) throw config_error("wasserstein2: atom count above the exact-assignment cap");
    std::vector<std::vector<double>> cost(static_cast<size_t>(n),
                                          std::vector<double>(static_cast<size_t>(n)));
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            const double d = sup_norm_diff(a.atom(i), b.atom(j));
            cost[static_cast<size_t>(i)][static_cast<size_t>(j)] = d * d;
        }
    return std::sqrt(assignment_cost(cost) / static_cast<double>(n));
}

}  // namespace nmv
