#include "hof/renorm.hpp"

#include <algorithm>

namespace hof {

EigenReport subspace_eigen(const Eigen::MatrixXd& J, int n_modes, int guard, int max_iter, double tol)
{
    const int n = int(J.rows());
    const int m = std::min(n, n_modes + guard);
    n_modes = std::min(n_modes, m);
    // fixed seed so repeated runs agree bit for bit
    std::mt19937_64 rng(20240607);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd Q(n, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) Q(i, j) = nd(rng);
    Q = Eigen::HouseholderQR<Eigen::MatrixXd>(Q).householderQ() * Eigen::MatrixXd::Identity(n, m);

    EigenReport rep;
    for (int it = 1; it <= max_iter; ++it) {
        Eigen::MatrixXd Z = J * Q;
        Q = Eigen::HouseholderQR<Eigen::MatrixXd>(Z).householderQ() * Eigen::MatrixXd::Identity(n, m);
        if (it % 10 != 0 && it != max_iter) continue;

        // Rayleigh-Ritz on the current basis
        Eigen::MatrixXd H = Q.transpose() * J * Q;
        Eigen::EigenSolver<Eigen::MatrixXd> es(H);
        Eigen::VectorXcd th = es.eigenvalues();
        Eigen::MatrixXcd Y = es.eigenvectors();
        std::vector<int> order(m);
        for (int i = 0; i < m; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return std::abs(th[a]) > std::abs(th[b]); });
        Eigen::MatrixXcd Qc = Q.cast<std::complex<double>>();
        Eigen::MatrixXcd Jc = J.cast<std::complex<double>>();
        rep.eigenvalues.clear();
        rep.residuals.clear();
        double worst = 0;
        for (int k = 0; k < n_modes; ++k) {
            int i = order[k];
            Eigen::VectorXcd x = Qc * Y.col(i);
            x /= x.norm();
            double r = (Jc * x - th[i] * x).norm() / std::max(1.0, std::abs(th[i]));
            rep.eigenvalues.push_back(th[i]);
            rep.residuals.push_back(r);
            worst = std::max(worst, r);
        }
        rep.iterations = it;
        if (worst < tol) break;
    }
    return rep;
}

}  // namespace hof
