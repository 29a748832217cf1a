#include "itdflex/net/ybus.hpp"

#include <vector>

#include "itdflex/errors.hpp"

namespace itdflex {

Eigen::SparseMatrix<std::complex<double>>
ybus_from_branches(int n_bus, const std::vector<Branch>& branches) {
    using cplx = std::complex<double>;
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(4 * branches.size());
    for (const auto& br : branches) {
        if (br.r == 0.0 && br.x == 0.0) {
            throw SolverError("branch " + std::to_string(br.from) + "-" +
                              std::to_string(br.to) + " has zero impedance");
        }
        const cplx ys = 1.0 / cplx(br.r, br.x);
        const cplx ysh(0.0, br.b_charge / 2.0);
        const int f = br.from - 1, t = br.to - 1;
        trip.emplace_back(f, f, ys + ysh);
        trip.emplace_back(t, t, ys + ysh);
        trip.emplace_back(f, t, -ys);
        trip.emplace_back(t, f, -ys);
    }
    Eigen::SparseMatrix<cplx> y(n_bus, n_bus);
    y.setFromTriplets(trip.begin(), trip.end());
    return y;
}

Eigen::SparseMatrix<std::complex<double>> build_ybus(const TransmissionArea& area) {
    return ybus_from_branches(area.n_bus(), area.branches);
}

} // namespace itdflex
