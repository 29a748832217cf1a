#pragma once

#include <complex>
#include <vector>

#include <Eigen/SparseCore>

#include "itdflex/net/case.hpp"

namespace itdflex {

/// Bus admittance matrix from an explicit branch list over buses 0..n_bus-1
/// (0-based). Pi model: series admittance 1/(r+jx), half the charging
/// susceptance at each terminal. Throws SolverError on a zero-impedance branch.
Eigen::SparseMatrix<std::complex<double>>
ybus_from_branches(int n_bus, const std::vector<Branch>& branches);

/// Y = G + jB for one transmission area over its own buses.
Eigen::SparseMatrix<std::complex<double>> build_ybus(const TransmissionArea& area);

} // namespace itdflex
