#pragma once

#include <complex>
#include <string>
#include <vector>

namespace dks::gain {

/// Closed-form expectation values on the +x coherent spin state that back the
/// echo-gain algebra. Operator strings are built from the ladder operators,
/// S_z, and the diagonal unitaries W = exp[i tau (2 S_z + 1)],
/// V = exp[4 i tau (S_z + 1)] = W^2 exp(2 i tau); "d" marks a dagger.
/// The comm_* and triple_sym entries are the grouped commutator/product
/// expectations that enter the first-order echo expansion, with
/// U = exp(-i tau S_z^2).
std::complex<double> supplemental_identity(const std::string& id, double spin, double tau);

/// All identity names accepted by supplemental_identity.
const std::vector<std::string>& identity_ids();

} // namespace dks::gain
