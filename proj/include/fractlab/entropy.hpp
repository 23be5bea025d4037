#pragma once

#include "fractlab/measure.hpp"

namespace fractlab {

struct EntropyValue {
    double bits = 0.0;
    int partition_depth = 0;
};

// H(mu, D_k) in bits, with the 0*log(0) = 0 convention. k <= N.
EntropyValue shannon_entropy(const DyadicMeasure& mu, int k);

// H_k(mu) = H(mu, D_k)/k in [0, d]. k = 0 is a domain error.
double normalized_entropy(const DyadicMeasure& mu, int k);

// H(mu, D_k2 | D_k1) = sum over positive-mass coarse cells G of
// mu(G) H(mu_G, D_k2). Computed from the definition (not as a difference),
// so the chain rule H(D_k2) = H(D_k1) + H(D_k2|D_k1) is a real test.
EntropyValue conditional_entropy(const DyadicMeasure& mu, int k2, int k1);

// Entropy of mu with respect to the depth-q grid shifted by 2^-(q+1) in each
// coordinate (cells wrap around 1). Requires q < N so every depth-N cell
// lands in exactly one shifted cell. Test fixture for the partition
// comparison property; not part of the dyadic family.
EntropyValue shifted_grid_entropy(const DyadicMeasure& mu, int q);

// Entropy in bits of an arbitrary nonnegative weight vector (normalized by
// its sum). Used by the 1-D binning operations.
double entropy_of_weights(const std::vector<double>& w);

}  // namespace fractlab
