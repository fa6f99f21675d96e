#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>

#include "causalfront/causal_graph.hpp"
#include "causalfront/metrics.hpp"
#include "causalfront/rng.hpp"

namespace causalfront {

using complexd = std::complex<double>;
using Mat4 = std::array<complexd, 16>;  // row-major, basis |HH>,|HV>,|VH>,|VV>

// Two-qubit state (1+gamma)/2 |Phi+><Phi+| + (1-gamma)/2 |Phi-><Phi-| with
// |Phi+-> = (|HV> +- |VH>)/sqrt(2). gamma=1 is the maximally entangled state,
// gamma=0 the incoherent HV/VH mixture.
struct GammaState {
    double gamma = 1.0;
    Mat4 density_matrix() const;
};

// Two projective polarization measurements per party. An angle t measures the
// basis { cos t |H> + sin t |V>, -sin t |H> + cos t |V> }; outcome 0 is the
// first element. Defaults are validated against the S(1) = 2*sqrt(2) anchor,
// giving S(gamma) = sqrt(2)*(1+gamma) exactly.
struct MeasurementSettings {
    std::array<double, 2> alice;
    std::array<double, 2> bob;
    static MeasurementSettings chsh_optimal();
};

// Synthetic F(a,b,x,y) over variables (a,b,x,y), settings uniformly weighted
// 1/4. Exact mode (no shots): F = <ab| U ρ U† |ab> / 4. Sampled mode draws
// `shots` multinomial events from the exact table and normalizes.
FrequencyTable generate_frequencies(double gamma,
                                    const MeasurementSettings& settings =
                                        MeasurementSettings::chsh_optimal(),
                                    std::optional<long long> shots = std::nullopt,
                                    RngStream* rng = nullptr);

// S = E[x1 y1] - E[x2 y1] + E[x1 y2] + E[x2 y2] with correlators computed from
// conditional frequencies. Requires binary a,b,x,y and every setting pair of
// the table to have support.
double chsh(const FrequencyTable& freq);

// Bell graph of the experiment: hidden lambda, observable x,y,a,b with
// a <- (x, lambda) and b <- (y, lambda). Extra edges are prepended to the
// target's parent list and registered as penalized edges.
CausalGraph make_bell_graph(std::span<const Edge> extra_edges = {}, int lambda_dim = 4);

}  // namespace causalfront
