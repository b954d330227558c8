#pragma once

// Weighted Laplace transform pair on a TimeGrid and the space-time norms
// of L2_nu(R; H^s) computed on the frequency side.

#include <span>
#include <vector>

#include "homoglab/space_time.hpp"

namespace homoglab::norms {

/// F_j = (dt / sqrt(2 pi)) sum_i f(t_i) exp(-(nu + i k_j) t_i), stored at slot j + J.
ComplexVector laplace_forward(const TimeGrid& time, std::span<const Complex> samples);
/// Inverse of laplace_forward: f(t_i) = exp(nu t_i) (sqrt(2 pi) / T) sum_j F_j exp(i k_j t_i).
ComplexVector laplace_inverse(const TimeGrid& time, std::span<const Complex> spectrum);

/// Builds a space-time field from spatial samples at t_i (either spatial domain).
SpaceTimeField from_time_samples(const BoxGrid& box, const TimeGrid& time,
                                 const std::vector<torus::SpectralField>& samples);
/// Spatial samples at t_i, physical domain.
std::vector<torus::SpectralField> to_time_samples(const SpaceTimeField& field);

/// Spatial H^s norm with multiplier (1 + |xi|^2)^{s/2}, xi = 2 pi q (frequency domain).
double sobolev_norm(const torus::SpectralField& f, double s);
inline double norm_Hminus1(const torus::SpectralField& f) { return sobolev_norm(f, -1.0); }
inline double norm_H1(const torus::SpectralField& f) { return sobolev_norm(f, 1.0); }

/// L2_nu(R; H^s) by the weighted Plancherel identity: dk sum_j ||F_j||_{H^s}^2.
double norm_L2nu(const SpaceTimeField& field, double spatial_order = 0.0);
inline double norm_L2nu_Hminus1(const SpaceTimeField& field) { return norm_L2nu(field, -1.0); }
inline double norm_L2nu_H1(const SpaceTimeField& field) { return norm_L2nu(field, 1.0); }
/// Time-side quadrature: sum_i dt exp(-2 nu t_i) ||f(t_i)||^2, spatial L2.
double norm_L2nu_samples(const TimeGrid& time, const std::vector<torus::SpectralField>& samples);

/// Multiplies slot j by lambda_j^s (principal branch; Re lambda = nu > 0).
SpaceTimeField dt_multiplier(double s, const SpaceTimeField& field);

} // namespace homoglab::norms
