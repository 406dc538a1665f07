// observables.hpp - energy, spin and momentum of a single soliton.
//
// Quadratures over the analytic fields at fixed t, with eps = eps0 + eps1|E|^2:
//
//   W   = 1/4 int (2 eps0 E^2 + 3 eps1 E^4 + 2 B^2) dz
//   S   = int eps (E x A_pot) dz
//   P_z = int eps (E . d_z A_pot) dz
//
// and the closed forms they are compared against:
//
//   W ~ (A^2/k) [eps0 + eps1 A^2 + (3 k0^2 - 4 k lambda + k^2) / (3 omega^2)]
//   S ~ (2 A^2 / (3 k omega)) (3 eps0 + 2 eps1 A^2),   S_L = -S_R
//   P = k0 S

#pragma once

#include "kerr/dispersion.hpp"
#include "kerr/numerics.hpp"
#include "kerr/vec.hpp"

namespace kerr {

struct Observables {
    double W = 0.0;
    Vec3 S = Vec3::Zero();
    Vec3 P = Vec3::Zero();
};

// Quadrature window: 40/k either side of the soliton centre at time t.
Interval soliton_window(const SolitonParams& p, double t = 0.0, double half_width_in_sizes = 40.0);

// Lagrangian density 1/4 (2 eps0 E^2 + eps1 E^4 - 2 B^2) at (t, z).
double lagrangian_density(const SolitonParams& p, double t, double z);

double energy(const SolitonParams& p, const QuadratureSpec& spec = {}, double t = 0.0);
double energy_closed(const SolitonParams& p);

Vec3 spin(const SolitonParams& p, const QuadratureSpec& spec = {}, double t = 0.0);
double spin_z(const SolitonParams& p, const QuadratureSpec& spec = {}, double t = 0.0);
// Signed: +S for right, -S for left polarization.
double spin_closed(const SolitonParams& p);

Vec3 momentum(const SolitonParams& p, const QuadratureSpec& spec = {}, double t = 0.0);

Observables observables(const SolitonParams& p, const QuadratureSpec& spec = {}, double t = 0.0);

// One line of an observable scan.
struct ObservableRow {
    double X;
    double W_quad;
    double W_closed;
    double S_quad;
    double S_closed;
    double P_quad;
    double k0S;
    double rel_dW;
    double rel_dS;
    double rel_dP;
};

ObservableRow observable_row(const SolitonParams& p, const QuadratureSpec& spec = {});

}  // namespace kerr
