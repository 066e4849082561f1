#pragma once

namespace invsq {

// Dimension and coupling of L_a = -Delta + a/|x|^2 with the exponents derived
// from them. Build through derive_params so the fields stay consistent.
struct CouplingParams {
  int d = 3;
  double a = 0.0;
  double sigma = 0.0;  // (d-2)/2 - sqrt((d-2)^2/4 + a)
  double beta = 1.0;   // a = ((d-2)/2)^2 (beta^2 - 1)
  double nu = 0.5;     // (d-2) beta / 2, order of the radial Bessel operator
  bool evolution_admissible = true;

  double half() const { return 0.5 * (d - 2); }
  // 2d/(d-2), the critical Sobolev exponent.
  double critical_exponent() const { return 2.0 * d / (d - 2); }
  // Surface area of the unit sphere in R^d.
  double omega() const;
};

CouplingParams derive_params(int d, double a);

// Lower edge of the window in which a focusing blowup statement holds:
// a > -((d-2)/2)^2 + ((d-2)/(d+2))^2.
double blowup_window_edge(int d);

// a /\ 0 parameters, used by the threshold quantities.
CouplingParams negative_part(const CouplingParams& p);

}  // namespace invsq
