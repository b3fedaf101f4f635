#ifndef PBOX_BUILTINS_HPP
#define PBOX_BUILTINS_HPP

#include <vector>

#include "pbox/choquet.hpp"
#include "pbox/multivariate.hpp"
#include "pbox/pbox.hpp"
#include "pbox/preorder.hpp"

namespace pbox::builtins {

// Damped oscillator: zeta(c,k) = c / (2 sqrt(k m)) with m = 1, design point
// (c*, k*) = (2, 1) and Z(c,k) = max{|c-2|, 2|k-1|}.
inline constexpr double kOscillatorC = 2.0;
inline constexpr double kOscillatorK = 1.0;

double oscillator_lower_osc(double z);  // (2-z) / (2 sqrt(1+z/2))
double oscillator_upper_osc(double z);  // (2+z) / (2 sqrt(1-z/2))
/// z(t) = 2 - t(-t + sqrt(t^2+8)); inverts the lower oscillation.
double oscillator_z_of_t(double t);
Oscillation oscillator_lower();
Oscillation oscillator_upper();
/// Marginals F_1(z) = F_2(z) = z (upper CDFs vacuous).
std::vector<MarginalSpec> oscillator_marginals();
/// Independence joint: lower CDF z^2.
PBox oscillator_pbox();

// River dike: overflow height as a function of z in [-1,1].
inline constexpr double kDikeMu = 1335.0;
inline constexpr double kDikeBeta = 716.0;
inline constexpr double kDikeWidth = 300.0;
inline constexpr double kDikeLength = 6400.0;

/// ((mu - beta ln(-ln((1+z)/2))) / ((30-15z) sqrt((5-2z)/l) b))^{3/5}, or 0
/// when the flow rate is negative.  +infinity at z = 1.
double dike_o(double z);
Oscillation dike_lower();  // o(-z)
Oscillation dike_upper();  // o(z), unbounded
/// Marginals F_1(z) = z and F_2 = F_3 = F_4 = 1-(1-z)^2 (upper CDFs vacuous).
std::vector<MarginalSpec> dike_marginals();
/// Frechet joint: max{0, -3 + z + 3(1-(1-z)^2)}.
PBox dike_pbox();

/// Diagonal order on [0,1]^2 with Z(x,y) = (x+y)/2: z-image of the interior of
/// the rectangle [a,b] x [c,d].
ZEventSet diagonal_rectangle_interior(double a, double b, double c, double d);

/// Asserts the fixture constants in debug builds.
void check_constants();

}  // namespace pbox::builtins

#endif  // PBOX_BUILTINS_HPP
