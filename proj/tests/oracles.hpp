#pragma once

#include "tdheston/heston_cf.hpp"
#include "tdheston/term_structure.hpp"

#include <vector>

namespace oracle {

using tdheston::Complex;

/// Step-controlled Runge-Kutta integration of the coefficient ODEs over one
/// period, starting from (c0, d0).
tdheston::CfCoeffs integrate_period(double tau, Complex x_arg, Complex c0, Complex d0,
                                    const tdheston::PeriodParams& p);

/// Same, chained backwards through the periods covering [0, t].
tdheston::CfCoeffs integrate_to(const tdheston::TermStructure& ts, double t, Complex x_arg,
                                Complex v_arg);

double normal_cdf(double x);

/// Black formula written out independently of the library.
double black(double forward, double strike, double vol, double t, bool is_call);

}  // namespace oracle
