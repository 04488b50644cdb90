#pragma once

namespace qzzb_cli {

// Oracle cross-check suite: closed forms vs quadrature, coefficient formulas
// vs truncated simulation, Helstrom vs the pure-state expression, variational
// optima vs grid search.  Prints one pass/fail line per check; returns 0 iff
// everything passed.
int cmd_selftest(double lambda);

} // namespace qzzb_cli
