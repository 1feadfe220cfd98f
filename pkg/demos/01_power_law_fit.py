"""
Fitting a power law to a size histogram
=======================================

Weighted least squares on (log10 A, log10 n) with Poisson errors, the
effect of inflating those errors, and chi-squared p-values.
"""

import numpy as np

from sizebreak import ErrorModel, SizeRange, chi2_pvalue, fit_loglog, generate
from sizebreak.synth import single_power_law_spec

# %%
# A noiseless power law is recovered to rounding error.
r = SizeRange(5, 15)
exact = generate(single_power_law_spec(r, 5.838, -1.645))
fit = fit_loglog(exact, r)
print("exact data:   c0 = %.12f  slope = %.12f  chi2 = %.1e" % (fit.log_norm, fit.slope, fit.chi2))

# %%
# With Poisson scatter the quoted 1-sigma errors come from the inverse normal
# matrix. At ~250k firms they are a few thousandths in the slope.
noisy = generate(single_power_law_spec(r, 5.838, -1.645, noise=ErrorModel(1.0), seed=1))
fit = fit_loglog(noisy, r)
c0_err, slope_err = fit.errors
print("noisy data:   c0 = %.4f +/- %.4f  slope = %.4f +/- %.4f" % (fit.log_norm, c0_err, fit.slope, slope_err))
print("              chi2/dof = %.2f/%d  p = %.3f" % (fit.chi2, fit.dof, fit.p_value))

# %%
# Inflating the errors by k divides chi2 by k**2 and leaves the coefficients alone.
for k in (1.0, 1.9):
    f = fit_loglog(noisy, r, 1, ErrorModel(k))
    print("k = %.1f:  chi2/dof = %.3f  slope = %.5f +/- %.5f" % (k, f.reduced_chi2, f.slope, f.errors[1]))

# %%
# Upper-tail probabilities. A chi2 of 26.9 on 19 degrees of freedom is
# unremarkable; 3.8 per dof on 9 dof is not.
print("Q(26.9; 19)   = %.4f" % chi2_pvalue(26.9, 19))
print("Q(3.8*9; 9)   = %.2e" % chi2_pvalue(3.8 * 9, 9))

# %%
# Higher-order polynomials in log-log space fit more freely.
for d in (1, 2, 3, 4):
    f = fit_loglog(noisy, SizeRange(5, 14), d)
    print("degree %d: chi2/dof = %.2f  coefficients = %s" % (d, f.reduced_chi2, np.round(f.coefficients, 3)))
