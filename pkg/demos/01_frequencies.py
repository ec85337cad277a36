"""
Frequencies and their arithmetic
================================

Continued fractions, convergent denominators and the exponent beta that
measures how well a frequency is approximated by rationals.
"""

import math

from qplab.arith import beta_estimate, continued_fraction, liouville_frequency, parse_alpha

# The golden mean has all partial quotients equal to 1, so q_k are Fibonacci numbers.
golden = continued_fraction((math.sqrt(5) - 1) / 2, 12)
print("golden quotients   ", golden.partial_quotients)
print("golden denominators", golden.convergent_denominators)
print("golden beta        ", beta_estimate(golden))

# Config strings name frequencies the same way the CLI does.
print("parsed 'silver'    ", parse_alpha("silver"))

# A synthetic Liouville-type frequency: a_{k+1} = round(exp(c q_k)), so beta is close to c.
liou = liouville_frequency(0.5, 3)
print("liouville quotients", liou.partial_quotients, "alpha", liou.alpha, "beta", beta_estimate(liou))
