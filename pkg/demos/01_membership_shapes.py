"""A quick tour of the three membership function shapes.

Each shape maps a crisp input to a degree in [0, 1].  The generalized
bell and the two-sided Gaussian are smooth (and trainable); the
triangle is piecewise linear and stays fixed during training.
"""

import numpy as np

from neurofuzzy import GeneralizedBell, Triangular, TwoSidedGaussian

bell = GeneralizedBell(a=0.5, b=2.0, c=0.0)
gauss2 = TwoSidedGaussian(sigma_left=0.3, c_left=-0.2,
                          sigma_right=0.5, c_right=0.3)
tri = Triangular(left=-1.0, peak=0.0, right=1.0)

xs = np.linspace(-1.5, 1.5, 13)
print(f"{'x':>6}  {'bell':>6}  {'gauss2':>6}  {'triangle':>8}")
for x in xs:
    print(f"{x:>6.2f}  {bell.degree(x):>6.3f}  {gauss2.degree(x):>6.3f}"
          f"  {tri.degree(x):>8.3f}")

# the bell is exactly 0.5 one half-width from its center
print()
print("bell at c + a:", bell.degree(bell.c + bell.a))

# the two-sided Gaussian holds degree 1.0 across its whole plateau
print("gauss2 across plateau:",
      [round(gauss2.degree(x), 3) for x in (-0.2, 0.0, 0.3)])

# a crude ASCII profile of the bell, peak in the middle
print()
for x in np.linspace(-1.2, 1.2, 25):
    bar = "#" * int(40 * bell.degree(x))
    print(f"{x:>5.1f} |{bar}")
