"""Exact verification of an SL(3,C) deformation point for the Whitehead link complement.

Modules, bottom up:

- ``exactfield``: towers of quadratic extensions of Q with exact arithmetic
- ``linalg``: dense matrices over a tower, Bareiss rank, RREF kernels
- ``words``: free-group words and their images in matrix groups
- ``flags``: flags in P^2, triple ratios and edge cross-ratios
- ``defvar``: gluing systems, residuals and the log-basis Jacobian
- ``x0``: trace coordinates of pairs of order-three matrices
- ``whitehead``: the bundled instance and the staged verification pipeline
- ``cli``: the ``sl3whitehead`` command
"""

__version__ = "0.1.0"
