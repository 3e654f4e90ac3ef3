"""Numerical laboratory for the Nyman-Beurling-Baez-Duarte criterion.

Subpackages and modules:
    special_functions  zeta and friends on the critical strip
    mollifier          Moebius sieve and the mollifier Dirichlet polynomial
    quadrature         adaptive Gauss-Legendre integration on [0, t_max]
    criterion          weighted distance integrals, Gram matrix, d_N^2
    zeros              zero-ordinate tables, refinement, zero-sum diagnostics
    residues           residue terms R_N, the power series F_s, Lemma sums
    model              counterfactual zeta with an off-line zero quadruplet
    experiments        end-to-end experiment drivers shared by CLI and service
    service            FastAPI application exposing the experiment drivers
    cli                thin command-line client for the service layer
"""

__version__ = "0.1.0"
