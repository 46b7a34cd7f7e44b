"""Design and validation of entangling gates in micromotion-affected ion traps.

Modules
-------
mathieu
    Floquet solutions of the Mathieu equation and micromotion decomposition.
crystal
    Equilibrium positions and normal modes of linear Coulomb crystals.
lightmatter
    State-dependent force models on secular and micromotion sidebands.
magnus
    Displacements, spin-spin phases and gate design by the Magnus expansion.
errors
    Analytic infidelity budget and gate-time sweeps.
oracle
    Direct integration of the interaction Hamiltonian.
cli
    Scenario runner writing CSV tables and SVG panels.
"""

__version__ = "0.1.0"
