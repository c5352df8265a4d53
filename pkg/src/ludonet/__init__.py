"""Workbench for multiplicative proof nets and ludics.

Two halves:

* `ludonet.mll` -- multiplicative formulas, paraproof structures,
  correctness criteria (Danos-Regnier, acyclicity, counter-proof,
  game-style), the parsing rewrite system, sequentialization and cut
  elimination, plus a random structure generator.

* `ludonet.ludics` -- designs, base inference, chronicles, design
  orderings, normalization machines (weak, strong, token), orthogonality,
  behaviours with additives and delocation, and a bridge to affine
  lambda-terms with branching.

`ludonet.cli` exposes everything on the command line and as a small local
HTTP service.
"""

__version__ = "0.1.0"
