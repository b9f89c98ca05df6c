"""A typechecker and small-step interpreter for a linear lambda calculus
with first-class destinations."""

__version__ = "0.1.0"
